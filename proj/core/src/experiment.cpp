#include "gnefair/experiment.hpp"

#include <cmath>
#include <fstream>
#include <ostream>
#include <system_error>

#include <json.hpp>

#include "gnefair/csv.hpp"
#include "gnefair/equilibria.hpp"
#include "gnefair/errors.hpp"
#include "gnefair/evgame.hpp"
#include "gnefair/fairness.hpp"
#include "gnefair/plot.hpp"

namespace gnefair::experiment {

namespace {

namespace fs = std::filesystem;
using csv::format_number;

constexpr int kManifestSchemaVersion = 1;

struct SolveRecord {
  std::string label;
  bool converged = false;
  int iterations = 0;
  double kkt_residual = 0.0;
};

struct Artifacts {
  std::vector<std::pair<std::string, std::string>> files;
  std::vector<SolveRecord> solves;

  void add_file(std::string name, std::string content) {
    files.emplace_back(std::move(name), std::move(content));
  }
  void add_solve(std::string label, const EquilibriumResult& eq) {
    solves.push_back({std::move(label), eq.converged, eq.iterations, eq.kkt_residual});
  }
};

std::vector<std::string> numbered(const std::string& prefix, std::size_t count) {
  std::vector<std::string> out;
  for (std::size_t i = 1; i <= count; ++i) out.push_back(prefix + std::to_string(i));
  return out;
}

void append_numbers(std::vector<std::string>& cells, const Vector& v, std::size_t count) {
  for (std::size_t i = 0; i < count; ++i)
    cells.push_back(static_cast<Eigen::Index>(i) < v.size()
                        ? format_number(v(static_cast<Eigen::Index>(i)))
                        : format_number(std::nan("")));
}

std::vector<std::string> concat(std::vector<std::vector<std::string>> parts) {
  std::vector<std::string> out;
  for (auto& p : parts) out.insert(out.end(), p.begin(), p.end());
  return out;
}

int grid_density_for(const config::ExperimentConfig& cfg, std::size_t agents) {
  return cfg.sweep.grid_density > 0 ? cfg.sweep.grid_density : default_grid_density(agents);
}

Artifacts run_vgne(const config::ExperimentConfig& cfg) {
  const GameModel game = cfg.build_game();
  const auto eq = solve_vgne(game, cfg.solver);
  const Vector costs = eval_costs(game, eq.x);
  csv::Table table({"agent", "u", "cost", "lambda", "kkt_residual"});
  for (Eigen::Index i = 0; i < eq.x.size(); ++i)
    table.add_row({std::to_string(i + 1), format_number(eq.x(i)), format_number(costs(i)),
                   format_number(eq.lambda_per_agent(i)), format_number(eq.kkt_residual)});
  Artifacts out;
  out.add_file("equilibrium.csv", table.str());
  out.add_solve("vgne", eq);
  return out;
}

Artifacts run_fgne(const config::ExperimentConfig& cfg) {
  const GameModel game = cfg.build_game();
  const std::size_t m = game.num_agents();
  const auto res = solve_fgne(game, cfg.metric, grid_density_for(cfg, m),
                              cfg.sweep.refine_iters, cfg.solver, cfg.sweep.threads);

  csv::Table incumbent(concat({{"metric"}, numbered("r_", m), numbered("u_", m),
                               numbered("cost_", m), numbered("lambda_", m),
                               {"f", "kkt_residual"}}));
  std::vector<std::string> row{cfg.metric.label()};
  append_numbers(row, res.r_star, m);
  append_numbers(row, res.x_star, m);
  append_numbers(row, eval_costs(game, res.x_star), m);
  append_numbers(row, res.equilibrium.lambda_per_agent, m);
  row.push_back(format_number(res.f_star));
  row.push_back(format_number(res.equilibrium.kkt_residual));
  incumbent.add_row(std::move(row));

  csv::Table trace(concat({{"index", "phase"}, numbered("r_", m), numbered("u_", m),
                           {"f", "converged"}}));
  for (std::size_t k = 0; k < res.search_trace.size(); ++k) {
    const auto& e = res.search_trace[k];
    std::vector<std::string> cells{
        std::to_string(k), e.phase == FgneTraceEntry::Phase::grid ? "grid" : "refine"};
    append_numbers(cells, e.r, m);
    append_numbers(cells, e.x, m);
    cells.push_back(format_number(e.f));
    cells.push_back(e.converged ? "1" : "0");
    trace.add_row(std::move(cells));
  }

  Artifacts out;
  out.add_file("fgne.csv", incumbent.str());
  out.add_file("trace.csv", trace.str());
  out.add_solve("fgne", res.equilibrium);
  return out;
}

Artifacts run_sweep(const config::ExperimentConfig& cfg) {
  const GameModel game = cfg.build_game();
  const std::size_t m = game.num_agents();
  const auto metrics =
      cfg.sweep.metrics.empty() ? config::default_sweep_metrics() : cfg.sweep.metrics;
  const auto grid = simplex_grid(m, grid_density_for(cfg, m));
  const auto samples = gne_set_sample(game, grid, cfg.solver, cfg.sweep.threads);

  std::vector<std::optional<Vector>> benches;
  for (const auto& metric : metrics) {
    std::optional<Vector> bench;
    if (metric.kind == FairnessMetric::Kind::NBS) {
      try {
        bench = resolve_benchmark_costs(game, metric);
      } catch (const DomainError&) {
      }
    }
    benches.push_back(std::move(bench));
  }

  std::vector<std::string> metric_cols;
  for (const auto& metric : metrics) metric_cols.push_back(metric.label());
  csv::Table table(concat({numbered("r_", m), numbered("u_", m), numbered("lambda_", m),
                           {"converged", "strict_complementarity"}, metric_cols}));
  Artifacts out;
  for (std::size_t k = 0; k < samples.size(); ++k) {
    const auto& s = samples[k];
    std::vector<std::string> cells;
    append_numbers(cells, s.r, m);
    append_numbers(cells, s.converged ? s.result.x : Vector{}, m);
    append_numbers(cells, s.converged ? s.result.lambda_per_agent : Vector{}, m);
    cells.push_back(s.converged ? "1" : "0");
    cells.push_back(s.converged && s.strict_complementarity ? "1" : "0");
    const Vector costs = s.converged ? eval_costs(game, s.result.x) : Vector{};
    for (std::size_t j = 0; j < metrics.size(); ++j) {
      std::string cell = "NA";
      const bool needs_bench = metrics[j].kind == FairnessMetric::Kind::NBS;
      if (s.converged && (!needs_bench || benches[j])) {
        try {
          cell = format_number(fairness_value(metrics[j], costs, benches[j]));
        } catch (const DomainError&) {
        }
      }
      cells.push_back(std::move(cell));
    }
    table.add_row(std::move(cells));
    if (s.converged)
      out.add_solve("sweep[" + std::to_string(k) + "]", s.result);
    else
      out.solves.push_back({"sweep[" + std::to_string(k) + "]", false, 0, std::nan("")});
  }
  out.files.insert(out.files.begin(), {"gne_set.csv", table.str()});
  return out;
}

Artifacts run_audit(const config::ExperimentConfig& cfg) {
  const GameModel game = cfg.build_game();
  const std::size_t m = game.num_agents();
  const auto transforms = cfg.audit.transformations.empty()
                              ? config::default_audit_transformations(m)
                              : cfg.audit.transformations;
  Artifacts out;
  csv::Table table(concat({{"transformation", "kind"}, numbered("u_", m), {"linf_deviation"}}));
  const auto base = solve_vgne(game, cfg.solver);
  out.add_solve("baseline", base);
  std::vector<std::string> base_row{"baseline", "none"};
  append_numbers(base_row, base.x, m);
  base_row.push_back(format_number(0.0));
  table.add_row(std::move(base_row));
  for (const auto& t : transforms) {
    const auto eq = solve_vgne(apply_transformation(game, t.transformation), cfg.solver);
    out.add_solve(t.label, eq);
    std::vector<std::string> row{t.label, to_string(t.transformation.kind)};
    append_numbers(row, eq.x, m);
    row.push_back(format_number((eq.x - base.x).cwiseAbs().maxCoeff()));
    table.add_row(std::move(row));
  }
  out.files.insert(out.files.begin(), {"audit.csv", table.str()});
  return out;
}

Artifacts run_fig3(const config::ExperimentConfig& cfg) {
  Artifacts out;
  csv::Table table({"scenario", "agent", "u", "cost"});
  plot::GroupedBars alloc{"v-GNE allocation by scenario", "u", {}, {}, {}};
  plot::GroupedBars cost{"v-GNE cost by scenario", "cost", {}, {}, {}};
  for (auto s : ev::figure3_scenarios()) {
    const GameModel game = ev::scenario(s);
    const auto eq = solve_vgne(game, cfg.solver);
    out.add_solve(ev::to_string(s), eq);
    const Vector costs = eval_costs(game, eq.x);
    const auto m = static_cast<std::size_t>(eq.x.size());
    if (alloc.series.empty()) alloc.series = cost.series = numbered("agent ", m);
    alloc.groups.push_back(ev::to_string(s));
    cost.groups.push_back(ev::to_string(s));
    alloc.values.emplace_back(eq.x.data(), eq.x.data() + eq.x.size());
    cost.values.emplace_back(costs.data(), costs.data() + costs.size());
    for (std::size_t i = 0; i < m; ++i) {
      const auto k = static_cast<Eigen::Index>(i);
      table.add_row({ev::to_string(s), std::to_string(i + 1), format_number(eq.x(k)),
                     format_number(costs(k))});
    }
  }
  out.add_file("fig3.csv", table.str());
  if (cfg.output.emit_plots) {
    out.add_file("fig3_allocation.svg", plot::grouped_bar_svg(alloc));
    out.add_file("fig3_cost.svg", plot::grouped_bar_svg(cost));
  }
  return out;
}

Artifacts run_fig4(const config::ExperimentConfig& cfg) {
  Artifacts out;
  csv::Table table({"a_1", "method", "u_1", "u_2", "cost_1", "cost_2"});
  plot::GroupedBars alloc{"allocation by selection rule", "u", {}, {"agent 1", "agent 2"}, {}};
  plot::GroupedBars cost{"cost by selection rule", "cost", {}, {"agent 1", "agent 2"}, {}};
  const GameModel pair = ev::scenario(ev::Scenario::two_agent);
  const int density = grid_density_for(cfg, 2);
  const std::vector<FairnessMetric> metrics{
      FairnessMetric::maximin(), FairnessMetric::social_welfare(),
      FairnessMetric::nash_bargaining(), FairnessMetric::jain()};
  for (double a1 : {1.0, 3.0}) {
    const GameModel game = apply_transformation(pair, Transformation::cnc({a1, 1.0}, {0.0, 0.0}));
    auto emit = [&](const std::string& method, const Vector& x) {
      const Vector c = eval_costs(game, x);
      table.add_row({format_number(a1), method, format_number(x(0)), format_number(x(1)),
                     format_number(c(0)), format_number(c(1))});
      const std::string group = "a1=" + format_number(a1) + " " + method;
      alloc.groups.push_back(group);
      cost.groups.push_back(group);
      alloc.values.push_back({x(0), x(1)});
      cost.values.push_back({c(0), c(1)});
    };
    const auto v = solve_vgne(game, cfg.solver);
    out.add_solve("a1=" + format_number(a1) + " v-GNE", v);
    emit("v-GNE", v.x);
    for (const auto& metric : metrics) {
      const auto res = solve_fgne(game, metric, density, cfg.sweep.refine_iters, cfg.solver,
                                  cfg.sweep.threads);
      out.add_solve("a1=" + format_number(a1) + " " + metric.label(), res.equilibrium);
      emit(metric.label(), res.x_star);
    }
  }
  out.add_file("fig4.csv", table.str());
  if (cfg.output.emit_plots) {
    out.add_file("fig4_allocation.svg", plot::grouped_bar_svg(alloc));
    out.add_file("fig4_cost.svg", plot::grouped_bar_svg(cost));
  }
  return out;
}

std::string manifest(Command command, const config::ExperimentConfig& cfg,
                     const Artifacts& artifacts) {
  nlohmann::json doc;
  doc["schema_version"] = kManifestSchemaVersion;
  doc["gnefair_version"] = GNEFAIR_VERSION;
  doc["command"] = to_string(command);
  doc["config_hash"] = config::config_hash(cfg);
  doc["seed"] = cfg.solver.seed;
  nlohmann::json files = nlohmann::json::array();
  for (const auto& f : artifacts.files) files.push_back(f.first);
  files.push_back("manifest.json");
  doc["files"] = files;
  nlohmann::json solves = nlohmann::json::array();
  bool all = true;
  for (const auto& s : artifacts.solves) {
    solves.push_back({{"label", s.label},
                      {"converged", s.converged},
                      {"iterations", s.iterations},
                      {"kkt_residual", s.kkt_residual}});
    all = all && s.converged;
  }
  doc["all_converged"] = all;
  doc["solves"] = solves;
  return doc.dump(2) + "\n";
}

}  // namespace

std::string to_string(Command c) {
  switch (c) {
    case Command::vgne: return "vgne";
    case Command::fgne: return "fgne";
    case Command::sweep: return "sweep";
    case Command::audit: return "audit";
    case Command::reproduce_fig3: return "reproduce-fig3";
    case Command::reproduce_fig4: return "reproduce-fig4";
  }
  return "?";
}

Command command_from_string(const std::string& name) {
  for (auto c : {Command::vgne, Command::fgne, Command::sweep, Command::audit,
                 Command::reproduce_fig3, Command::reproduce_fig4})
    if (to_string(c) == name) return c;
  throw InvalidArgument("unknown command '" + name + "'");
}

bool needs_game(Command c) {
  return c != Command::reproduce_fig3 && c != Command::reproduce_fig4;
}

config::ExperimentConfig default_config() {
  config::ExperimentConfig cfg;
  cfg.scenario = "baseline";
  return cfg;
}

RunResult run(Command command, const config::ExperimentConfig& cfg, std::ostream& err) {
  RunResult result;
  const fs::path dir(cfg.output.directory);
  {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) {
      err << "error: cannot create output directory '" << dir.string() << "'"
          << (ec ? ": " + ec.message() : std::string()) << "\n";
      result.exit_code = kInvalidConfig;
      return result;
    }
  }

  Artifacts artifacts;
  try {
    switch (command) {
      case Command::vgne: artifacts = run_vgne(cfg); break;
      case Command::fgne: artifacts = run_fgne(cfg); break;
      case Command::sweep: artifacts = run_sweep(cfg); break;
      case Command::audit: artifacts = run_audit(cfg); break;
      case Command::reproduce_fig3: artifacts = run_fig3(cfg); break;
      case Command::reproduce_fig4: artifacts = run_fig4(cfg); break;
    }
  } catch (const NoConvergence& e) {
    err << "error: " << e.what() << "\n";
    result.exit_code = kNoConvergence;
  } catch (const AllPointsFailed& e) {
    err << "error: " << e.what() << "\n";
    result.exit_code = kNoConvergence;
  } catch (const NoValidPattern& e) {
    err << "error: " << e.what() << "\n";
    result.exit_code = kNoConvergence;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << "\n";
    result.exit_code = kMetricDomain;
  } catch (const MissingBenchmark& e) {
    err << "error: " << e.what() << "\n";
    result.exit_code = kMetricDomain;
  } catch (const InvalidArgument& e) {
    err << "error: invalid configuration: " << e.what() << "\n";
    result.exit_code = kInvalidConfig;
  } catch (const NotAffine& e) {
    err << "error: invalid configuration: " << e.what() << "\n";
    result.exit_code = kInvalidConfig;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    result.exit_code = kFailure;
  }
  if (result.exit_code != kSuccess) return result;

  artifacts.add_file("manifest.json", manifest(command, cfg, artifacts));
  for (const auto& [name, content] : artifacts.files) {
    const fs::path path = dir / name;
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    os << content;
    if (!os) {
      err << "error: failed to write " << path.string() << "\n";
      result.exit_code = kInvalidConfig;
      return result;
    }
    result.files.push_back(path);
  }
  return result;
}

}  // namespace gnefair::experiment
