#include "gnefair/fairness.hpp"

#include <charconv>
#include <cmath>
#include <limits>
#include <sstream>

#include "gnefair/errors.hpp"

namespace gnefair {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string short_number(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

struct Evaluation {
  double f = kNaN;
  bool converged = false;
  std::string note;
  EquilibriumResult eq;
};

}  // namespace

std::string to_string(FairnessMetric::Kind kind) {
  switch (kind) {
    case FairnessMetric::Kind::MM: return "MM";
    case FairnessMetric::Kind::SW: return "SW";
    case FairnessMetric::Kind::NBS: return "NBS";
    case FairnessMetric::Kind::AI: return "AI";
    case FairnessMetric::Kind::JI: return "JI";
  }
  return "?";
}

FairnessMetric::Kind metric_kind_from_string(const std::string& name) {
  for (auto k : {FairnessMetric::Kind::MM, FairnessMetric::Kind::SW,
                 FairnessMetric::Kind::NBS, FairnessMetric::Kind::AI,
                 FairnessMetric::Kind::JI})
    if (to_string(k) == name) return k;
  throw InvalidArgument("unknown fairness metric '" + name + "'");
}

std::string FairnessMetric::label() const {
  if (kind == Kind::AI) return "AI(" + short_number(alpha) + ")";
  return to_string(kind);
}

void FairnessMetric::validate() const {
  if (kind == Kind::AI && (!(alpha > 0.0) || alpha == 1.0 || !std::isfinite(alpha)))
    throw InvalidArgument("AI requires alpha > 0 and alpha != 1; use NBS for alpha = 1");
}

double fairness_value(const FairnessMetric& metric, const Vector& costs,
                      const std::optional<Vector>& benchmark_costs) {
  metric.validate();
  if (costs.size() == 0) throw InvalidArgument("no costs to evaluate");
  const double M = static_cast<double>(costs.size());
  switch (metric.kind) {
    case FairnessMetric::Kind::MM:
      return costs.maxCoeff();
    case FairnessMetric::Kind::SW:
      return costs.sum();
    case FairnessMetric::Kind::NBS: {
      const auto& bench = benchmark_costs ? benchmark_costs : metric.benchmark_costs;
      if (!bench) throw MissingBenchmark("NBS needs benchmark costs");
      if (bench->size() != costs.size())
        throw InvalidArgument("benchmark costs and costs differ in length");
      const Vector gains = *bench - costs;
      if (!(gains.array() > 0.0).all()) {
        std::ostringstream os;
        os << "NBS needs every agent to strictly improve on the benchmark; "
              "smallest gain is "
           << gains.minCoeff();
        throw DomainError(os.str());
      }
      return -gains.prod();
    }
    case FairnessMetric::Kind::AI: {
      if (!(costs.array() > 0.0).all())
        throw DomainError("AI needs strictly positive costs");
      const double e = 1.0 - metric.alpha;
      return costs.array().pow(e).sum() / e;
    }
    case FairnessMetric::Kind::JI: {
      const double sq = costs.squaredNorm();
      if (!(sq > 0.0)) throw DomainError("Jain's index is undefined for all-zero costs");
      const double s = costs.sum();
      return -(s * s) / (M * sq);
    }
  }
  return kNaN;
}

Vector resolve_benchmark_costs(const GameModel& game, const FairnessMetric& metric) {
  if (metric.benchmark_costs) {
    if (metric.benchmark_costs->size() != static_cast<Eigen::Index>(game.num_agents()))
      throw InvalidArgument("benchmark costs need one entry per agent");
    return *metric.benchmark_costs;
  }
  if (metric.benchmark_decision) return eval_costs(game, *metric.benchmark_decision);
  return eval_costs(game, game.feasible().lower_bounds);
}

double evaluate_fairness(const GameModel& game, const FairnessMetric& metric,
                         const Vector& x) {
  std::optional<Vector> bench;
  if (metric.kind == FairnessMetric::Kind::NBS)
    bench = resolve_benchmark_costs(game, metric);
  return fairness_value(metric, eval_costs(game, x), bench);
}

FgneResult solve_fgne(const GameModel& game, const FairnessMetric& metric,
                      int grid_density, int refine_iters,
                      const vi::SolverParams& params, unsigned threads) {
  metric.validate();
  if (grid_density < 3) throw InvalidArgument("grid_density must be >= 3");
  if (refine_iters < 0) throw InvalidArgument("refine_iters must be >= 0");

  std::optional<Vector> bench;
  if (metric.kind == FairnessMetric::Kind::NBS)
    bench = resolve_benchmark_costs(game, metric);

  const auto score = [&](const EquilibriumResult& eq, Evaluation& ev) {
    try {
      ev.f = fairness_value(metric, eval_costs(game, eq.x), bench);
    } catch (const DomainError& e) {
      ev.f = kNaN;
      ev.note = e.what();
    }
  };

  FgneResult out;
  const auto grid = simplex_grid(game.num_agents(), grid_density);
  const auto samples = gne_set_sample(game, grid, params, threads);

  std::optional<std::size_t> best;
  bool any_converged = false;
  for (std::size_t k = 0; k < samples.size(); ++k) {
    const auto& s = samples[k];
    Evaluation ev;
    ev.converged = s.converged;
    ev.note = s.failure;
    if (s.converged) {
      any_converged = true;
      score(s.result, ev);
    }
    out.search_trace.push_back(
        {FgneTraceEntry::Phase::grid, s.r, s.converged ? s.result.x : Vector{},
         ev.f, ev.converged, ev.note});
    if (std::isfinite(ev.f) && (!best || ev.f < out.search_trace[*best].f)) best = k;
  }
  if (!any_converged)
    throw AllPointsFailed("no grid point produced a converged normalized equilibrium");
  if (!best)
    throw DomainError("metric " + metric.label() +
                      " is undefined at every converged grid point");

  out.r_star = samples[*best].r;
  out.equilibrium = samples[*best].result;
  out.f_star = out.search_trace[*best].f;

  // Compass search on log-weights; the last coordinate is fixed by normalization.
  Vector log_r = out.r_star.array().log().matrix();
  const Eigen::Index dirs = std::max<Eigen::Index>(1, log_r.size() - 1);
  double step = kFgneInitialStep;
  for (int poll = 0; poll < refine_iters && step >= kFgneFinalStep; ++poll) {
    bool improved = false;
    for (Eigen::Index d = 0; d < dirs && !improved; ++d) {
      for (double sign : {1.0, -1.0}) {
        Vector cand = log_r;
        cand(d) += sign * step;
        const Vector r = normalize_weights(cand.array().exp().matrix());
        Evaluation ev;
        try {
          ev.eq = solve_normalized(game, r, params);
          ev.converged = ev.eq.converged;
          score(ev.eq, ev);
        } catch (const Error& e) {
          ev.note = e.what();
        }
        out.search_trace.push_back({FgneTraceEntry::Phase::refine, r,
                                    ev.converged ? ev.eq.x : Vector{}, ev.f,
                                    ev.converged, ev.note});
        if (std::isfinite(ev.f) && ev.f < out.f_star) {
          out.f_star = ev.f;
          out.r_star = r;
          out.equilibrium = ev.eq;
          log_r = r.array().log().matrix();
          improved = true;
          break;
        }
      }
    }
    if (!improved) step *= 0.5;
  }
  out.final_step = step;
  out.x_star = out.equilibrium.x;
  return out;
}

std::vector<ProfileRow> fairness_profile(const std::vector<GneSample>& samples,
                                         const std::vector<FairnessMetric>& metrics,
                                         const GameModel& game) {
  std::vector<std::optional<Vector>> benches;
  benches.reserve(metrics.size());
  for (const auto& m : metrics) {
    m.validate();
    std::optional<Vector> bench;
    if (m.kind == FairnessMetric::Kind::NBS) {
      try {
        bench = resolve_benchmark_costs(game, m);
      } catch (const DomainError&) {
        // Every NBS cell of this column stays empty.
      }
    }
    benches.push_back(std::move(bench));
  }

  std::vector<ProfileRow> rows;
  for (const auto& s : samples) {
    if (!s.converged) continue;
    ProfileRow row{s.r, s.result.x, eval_costs(game, s.result.x),
                   s.result.lambda_per_agent, {}};
    for (std::size_t k = 0; k < metrics.size(); ++k) {
      if (metrics[k].kind == FairnessMetric::Kind::NBS && !benches[k]) {
        row.values.emplace_back();
        continue;
      }
      try {
        row.values.emplace_back(fairness_value(metrics[k], row.costs, benches[k]));
      } catch (const DomainError&) {
        row.values.emplace_back();
      }
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace gnefair
