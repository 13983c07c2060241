#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include <json.hpp>

#include "gnefair/csv.hpp"
#include "gnefair/experiment.hpp"

using namespace gnefair;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("gnefair_test_" + name);
  fs::remove_all(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

experiment::RunResult run_into(experiment::Command cmd, config::ExperimentConfig cfg,
                               const fs::path& dir, std::string* diagnostics = nullptr) {
  cfg.output.directory = dir.string();
  std::ostringstream err;
  auto res = experiment::run(cmd, cfg, err);
  if (diagnostics) *diagnostics = err.str();
  return res;
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream is(text);
  for (std::string l; std::getline(is, l);) out.push_back(l);
  return out;
}

}  // namespace

TEST_CASE("numbers use twelve significant digits") {
  CHECK(csv::format_number(1.0 / 3.0) == "0.333333333333");
  CHECK(csv::format_number(0.5) == "0.5");
  CHECK(csv::format_number(1e-20) == "1e-20");
  CHECK(csv::format_number(std::nan("")) == "nan");
  csv::Table t({"a", "b"});
  t.add_row({"1", "2"});
  CHECK(t.str() == "a,b\n1,2\n");
  CHECK_THROWS(t.add_row({"1"}));
}

TEST_CASE("vgne writes equilibrium and manifest") {
  const auto dir = scratch("vgne");
  auto cfg = experiment::default_config();
  const auto res = run_into(experiment::Command::vgne, cfg, dir);
  REQUIRE(res.exit_code == experiment::kSuccess);
  const auto csv_lines = lines(slurp(dir / "equilibrium.csv"));
  REQUIRE(csv_lines.size() == 4);
  CHECK(csv_lines[0] == "agent,u,cost,lambda,kkt_residual");
  CHECK(csv_lines[1].rfind("1,0.333333333333,", 0) == 0);
  const auto manifest = nlohmann::json::parse(slurp(dir / "manifest.json"));
  CHECK(manifest["command"] == "vgne");
  cfg.output.directory = dir.string();
  CHECK(manifest["config_hash"] == config::config_hash(cfg));
  CHECK(manifest["solves"][0]["converged"] == true);
  CHECK(manifest["files"].back() == "manifest.json");
  CHECK(manifest.contains("schema_version"));
}

TEST_CASE("every command is byte-reproducible") {
  auto cfg = experiment::default_config();
  cfg.sweep.grid_density = 6;
  cfg.sweep.refine_iters = 20;
  cfg.output.emit_plots = true;
  for (auto cmd : {experiment::Command::vgne, experiment::Command::fgne,
                   experiment::Command::sweep, experiment::Command::audit,
                   experiment::Command::reproduce_fig3, experiment::Command::reproduce_fig4}) {
    CAPTURE(experiment::to_string(cmd));
    const auto a = scratch("repro_a"), b = scratch("repro_b");
    const auto ra = run_into(cmd, cfg, a), rb = run_into(cmd, cfg, b);
    REQUIRE(ra.exit_code == 0);
    REQUIRE(rb.exit_code == 0);
    REQUIRE(ra.files.size() == rb.files.size());
    for (const auto& f : ra.files) {
      if (f.extension() != ".csv") continue;
      CHECK(slurp(f) == slurp(b / f.filename()));
    }
  }
}

TEST_CASE("sweep and audit tables") {
  auto cfg = experiment::default_config();
  cfg.sweep.grid_density = 5;
  const auto dir = scratch("sweep");
  REQUIRE(run_into(experiment::Command::sweep, cfg, dir).exit_code == 0);
  const auto rows = lines(slurp(dir / "gne_set.csv"));
  CHECK(rows.size() == 1 + 15);
  CHECK(rows[0] ==
        "r_1,r_2,r_3,u_1,u_2,u_3,lambda_1,lambda_2,lambda_3,converged,strict_complementarity,"
        "MM,SW,NBS,JI");

  const auto adir = scratch("audit");
  REQUIRE(run_into(experiment::Command::audit, cfg, adir).exit_code == 0);
  const auto audit = lines(slurp(adir / "audit.csv"));
  REQUIRE(audit.size() == 5);
  CHECK(audit[1].rfind("baseline,", 0) == 0);
  // CFC and CUC leave the v-GNE in place; the CNC ramp moves it.
  auto deviation = [](const std::string& row) { return std::stod(row.substr(row.rfind(',') + 1)); };
  CHECK(deviation(audit[2]) <= 1e-9);
  CHECK(deviation(audit[3]) <= 1e-9);
  CHECK(deviation(audit[4]) > 1e-3);
}

TEST_CASE("figure tables") {
  auto cfg = experiment::default_config();
  cfg.output.emit_plots = true;
  const auto dir = scratch("fig");
  REQUIRE(run_into(experiment::Command::reproduce_fig3, cfg, dir).exit_code == 0);
  CHECK(lines(slurp(dir / "fig3.csv")).size() == 1 + 12);
  CHECK(fs::exists(dir / "fig3_allocation.svg"));
  REQUIRE(run_into(experiment::Command::reproduce_fig4, cfg, dir).exit_code == 0);
  const auto rows = lines(slurp(dir / "fig4.csv"));
  CHECK(rows.size() == 1 + 10);
  CHECK(rows[0] == "a_1,method,u_1,u_2,cost_1,cost_2");
  CHECK(slurp(dir / "fig4_allocation.svg").rfind("<svg", 0) != std::string::npos);
}

TEST_CASE("exit codes") {
  auto cfg = experiment::default_config();
  cfg.scenario = "initial_charge";
  cfg.solver.method = vi::Method::extragradient;
  cfg.solver.max_iters = 2;
  std::string err;
  CHECK(run_into(experiment::Command::vgne, cfg, scratch("nc"), &err).exit_code ==
        experiment::kNoConvergence);
  CHECK(err.find("error") != std::string::npos);
  CHECK(run_into(experiment::Command::fgne, cfg, scratch("nc2")).exit_code ==
        experiment::kNoConvergence);

  auto bad = experiment::default_config();
  bad.scenario = "unknown";
  CHECK(run_into(experiment::Command::vgne, bad, scratch("bad")).exit_code ==
        experiment::kInvalidConfig);

  auto domain = experiment::default_config();
  domain.metric = FairnessMetric::nash_bargaining();
  domain.metric.benchmark_costs = Vector::Zero(3);
  domain.sweep.grid_density = 4;
  CHECK(run_into(experiment::Command::fgne, domain, scratch("domain")).exit_code ==
        experiment::kMetricDomain);

  // A regular file where the output directory should go.
  const auto blocker = scratch("blocker");
  std::ofstream(blocker.string()) << "x";
  CHECK(run_into(experiment::Command::vgne, experiment::default_config(), blocker / "sub")
            .exit_code == experiment::kInvalidConfig);
  fs::remove(blocker);
}

TEST_CASE("nothing but the manifest-listed files is written on failure") {
  auto cfg = experiment::default_config();
  cfg.scenario = "initial_charge";
  cfg.solver.method = vi::Method::extragradient;
  cfg.solver.max_iters = 2;
  const auto dir = scratch("partial");
  run_into(experiment::Command::vgne, cfg, dir);
  CHECK(fs::is_empty(dir));
}

#ifdef GNEFAIR_CLI_PATH
namespace {

int shell(const std::string& args) {
  const std::string cmd = std::string(GNEFAIR_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("command line tool") {
  const auto dir = scratch("cli");
  fs::create_directories(dir);
  {
    std::ofstream(dir / "ok.json") << R"({"scenario": "initial_charge", "output": {"directory": ")"
                                   << (dir / "out").string() << "\"}}";
    std::ofstream(dir / "bad.json") << R"({"scenario": "initial_charge", "solver": {"tol": -1}})";
    std::ofstream(dir / "broken.json") << "{";
  }
  CHECK(shell("vgne --config " + (dir / "ok.json").string()) == 0);
  CHECK(fs::exists(dir / "out" / "equilibrium.csv"));
  CHECK(shell("vgne --config " + (dir / "ok.json").string() + " --out " +
              (dir / "other").string() + " --seed 7") == 0);
  const auto manifest = nlohmann::json::parse(slurp(dir / "other" / "manifest.json"));
  CHECK(manifest["seed"] == 7);
  CHECK(shell("vgne --config " + (dir / "bad.json").string()) == 3);
  CHECK(shell("vgne --config " + (dir / "broken.json").string()) == 3);
  CHECK(shell("vgne --config " + (dir / "missing.json").string()) == 3);
  CHECK(shell("vgne") == 3);
  CHECK(shell("frobnicate") == 3);
  CHECK(shell("reproduce-fig3 --out " + (dir / "fig3").string() + " --plots") == 0);
  CHECK(fs::exists(dir / "fig3" / "fig3_cost.svg"));
}
#endif
