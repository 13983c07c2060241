#pragma once

// Fairness metrics over agents' costs and fairness-optimal equilibrium
// selection over the normalized-equilibrium family.
//
// Every metric is written as a function to minimize:
//   MM   max_i J_i
//   SW   sum_i J_i
//   NBS  -prod_i (J_i(benchmark) - J_i)
//   AI   sum_i J_i^(1 - alpha) / (1 - alpha),  alpha > 0, alpha != 1
//   JI   -(sum_i J_i)^2 / (M * sum_i J_i^2)   (negated Jain's index)

#include <optional>
#include <string>
#include <vector>

#include "gnefair/equilibria.hpp"
#include "gnefair/model.hpp"
#include "gnefair/vi.hpp"

namespace gnefair {

struct FairnessMetric {
  enum class Kind { MM, SW, NBS, AI, JI };

  Kind kind = Kind::SW;
  /// Only used by AI.
  double alpha = 0.5;
  /// NBS benchmark as a joint decision; its costs follow any transformation
  /// applied to the game.
  std::optional<Vector> benchmark_decision;
  /// NBS benchmark given directly as costs. Takes precedence over the decision.
  std::optional<Vector> benchmark_costs;

  static FairnessMetric maximin() { return of(Kind::MM); }
  static FairnessMetric social_welfare() { return of(Kind::SW); }
  static FairnessMetric nash_bargaining() { return of(Kind::NBS); }
  static FairnessMetric atkinson(double alpha) { return of(Kind::AI, alpha); }
  static FairnessMetric jain() { return of(Kind::JI); }
  static FairnessMetric of(Kind kind, double alpha = 0.5) {
    FairnessMetric m;
    m.kind = kind;
    m.alpha = alpha;
    return m;
  }

  /// "MM", "SW", "NBS", "JI" or "AI(alpha)".
  std::string label() const;
  /// Throws InvalidArgument for alpha <= 0 or alpha == 1.
  void validate() const;
};

std::string to_string(FairnessMetric::Kind kind);
FairnessMetric::Kind metric_kind_from_string(const std::string& name);

/// Throws DomainError (AI with nonpositive cost, NBS without strict
/// improvement over the benchmark) and MissingBenchmark (NBS without one).
double fairness_value(const FairnessMetric& metric, const Vector& costs,
                      const std::optional<Vector>& benchmark_costs = std::nullopt);

/// NBS benchmark costs: explicit costs, else costs at the benchmark decision,
/// else costs at the lower bounds (nobody charges).
Vector resolve_benchmark_costs(const GameModel& game, const FairnessMetric& metric);

/// fairness_value of the game's costs at x.
double evaluate_fairness(const GameModel& game, const FairnessMetric& metric,
                         const Vector& x);

struct FgneTraceEntry {
  enum class Phase { grid, refine };

  Phase phase = Phase::grid;
  Vector r;
  Vector x;
  /// NaN when the solve failed or the metric is undefined there.
  double f = 0.0;
  bool converged = false;
  std::string note;
};

struct FgneResult {
  Vector r_star;
  Vector x_star;
  double f_star = 0.0;
  EquilibriumResult equilibrium;
  double final_step = 0.0;
  std::vector<FgneTraceEntry> search_trace;
};

inline constexpr double kFgneInitialStep = 0.25;
inline constexpr double kFgneFinalStep = 1e-6;

/// Grid search over simplex_grid(M, grid_density) followed by a compass search
/// in log-weight space with step halving, up to refine_iters polls or until
/// the step drops below kFgneFinalStep. Throws AllPointsFailed when no grid
/// point converges, DomainError when no converged point is inside the
/// metric's domain.
FgneResult solve_fgne(const GameModel& game, const FairnessMetric& metric,
                      int grid_density, int refine_iters,
                      const vi::SolverParams& params = {}, unsigned threads = 0);

struct ProfileRow {
  Vector r;
  Vector x;
  Vector costs;
  Vector lambdas;
  /// One cell per metric; empty when the metric is undefined at x.
  std::vector<std::optional<double>> values;
};

/// One row per converged sample.
std::vector<ProfileRow> fairness_profile(const std::vector<GneSample>& samples,
                                         const std::vector<FairnessMetric>& metrics,
                                         const GameModel& game);

}  // namespace gnefair
