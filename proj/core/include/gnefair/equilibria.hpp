#pragma once

// Generalized Nash equilibria with one shared budget: best responses and GNE
// verification, variational and normalized equilibria, multiplier recovery,
// and sampling of the GNE set through the normalized-equilibrium family.

#include <optional>
#include <string>
#include <vector>

#include "gnefair/model.hpp"
#include "gnefair/vi.hpp"

namespace gnefair {

/// Budget considered active when |w'x - budget| <= kActiveTolerance * max(1, budget).
inline constexpr double kActiveTolerance = 1e-8;
/// Decisions within this distance of their lower bound count as at the bound.
inline constexpr double kBoundTolerance = 1e-9;
/// Threshold for strict complementarity of the budget multipliers.
inline constexpr double kStrictComplementarity = 1e-8;

struct EquilibriumResult {
  Vector x;
  /// Per-agent budget multipliers lambda_i.
  Vector lambda_per_agent;
  /// Common multiplier of the (weighted) variational system.
  std::optional<double> uniform_lambda;
  std::optional<Vector> r_weights;
  double kkt_residual = 0.0;
  bool is_vgne = false;
  bool converged = false;
  bool budget_active = false;
  int iterations = 0;
  double natural_residual = 0.0;
};

/// Argmin of agent i's cost over [lb_i, (budget - sum_{j != i} w_j x_j) / w_i]
/// with the other decisions taken from `x`. Closed form for quadratic costs,
/// golden-section search otherwise. Throws InfeasibleResidual.
double best_response(const GameModel& game, std::size_t i, const Vector& x);

struct GneCheck {
  bool verdict = false;
  double max_improvement = 0.0;
  Vector per_agent_gaps;
};

/// J_i(x) - J_i(best response, x_-i) for every agent; verdict iff max gap <= tol.
GneCheck is_gne(const GameModel& game, const Vector& x, double tol);

struct Multipliers {
  Vector lambda_per_agent;
  Vector mu;
};

/// Per-agent multipliers from the GNE stationarity conditions at x. Agents at
/// their lower bound get the smallest nonnegative pair. Throws NotStationary
/// when no nonnegative pair brings the residual below 1e-6.
Multipliers recover_multipliers(const GameModel& game, const Vector& x);

/// Variational GNE: VI with the pseudo-gradient over the shared set.
EquilibriumResult solve_vgne(const GameModel& game,
                             const vi::SolverParams& params = {});

/// Normalized equilibrium for weights r (rescaled to sum to the agent count).
/// Throws InvalidWeights, NoConvergence.
EquilibriumResult solve_normalized(const GameModel& game, const Vector& r,
                                   const vi::SolverParams& params = {});

/// r scaled so that sum_i r_i equals the agent count.
Vector normalize_weights(const Vector& r);

/// Weight vectors on the simplex sum r = M with every r_i >= 0.05 * M.
/// M == 2: `density` points with r_1 from 0.1 to 1.9. M > 2: `density` points
/// per simplex edge.
std::vector<Vector> simplex_grid(std::size_t num_agents, int density);
int default_grid_density(std::size_t num_agents);

struct GneSample {
  Vector r;
  EquilibriumResult result;
  bool converged = false;
  /// lambda_i > 1e-8 for every agent whenever the budget is active.
  bool strict_complementarity = false;
  /// Outcome of is_gne at tol 1e-6.
  bool verified_gne = false;
  double max_gap = 0.0;
  std::string failure;
};

/// One normalized equilibrium per grid point, in grid order. Failures are
/// recorded on the sample, never dropped. `threads` == 0 uses the hardware
/// concurrency.
std::vector<GneSample> gne_set_sample(const GameModel& game,
                                      const std::vector<Vector>& grid,
                                      const vi::SolverParams& params = {},
                                      unsigned threads = 0);

}  // namespace gnefair
