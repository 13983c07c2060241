#pragma once

// Monotone variational inequalities over {u >= lb, w'u <= budget}.

#include <cstdint>
#include <functional>

#include "gnefair/model.hpp"

namespace gnefair::vi {

using Operator = std::function<Vector(const Vector&)>;

/// Which inner solver the equilibrium routines use.
enum class Method {
  /// Active-set oracle for affine games of dimension <= kAutoActiveSetLimit,
  /// extragradient otherwise.
  automatic,
  extragradient,
  active_set,
};

inline constexpr Eigen::Index kAutoActiveSetLimit = 12;
inline constexpr Eigen::Index kActiveSetLimit = 20;

struct SolverParams {
  int max_iters = 100000;
  double tol = 1e-10;
  double initial_step = 1.0;
  double step_backtrack = 0.5;
  /// 0 starts from the lower bounds; any other value draws a random
  /// feasible starting point from this seed.
  std::uint64_t seed = 0;
  Method method = Method::automatic;

  void validate() const;
};

std::string to_string(Method m);
Method method_from_string(const std::string& name);

struct StepSummary {
  double min = 0.0;
  double max = 0.0;
  double final = 0.0;
};

struct ViSolution {
  Vector x;
  double natural_residual = 0.0;
  int iterations = 0;
  bool converged = false;
  StepSummary steps{};
};

/// Euclidean projection onto the feasible set, exact via sorted breakpoints.
/// Throws InfeasibleSet when w'lb > budget.
Vector project_feasible(const Vector& p, const FeasibleSet& set);

/// ||x - P(x - F(x))||_2
double natural_residual(const Vector& x, const Vector& fx, const FeasibleSet& set);

/// Extragradient with backtracking. Throws NoConvergence after max_iters.
ViSolution solve_vi(const Operator& F, const FeasibleSet& set,
                    const SolverParams& params = {});

/// Observer variant used for determinism checks; called with every accepted iterate.
ViSolution solve_vi(const Operator& F, const FeasibleSet& set,
                    const SolverParams& params,
                    const std::function<void(const Vector&)>& on_iterate);

struct ActiveSetSolution {
  ViSolution solution;
  /// Multiplier of the budget constraint.
  double lambda = 0.0;
  /// Multipliers of the lower bounds.
  Vector mu;
  /// Bit i set: lower bound i active. Bit n set: budget active.
  std::uint64_t pattern = 0;
};

/// Exact solve of the affine VI M x + m by active-set enumeration, first valid
/// pattern in lexicographic order. Throws DimensionTooLarge for n > 20 and
/// NoValidPattern when no pattern satisfies the KKT conditions.
ActiveSetSolution solve_affine_vi_active_set(const Matrix& M, const Vector& m,
                                             const FeasibleSet& set);

/// Worst violation of stationarity, complementarity, sign and feasibility
/// conditions of F + lambda * w - mu = 0.
double kkt_residual(const Vector& f_value, const Vector& x, double lambda,
                    const Vector& mu, const FeasibleSet& set);

}  // namespace gnefair::vi
