#pragma once

// Game instances: agents with scalar charging decisions, per-agent costs built
// from a tracking term, linear state dynamics and an affine congestion price,
// plus one shared separable budget constraint.

#include <Eigen/Dense>

#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace gnefair {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Smallest state value at which the logarithmic cost may be evaluated.
inline constexpr double kLogDomainFloor = 1e-9;

/// z = A * z_init + B * u
struct ChargeDynamics {
  double A = 1.0;
  double B = 1.0;
  double z_init = 0.0;

  double state(double u) const { return A * z_init + B * u; }
};

/// Price u_i * (rho1 * sum_j u_j + rho0).
struct CongestionPrice {
  double rho0 = 0.0;
  double rho1 = 0.0;
};

/// q * (z_ref - z)^2
struct EvQuadratic {
  double q = 1.0;
  double z_ref = 1.0;
};

/// log(C / z) + weight * (target - z)^2, defined for z >= kLogDomainFloor.
struct LogPlusQuadratic {
  double C = 1.0;
  double weight = 0.1;
  double target = 1.0;
};

/// exp(target - z) - 1
struct ExponentialGap {
  double target = 1.0;
};

/// (target - z)^2
struct PureQuadraticGap {
  double target = 1.0;
};

using TrackingTerm =
    std::variant<EvQuadratic, LogPlusQuadratic, ExponentialGap, PureQuadraticGap>;

/// Agent cost J_i(u_i, u_-i) = tracking(z_i(u_i)) + u_i * (rho1 * sum_j u_j + rho0).
///
/// The cost depends on the other agents only through the aggregate sum_j u_j,
/// so evaluation takes the own decision and the aggregate.
struct CostFunction {
  TrackingTerm tracking = EvQuadratic{};
  ChargeDynamics dynamics{};
  CongestionPrice congestion{};

  double value(double own, double aggregate) const;
  /// d J_i / d u_i with the aggregate moving together with own.
  double partial(double own, double aggregate) const;

  /// True when J_i is quadratic in u (EvQuadratic or PureQuadraticGap).
  bool is_quadratic() const;
  /// Lowest own decision keeping the state inside the cost's domain.
  double domain_lower_bound() const;
  /// Throws InvalidArgument when parameters are out of range.
  void validate() const;
  std::string kind_name() const;
};

struct AgentSpec {
  int dim = 1;
  CostFunction cost{};
  /// a_i in a_i * J_i + b_i
  double scale = 1.0;
  /// b_i in a_i * J_i + b_i
  double offset = 0.0;
};

/// {u : u >= lower_bounds, budget_weights' u <= budget}
struct FeasibleSet {
  Vector lower_bounds;
  double budget = 1.0;
  Vector budget_weights;

  static FeasibleSet capped_orthant(Eigen::Index n, double budget);

  Eigen::Index size() const { return lower_bounds.size(); }
  /// Throws InvalidArgument on malformed data, InfeasibleSet if empty.
  void validate() const;
  bool contains(const Vector& x, double tol = 1e-10) const;
};

/// Exact pseudo-gradient F(x) = matrix * x + offset.
struct AffineForm {
  Matrix matrix;
  Vector offset;
};

/// Immutable game instance. The affine form is derived at construction when
/// every cost is quadratic, and already includes the agents' scales.
class GameModel {
 public:
  GameModel(std::vector<AgentSpec> agents, FeasibleSet feasible);

  std::size_t num_agents() const { return agents_.size(); }
  Eigen::Index dim() const { return feasible_.size(); }
  const std::vector<AgentSpec>& agents() const { return agents_; }
  const AgentSpec& agent(std::size_t i) const { return agents_.at(i); }
  const FeasibleSet& feasible() const { return feasible_; }
  const std::optional<AffineForm>& affine_form() const { return affine_; }

 private:
  std::vector<AgentSpec> agents_;
  FeasibleSet feasible_;
  std::optional<AffineForm> affine_;
};

/// a_i * J_i(x) + b_i. Throws DomainError outside a cost's domain.
double eval_cost(const GameModel& game, std::size_t i, const Vector& x);
/// All agents' transformed costs at x.
Vector eval_costs(const GameModel& game, const Vector& x);

/// vcol(a_i * dJ_i/dx_i). Offsets never enter.
Vector pseudo_gradient(const GameModel& game, const Vector& x);

/// Block i scaled by r_i. Throws InvalidWeights unless every r_i > 0.
Vector weighted_pseudo_gradient(const GameModel& game, const Vector& x,
                                const Vector& r);

/// Positive affine cost transformations a_i * J_i + b_i.
struct Transformation {
  enum class Kind { CNC, CUC, CFC };

  Kind kind = Kind::CFC;
  /// One entry for CUC/CFC, one per agent for CNC.
  std::vector<double> a{1.0};
  /// One entry for CFC, one per agent for CNC/CUC.
  std::vector<double> b{0.0};

  static Transformation cnc(std::vector<double> a, std::vector<double> b);
  static Transformation cuc(double a, std::vector<double> b);
  static Transformation cfc(double a, double b);

  /// Per-agent multiplier; throws InvalidArgument on arity mismatch.
  double scale_for(std::size_t agent, std::size_t num_agents) const;
  double offset_for(std::size_t agent, std::size_t num_agents) const;
  void validate(std::size_t num_agents) const;
};

std::string to_string(Transformation::Kind kind);
Transformation::Kind transformation_kind_from_string(const std::string& name);

/// New game with a_i <- t.a_i * a_i and b_i <- t.a_i * b_i + t.b_i.
GameModel apply_transformation(const GameModel& game, const Transformation& t);

struct MonotonicityReport {
  double min_eigenvalue = 0.0;
  bool strongly_monotone = false;
};

/// Smallest eigenvalue of the symmetric part of the affine pseudo-gradient
/// (optionally of diag(r) * M_F). Throws NotAffine for non-quadratic games.
MonotonicityReport monotonicity_certificate(const GameModel& game);
MonotonicityReport monotonicity_certificate(const GameModel& game,
                                            const Vector& r);

}  // namespace gnefair
