#include "gnefair/model.hpp"

#include <cmath>
#include <sstream>
#include <utility>

#include "gnefair/errors.hpp"

namespace gnefair {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

// Quadratic tracking terms written as weight * (target - z)^2.
struct QuadraticTracking {
  double weight;
  double target;
};

std::optional<QuadraticTracking> as_quadratic(const TrackingTerm& t) {
  return std::visit(
      Overloaded{
          [](const EvQuadratic& c) -> std::optional<QuadraticTracking> {
            return QuadraticTracking{c.q, c.z_ref};
          },
          [](const PureQuadraticGap& c) -> std::optional<QuadraticTracking> {
            return QuadraticTracking{1.0, c.target};
          },
          [](const auto&) -> std::optional<QuadraticTracking> {
            return std::nullopt;
          }},
      t);
}

void require_dim(const GameModel& game, const Vector& x) {
  if (x.size() != game.dim()) {
    std::ostringstream os;
    os << "decision has dimension " << x.size() << ", game expects "
       << game.dim();
    throw InvalidArgument(os.str());
  }
}

std::optional<AffineForm> derive_affine_form(
    const std::vector<AgentSpec>& agents) {
  const auto n = static_cast<Eigen::Index>(agents.size());
  AffineForm form{Matrix::Zero(n, n), Vector::Zero(n)};
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& agent = agents[static_cast<std::size_t>(i)];
    const auto quad = as_quadratic(agent.cost.tracking);
    if (!quad) return std::nullopt;
    const auto& dyn = agent.cost.dynamics;
    const auto& price = agent.cost.congestion;
    const double delta_z = quad->target - dyn.A * dyn.z_init;
    form.matrix.row(i).setConstant(agent.scale * price.rho1);
    form.matrix(i, i) =
        agent.scale * 2.0 * (quad->weight * dyn.B * dyn.B + price.rho1);
    form.offset(i) =
        agent.scale * (-2.0 * quad->weight * dyn.B * delta_z + price.rho0);
  }
  return form;
}

}  // namespace

double CostFunction::value(double own, double aggregate) const {
  const double z = dynamics.state(own);
  const double tracking_value = std::visit(
      Overloaded{
          [z](const EvQuadratic& c) { return c.q * (c.z_ref - z) * (c.z_ref - z); },
          [z](const PureQuadraticGap& c) { return (c.target - z) * (c.target - z); },
          [z](const ExponentialGap& c) { return std::exp(c.target - z) - 1.0; },
          [z](const LogPlusQuadratic& c) {
            if (!(z >= kLogDomainFloor)) {
              std::ostringstream os;
              os << "logarithmic cost evaluated at state " << z
                 << " below the domain floor " << kLogDomainFloor;
              throw DomainError(os.str());
            }
            return std::log(c.C / z) + c.weight * (c.target - z) * (c.target - z);
          }},
      tracking);
  return tracking_value + own * (congestion.rho1 * aggregate + congestion.rho0);
}

double CostFunction::partial(double own, double aggregate) const {
  const double z = dynamics.state(own);
  const double d_tracking_dz = std::visit(
      Overloaded{
          [z](const EvQuadratic& c) { return -2.0 * c.q * (c.z_ref - z); },
          [z](const PureQuadraticGap& c) { return -2.0 * (c.target - z); },
          [z](const ExponentialGap& c) { return -std::exp(c.target - z); },
          [z](const LogPlusQuadratic& c) {
            if (!(z >= kLogDomainFloor)) {
              std::ostringstream os;
              os << "logarithmic cost differentiated at state " << z
                 << " below the domain floor " << kLogDomainFloor;
              throw DomainError(os.str());
            }
            return -1.0 / z - 2.0 * c.weight * (c.target - z);
          }},
      tracking);
  return d_tracking_dz * dynamics.B + congestion.rho1 * (aggregate + own) +
         congestion.rho0;
}

bool CostFunction::is_quadratic() const {
  return as_quadratic(tracking).has_value();
}

double CostFunction::domain_lower_bound() const {
  if (!std::holds_alternative<LogPlusQuadratic>(tracking)) return 0.0;
  const double base = dynamics.A * dynamics.z_init;
  return std::max(0.0, (kLogDomainFloor - base) / dynamics.B);
}

void CostFunction::validate() const {
  if (!(dynamics.A >= 0.0 && dynamics.A <= 1.0))
    throw InvalidArgument("dynamics.A must lie in [0, 1]");
  if (!(dynamics.B > 0.0 && dynamics.B <= 1.0))
    throw InvalidArgument("dynamics.B must lie in (0, 1]");
  if (!std::isfinite(dynamics.z_init))
    throw InvalidArgument("dynamics.z_init must be finite");
  if (!(congestion.rho0 >= 0.0)) throw InvalidArgument("rho0 must be >= 0");
  if (!(congestion.rho1 >= 0.0)) throw InvalidArgument("rho1 must be >= 0");
  std::visit(Overloaded{
                 [](const EvQuadratic& c) {
                   if (!(c.q > 0.0)) throw InvalidArgument("q must be > 0");
                   if (!std::isfinite(c.z_ref))
                     throw InvalidArgument("z_ref must be finite");
                 },
                 [](const PureQuadraticGap& c) {
                   if (!std::isfinite(c.target))
                     throw InvalidArgument("target must be finite");
                 },
                 [](const ExponentialGap& c) {
                   if (!std::isfinite(c.target))
                     throw InvalidArgument("target must be finite");
                 },
                 [](const LogPlusQuadratic& c) {
                   if (!(c.C > 0.0)) throw InvalidArgument("C must be > 0");
                   if (!(c.weight >= 0.0))
                     throw InvalidArgument("weight must be >= 0");
                   if (!std::isfinite(c.target))
                     throw InvalidArgument("target must be finite");
                 }},
             tracking);
}

std::string CostFunction::kind_name() const {
  return std::visit(
      Overloaded{[](const EvQuadratic&) { return std::string("EvQuadratic"); },
                 [](const LogPlusQuadratic&) { return std::string("LogPlusQuadratic"); },
                 [](const ExponentialGap&) { return std::string("ExponentialGap"); },
                 [](const PureQuadraticGap&) { return std::string("PureQuadraticGap"); }},
      tracking);
}

FeasibleSet FeasibleSet::capped_orthant(Eigen::Index n, double budget) {
  return FeasibleSet{Vector::Zero(n), budget, Vector::Ones(n)};
}

void FeasibleSet::validate() const {
  if (lower_bounds.size() == 0) throw InvalidArgument("feasible set is empty-dimensional");
  if (budget_weights.size() != lower_bounds.size())
    throw InvalidArgument("budget_weights and lower_bounds differ in length");
  if (!(budget > 0.0) || !std::isfinite(budget))
    throw InvalidArgument("budget must be positive and finite");
  for (Eigen::Index i = 0; i < lower_bounds.size(); ++i) {
    if (!(lower_bounds(i) >= 0.0) || !std::isfinite(lower_bounds(i)))
      throw InvalidArgument("lower bounds must be finite and nonnegative");
    if (!(budget_weights(i) > 0.0) || !std::isfinite(budget_weights(i)))
      throw InvalidArgument("budget weights must be positive and finite");
  }
  if (budget_weights.dot(lower_bounds) > budget) {
    std::ostringstream os;
    os << "lower bounds consume " << budget_weights.dot(lower_bounds)
       << " of a budget of " << budget;
    throw InfeasibleSet(os.str());
  }
}

bool FeasibleSet::contains(const Vector& x, double tol) const {
  if (x.size() != size()) return false;
  if (((x - lower_bounds).array() < -tol).any()) return false;
  return budget_weights.dot(x) <= budget + tol;
}

GameModel::GameModel(std::vector<AgentSpec> agents, FeasibleSet feasible)
    : agents_(std::move(agents)), feasible_(std::move(feasible)) {
  if (agents_.empty()) throw InvalidArgument("game needs at least one agent");
  feasible_.validate();
  if (static_cast<std::size_t>(feasible_.size()) != agents_.size())
    throw InvalidArgument("feasible set dimension must equal the agent count");
  for (std::size_t i = 0; i < agents_.size(); ++i) {
    const auto& a = agents_[i];
    if (a.dim != 1) {
      std::ostringstream os;
      os << "agent " << i << " has dim " << a.dim
         << "; only scalar decisions are supported";
      throw InvalidArgument(os.str());
    }
    if (!(a.scale > 0.0) || !std::isfinite(a.scale))
      throw InvalidArgument("agent scale must be positive");
    if (!std::isfinite(a.offset)) throw InvalidArgument("agent offset must be finite");
    a.cost.validate();
    const double floor = a.cost.domain_lower_bound();
    if (feasible_.lower_bounds(static_cast<Eigen::Index>(i)) < floor) {
      std::ostringstream os;
      os << "agent " << i << " lower bound is below its cost domain floor "
         << floor;
      throw InvalidArgument(os.str());
    }
  }
  affine_ = derive_affine_form(agents_);
}

double eval_cost(const GameModel& game, std::size_t i, const Vector& x) {
  require_dim(game, x);
  const auto& agent = game.agent(i);
  const double own = x(static_cast<Eigen::Index>(i));
  return agent.scale * agent.cost.value(own, x.sum()) + agent.offset;
}

Vector eval_costs(const GameModel& game, const Vector& x) {
  require_dim(game, x);
  Vector costs(static_cast<Eigen::Index>(game.num_agents()));
  for (std::size_t i = 0; i < game.num_agents(); ++i)
    costs(static_cast<Eigen::Index>(i)) = eval_cost(game, i, x);
  return costs;
}

Vector pseudo_gradient(const GameModel& game, const Vector& x) {
  require_dim(game, x);
  const double aggregate = x.sum();
  Vector grad(x.size());
  for (std::size_t i = 0; i < game.num_agents(); ++i) {
    const auto k = static_cast<Eigen::Index>(i);
    const auto& agent = game.agent(i);
    grad(k) = agent.scale * agent.cost.partial(x(k), aggregate);
  }
  return grad;
}

Vector weighted_pseudo_gradient(const GameModel& game, const Vector& x,
                                const Vector& r) {
  if (r.size() != static_cast<Eigen::Index>(game.num_agents()))
    throw InvalidWeights("weight vector length must equal the agent count");
  if (!(r.array() > 0.0).all() || !r.allFinite())
    throw InvalidWeights("all weights must be strictly positive and finite");
  return r.cwiseProduct(pseudo_gradient(game, x));
}

Transformation Transformation::cnc(std::vector<double> a, std::vector<double> b) {
  return Transformation{Kind::CNC, std::move(a), std::move(b)};
}

Transformation Transformation::cuc(double a, std::vector<double> b) {
  return Transformation{Kind::CUC, {a}, std::move(b)};
}

Transformation Transformation::cfc(double a, double b) {
  return Transformation{Kind::CFC, {a}, {b}};
}

void Transformation::validate(std::size_t num_agents) const {
  const std::size_t want_a = kind == Kind::CNC ? num_agents : 1;
  const std::size_t want_b = kind == Kind::CFC ? 1 : num_agents;
  if (a.size() != want_a || b.size() != want_b) {
    std::ostringstream os;
    os << to_string(kind) << " transformation expects " << want_a
       << " scale(s) and " << want_b << " offset(s), got " << a.size()
       << " and " << b.size();
    throw InvalidArgument(os.str());
  }
  for (double v : a)
    if (!(v > 0.0) || !std::isfinite(v))
      throw InvalidArgument("transformation multipliers must be strictly positive");
  for (double v : b)
    if (!std::isfinite(v)) throw InvalidArgument("transformation offsets must be finite");
}

double Transformation::scale_for(std::size_t agent, std::size_t num_agents) const {
  validate(num_agents);
  return kind == Kind::CNC ? a[agent] : a.front();
}

double Transformation::offset_for(std::size_t agent, std::size_t num_agents) const {
  validate(num_agents);
  return kind == Kind::CFC ? b.front() : b[agent];
}

std::string to_string(Transformation::Kind kind) {
  switch (kind) {
    case Transformation::Kind::CNC: return "CNC";
    case Transformation::Kind::CUC: return "CUC";
    case Transformation::Kind::CFC: return "CFC";
  }
  return "?";
}

Transformation::Kind transformation_kind_from_string(const std::string& name) {
  if (name == "CNC") return Transformation::Kind::CNC;
  if (name == "CUC") return Transformation::Kind::CUC;
  if (name == "CFC") return Transformation::Kind::CFC;
  throw InvalidArgument("unknown transformation kind '" + name + "'");
}

GameModel apply_transformation(const GameModel& game, const Transformation& t) {
  const std::size_t m = game.num_agents();
  t.validate(m);
  std::vector<AgentSpec> agents = game.agents();
  for (std::size_t i = 0; i < m; ++i) {
    const double a = t.scale_for(i, m);
    agents[i].scale *= a;
    agents[i].offset = a * agents[i].offset + t.offset_for(i, m);
  }
  return GameModel(std::move(agents), game.feasible());
}

MonotonicityReport monotonicity_certificate(const GameModel& game) {
  return monotonicity_certificate(
      game, Vector::Ones(static_cast<Eigen::Index>(game.num_agents())));
}

MonotonicityReport monotonicity_certificate(const GameModel& game,
                                            const Vector& r) {
  const auto& affine = game.affine_form();
  if (!affine) throw NotAffine("game has non-quadratic costs; no affine pseudo-gradient");
  if (r.size() != affine->matrix.rows() || !(r.array() > 0.0).all())
    throw InvalidWeights("weights must be positive, one per agent");
  const Matrix weighted = r.asDiagonal() * affine->matrix;
  const Matrix sym = 0.5 * (weighted + weighted.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> eig(sym, Eigen::EigenvaluesOnly);
  const double lmin = eig.eigenvalues().minCoeff();
  return {lmin, lmin > 0.0};
}

}  // namespace gnefair
