#include "gnefair/vi.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>
#include <vector>

#include "gnefair/errors.hpp"

namespace gnefair::vi {

namespace {

// Acceptance ratio for the extragradient step: tau * ||F(x) - F(y)|| <= nu * ||x - y||.
constexpr double kStepAcceptance = 0.9;
constexpr double kMinStep = 1e-300;

double unit_uniform(std::mt19937_64& gen) {
  return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

Vector starting_point(const FeasibleSet& set, std::uint64_t seed) {
  if (seed == 0) return set.lower_bounds;
  std::mt19937_64 gen(seed);
  Vector p(set.size());
  for (Eigen::Index i = 0; i < p.size(); ++i)
    p(i) = set.lower_bounds(i) +
           unit_uniform(gen) * set.budget / set.budget_weights(i);
  return project_feasible(p, set);
}

}  // namespace

void SolverParams::validate() const {
  if (max_iters < 1) throw InvalidArgument("max_iters must be >= 1");
  if (!(tol > 0.0)) throw InvalidArgument("tol must be > 0");
  if (!(initial_step > 0.0)) throw InvalidArgument("initial_step must be > 0");
  if (!(step_backtrack > 0.0 && step_backtrack < 1.0))
    throw InvalidArgument("step_backtrack must lie in (0, 1)");
}

std::string to_string(Method m) {
  switch (m) {
    case Method::automatic: return "automatic";
    case Method::extragradient: return "extragradient";
    case Method::active_set: return "active_set";
  }
  return "?";
}

Method method_from_string(const std::string& name) {
  if (name == "automatic") return Method::automatic;
  if (name == "extragradient") return Method::extragradient;
  if (name == "active_set") return Method::active_set;
  throw InvalidArgument("unknown solver method '" + name + "'");
}

namespace {

// Points on the budget face up to rounding are accepted as feasible so that
// projecting a projected point returns it unchanged.
bool within_budget(const Vector& x, const FeasibleSet& set) {
  const Vector& w = set.budget_weights;
  const double slack = 8.0 * std::numeric_limits<double>::epsilon() *
                       (w.cwiseProduct(x).cwiseAbs().sum() + set.budget);
  return w.dot(x) <= set.budget + slack;
}

Vector project_once(const Vector& p, const FeasibleSet& set) {
  const Vector& lb = set.lower_bounds;
  const Vector& w = set.budget_weights;
  Vector clamped = p.cwiseMax(lb);
  if (within_budget(clamped, set)) return clamped;

  // Solve sum_i w_i max(lb_i, p_i - tau w_i) = budget for tau > 0. Coordinate
  // i leaves the free set at breakpoint (p_i - lb_i) / w_i.
  const auto n = static_cast<std::size_t>(p.size());
  std::vector<std::size_t> order;
  order.reserve(n);
  for (std::size_t i = 0; i < n; ++i)
    if (p(static_cast<Eigen::Index>(i)) > lb(static_cast<Eigen::Index>(i)))
      order.push_back(i);
  auto breakpoint = [&](std::size_t i) {
    const auto k = static_cast<Eigen::Index>(i);
    return (p(k) - lb(k)) / w(k);
  };
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return breakpoint(a) < breakpoint(b);
  });

  double free_mass = 0.0;   // sum over free i of w_i p_i
  double free_curv = 0.0;   // sum over free i of w_i^2
  double fixed_mass = w.dot(lb);
  for (std::size_t i : order) {
    const auto k = static_cast<Eigen::Index>(i);
    free_mass += w(k) * p(k);
    free_curv += w(k) * w(k);
    fixed_mass -= w(k) * lb(k);
  }

  double tau = 0.0;
  for (std::size_t pos = 0; pos < order.size(); ++pos) {
    tau = (free_mass + fixed_mass - set.budget) / free_curv;
    const double next = breakpoint(order[pos]);
    if (tau <= next) break;
    const auto k = static_cast<Eigen::Index>(order[pos]);
    free_mass -= w(k) * p(k);
    free_curv -= w(k) * w(k);
    fixed_mass += w(k) * lb(k);
    tau = next;
  }
  return (p - tau * w).cwiseMax(lb);
}

}  // namespace

Vector project_feasible(const Vector& p, const FeasibleSet& set) {
  if (p.size() != set.lower_bounds.size())
    throw InvalidArgument("projection point and feasible set differ in dimension");
  if (set.budget_weights.dot(set.lower_bounds) > set.budget)
    throw InfeasibleSet("lower bounds exceed the budget");
  // Cancellation in p - tau * w can leave the result a few ulps outside the
  // budget face when p is far away; a second pass from the nearby point fixes it.
  Vector x = project_once(p, set);
  for (int pass = 0; pass < 3 && !within_budget(x, set); ++pass) x = project_once(x, set);
  return x;
}

double natural_residual(const Vector& x, const Vector& fx, const FeasibleSet& set) {
  return (x - project_feasible(x - fx, set)).norm();
}

ViSolution solve_vi(const Operator& F, const FeasibleSet& set,
                    const SolverParams& params) {
  return solve_vi(F, set, params, {});
}

ViSolution solve_vi(const Operator& F, const FeasibleSet& set,
                    const SolverParams& params,
                    const std::function<void(const Vector&)>& on_iterate) {
  params.validate();
  set.validate();

  ViSolution out;
  out.x = starting_point(set, params.seed);
  double tau = params.initial_step;
  out.steps = {std::numeric_limits<double>::infinity(), 0.0, tau};

  for (int iter = 0;; ++iter) {
    const Vector fx = F(out.x);
    out.natural_residual = natural_residual(out.x, fx, set);
    out.iterations = iter;
    if (out.natural_residual <= params.tol) {
      out.converged = true;
      if (!std::isfinite(out.steps.min)) out.steps.min = out.steps.final;
      return out;
    }
    if (iter >= params.max_iters) {
      throw NoConvergence(iter, out.natural_residual, "extragradient");
    }

    Vector y;
    Vector fy;
    double ratio = 0.0;
    for (;;) {
      y = project_feasible(out.x - tau * fx, set);
      fy = F(y);
      const double move = (out.x - y).norm();
      const double change = (fx - fy).norm();
      ratio = move > 0.0 ? tau * change / move : 0.0;
      if (ratio <= kStepAcceptance) break;
      tau *= params.step_backtrack;
      if (tau < kMinStep)
        throw NoConvergence(iter, out.natural_residual,
                            "extragradient step collapsed");
    }
    out.x = project_feasible(out.x - tau * fy, set);
    if (on_iterate) on_iterate(out.x);

    out.steps.min = std::min(out.steps.min, tau);
    out.steps.max = std::max(out.steps.max, tau);
    out.steps.final = tau;
    if (ratio <= 0.5 * kStepAcceptance) tau /= params.step_backtrack;
  }
}

ActiveSetSolution solve_affine_vi_active_set(const Matrix& M, const Vector& m,
                                             const FeasibleSet& set) {
  const Eigen::Index n = m.size();
  if (M.rows() != n || M.cols() != n || set.size() != n)
    throw InvalidArgument("affine VI data have inconsistent dimensions");
  if (n > kActiveSetLimit) {
    std::ostringstream os;
    os << "active-set enumeration supports n <= " << kActiveSetLimit
       << ", got " << n;
    throw DimensionTooLarge(os.str());
  }
  set.validate();

  const Vector& lb = set.lower_bounds;
  const Vector& w = set.budget_weights;
  const double magnitude =
      std::max({1.0, M.cwiseAbs().maxCoeff(), m.cwiseAbs().maxCoeff(),
                set.budget, lb.cwiseAbs().maxCoeff()});
  const double tol = 1e-12 * magnitude;

  const std::uint64_t budget_bit = std::uint64_t{1} << n;
  const std::uint64_t patterns = std::uint64_t{1} << (n + 1);
  std::vector<Eigen::Index> free_idx;
  free_idx.reserve(static_cast<std::size_t>(n));

  for (std::uint64_t pattern = 0; pattern < patterns; ++pattern) {
    free_idx.clear();
    for (Eigen::Index i = 0; i < n; ++i)
      if (!(pattern & (std::uint64_t{1} << i))) free_idx.push_back(i);
    const bool budget_active = pattern & budget_bit;
    const auto k = static_cast<Eigen::Index>(free_idx.size());

    Vector x = lb;
    double lambda = 0.0;
    if (budget_active && k == 0) {
      if (std::abs(w.dot(lb) - set.budget) > tol) continue;
      const Vector g = M * x + m;
      for (Eigen::Index i = 0; i < n; ++i)
        lambda = std::max(lambda, -g(i) / w(i));
    } else {
      const Eigen::Index rows = k + (budget_active ? 1 : 0);
      Matrix A = Matrix::Zero(rows, rows);
      Vector rhs = Vector::Zero(rows);
      for (Eigen::Index r = 0; r < k; ++r) {
        const Eigen::Index i = free_idx[static_cast<std::size_t>(r)];
        double fixed = m(i);
        for (Eigen::Index j = 0; j < n; ++j)
          if (pattern & (std::uint64_t{1} << j)) fixed += M(i, j) * lb(j);
        for (Eigen::Index c = 0; c < k; ++c)
          A(r, c) = M(i, free_idx[static_cast<std::size_t>(c)]);
        rhs(r) = -fixed;
        if (budget_active) A(r, k) = w(i);
      }
      if (budget_active) {
        double fixed_load = 0.0;
        for (Eigen::Index j = 0; j < n; ++j)
          if (pattern & (std::uint64_t{1} << j)) fixed_load += w(j) * lb(j);
        for (Eigen::Index c = 0; c < k; ++c)
          A(k, c) = w(free_idx[static_cast<std::size_t>(c)]);
        rhs(k) = set.budget - fixed_load;
      }
      Eigen::FullPivLU<Matrix> lu(A);
      if (!lu.isInvertible()) continue;
      const Vector sol = lu.solve(rhs);
      for (Eigen::Index c = 0; c < k; ++c)
        x(free_idx[static_cast<std::size_t>(c)]) = sol(c);
      if (budget_active) lambda = sol(k);
    }

    if (lambda < -tol) continue;
    if (!budget_active && w.dot(x) > set.budget + tol) continue;
    const Vector g = M * x + m;
    Vector mu = Vector::Zero(n);
    bool valid = true;
    for (Eigen::Index i = 0; i < n && valid; ++i) {
      const bool at_bound = pattern & (std::uint64_t{1} << i);
      if (at_bound) {
        mu(i) = g(i) + lambda * w(i);
        if (mu(i) < -tol) valid = false;
      } else if (x(i) < lb(i) - tol) {
        valid = false;
      }
    }
    if (!valid) continue;

    ActiveSetSolution out;
    lambda = std::max(lambda, 0.0);
    out.lambda = lambda;
    out.mu = mu.cwiseMax(0.0);
    out.pattern = pattern;
    out.solution.x = x.cwiseMax(lb);
    out.solution.natural_residual =
        natural_residual(out.solution.x, M * out.solution.x + m, set);
    out.solution.iterations = static_cast<int>(pattern + 1);
    out.solution.converged = true;
    return out;
  }
  throw NoValidPattern(
      "no active-set pattern satisfies the KKT conditions; is the symmetric "
      "part of M positive definite?");
}

double kkt_residual(const Vector& f_value, const Vector& x, double lambda,
                    const Vector& mu, const FeasibleSet& set) {
  const Vector& lb = set.lower_bounds;
  const Vector& w = set.budget_weights;
  const double load_gap = w.dot(x) - set.budget;
  double r = (f_value + lambda * w - mu).cwiseAbs().maxCoeff();
  r = std::max(r, std::abs(lambda * load_gap));
  r = std::max(r, (mu.cwiseProduct(x - lb)).cwiseAbs().maxCoeff());
  r = std::max(r, std::max(0.0, -lambda));
  r = std::max(r, std::max(0.0, -mu.minCoeff()));
  r = std::max(r, std::max(0.0, load_gap));
  r = std::max(r, std::max(0.0, (lb - x).maxCoeff()));
  return r;
}

}  // namespace gnefair::vi
