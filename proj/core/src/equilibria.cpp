#include "gnefair/equilibria.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "gnefair/errors.hpp"
#include "parallel.hpp"

namespace gnefair {

namespace {

constexpr double kGoldenWidth = 1e-12;
constexpr double kStationarityTolerance = 1e-6;
constexpr double kVerifyTolerance = 1e-6;

bool budget_is_active(const FeasibleSet& set, const Vector& x) {
  return std::abs(set.budget_weights.dot(x) - set.budget) <=
         kActiveTolerance * std::max(1.0, set.budget);
}

bool use_active_set(const GameModel& game, vi::Method method) {
  switch (method) {
    case vi::Method::active_set:
      if (!game.affine_form())
        throw NotAffine("active-set solver requested for a non-quadratic game");
      return true;
    case vi::Method::extragradient:
      return false;
    case vi::Method::automatic:
      return game.affine_form() && game.dim() <= vi::kAutoActiveSetLimit;
  }
  return false;
}

double golden_section(const auto& f, double lo, double hi) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo;
  double b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c);
  double fd = f(d);
  while (b - a > kGoldenWidth) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
    if (c == d) break;
  }
  double best = 0.5 * (a + b);
  double best_value = f(best);
  for (double candidate : {lo, hi}) {
    const double v = f(candidate);
    if (v < best_value) {
      best = candidate;
      best_value = v;
    }
  }
  return best;
}

}  // namespace

double best_response(const GameModel& game, std::size_t i, const Vector& x) {
  if (x.size() != game.dim())
    throw InvalidArgument("decision dimension does not match the game");
  const auto k = static_cast<Eigen::Index>(i);
  const auto& set = game.feasible();
  const auto& cost = game.agent(i).cost;
  const double w = set.budget_weights(k);
  const double lb = set.lower_bounds(k);
  const double others_load = set.budget_weights.dot(x) - w * x(k);
  const double cap = (set.budget - others_load) / w;
  if (cap < lb - 1e-12 * std::max(1.0, set.budget)) {
    std::ostringstream os;
    os << "other agents leave agent " << i << " a cap of " << cap
       << " below its lower bound " << lb;
    throw InfeasibleResidual(os.str());
  }
  const double hi = std::max(cap, lb);
  const double others_sum = x.sum() - x(k);

  if (cost.is_quadratic()) {
    // The own-partial of a quadratic cost is affine in the own decision.
    const double slope0 = cost.partial(0.0, others_sum);
    const double curvature = cost.partial(1.0, others_sum + 1.0) - slope0;
    return std::clamp(-slope0 / curvature, lb, hi);
  }
  return golden_section(
      [&](double u) { return cost.value(u, others_sum + u); }, lb, hi);
}

GneCheck is_gne(const GameModel& game, const Vector& x, double tol) {
  GneCheck out;
  const auto m = static_cast<Eigen::Index>(game.num_agents());
  out.per_agent_gaps.resize(m);
  Vector deviated = x;
  for (Eigen::Index k = 0; k < m; ++k) {
    const auto i = static_cast<std::size_t>(k);
    deviated(k) = best_response(game, i, x);
    out.per_agent_gaps(k) = eval_cost(game, i, x) - eval_cost(game, i, deviated);
    deviated(k) = x(k);
  }
  out.max_improvement = out.per_agent_gaps.maxCoeff();
  out.verdict = out.max_improvement <= tol;
  return out;
}

Multipliers recover_multipliers(const GameModel& game, const Vector& x) {
  const auto& set = game.feasible();
  const Vector grad = pseudo_gradient(game, x);
  const bool active = budget_is_active(set, x);
  const Eigen::Index n = x.size();
  Multipliers out{Vector::Zero(n), Vector::Zero(n)};
  double worst = 0.0;
  Eigen::Index worst_agent = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double w = set.budget_weights(i);
    const bool at_bound = x(i) - set.lower_bounds(i) <= kBoundTolerance;
    double residual = 0.0;
    if (at_bound) {
      if (grad(i) >= 0.0) {
        out.mu(i) = grad(i);
      } else if (active) {
        out.lambda_per_agent(i) = -grad(i) / w;
      } else {
        residual = -grad(i);
      }
    } else if (active) {
      const double lambda = -grad(i) / w;
      if (lambda >= 0.0) {
        out.lambda_per_agent(i) = lambda;
      } else {
        residual = std::abs(grad(i));
      }
    } else {
      residual = std::abs(grad(i));
    }
    if (residual > worst) {
      worst = residual;
      worst_agent = i;
    }
  }
  if (worst > kStationarityTolerance) {
    std::ostringstream os;
    os << "agent " << worst_agent << " violates stationarity by " << worst
       << " for every nonnegative multiplier pair";
    throw NotStationary(os.str());
  }
  return out;
}

Vector normalize_weights(const Vector& r) {
  if (r.size() == 0 || !r.allFinite() || !(r.array() > 0.0).all())
    throw InvalidWeights("weights must be strictly positive and finite");
  return r * (static_cast<double>(r.size()) / r.sum());
}

EquilibriumResult solve_normalized(const GameModel& game, const Vector& r,
                                   const vi::SolverParams& params) {
  if (r.size() != static_cast<Eigen::Index>(game.num_agents()))
    throw InvalidWeights("one weight per agent is required");
  const Vector weights = normalize_weights(r);
  const auto& set = game.feasible();
  const Eigen::Index n = game.dim();

  EquilibriumResult out;
  double lambda_r = 0.0;
  if (use_active_set(game, params.method)) {
    const auto& affine = *game.affine_form();
    const Matrix M = weights.asDiagonal() * affine.matrix;
    const Vector m = weights.cwiseProduct(affine.offset);
    const auto sol = vi::solve_affine_vi_active_set(M, m, set);
    out.x = sol.solution.x;
    out.iterations = sol.solution.iterations;
    out.natural_residual = sol.solution.natural_residual;
    lambda_r = sol.lambda;
  } else {
    params.validate();
    const auto F = [&](const Vector& x) {
      return weighted_pseudo_gradient(game, x, weights);
    };
    const auto sol = vi::solve_vi(F, set, params);
    out.x = sol.x;
    out.iterations = sol.iterations;
    out.natural_residual = sol.natural_residual;
    if (budget_is_active(set, out.x)) {
      const Vector fr = F(out.x);
      double sum = 0.0;
      int free_agents = 0;
      double floor = 0.0;
      for (Eigen::Index i = 0; i < n; ++i) {
        const double implied = -fr(i) / set.budget_weights(i);
        if (out.x(i) - set.lower_bounds(i) > kBoundTolerance) {
          sum += implied;
          ++free_agents;
        } else {
          floor = std::max(floor, implied);
        }
      }
      lambda_r = free_agents > 0 ? std::max(0.0, sum / free_agents) : floor;
    }
  }

  out.converged = true;
  out.budget_active = budget_is_active(set, out.x);
  if (!out.budget_active) lambda_r = 0.0;
  out.uniform_lambda = lambda_r;
  out.r_weights = weights;
  out.lambda_per_agent = lambda_r * weights.cwiseInverse();
  out.is_vgne = (weights.array() == 1.0).all();

  const Vector fr = weighted_pseudo_gradient(game, out.x, weights);
  Vector mu = Vector::Zero(n);
  for (Eigen::Index i = 0; i < n; ++i)
    if (out.x(i) - set.lower_bounds(i) <= kBoundTolerance)
      mu(i) = std::max(0.0, fr(i) + lambda_r * set.budget_weights(i));
  out.kkt_residual = vi::kkt_residual(fr, out.x, lambda_r, mu, set);
  return out;
}

EquilibriumResult solve_vgne(const GameModel& game, const vi::SolverParams& params) {
  return solve_normalized(
      game, Vector::Ones(static_cast<Eigen::Index>(game.num_agents())), params);
}

int default_grid_density(std::size_t num_agents) {
  return num_agents <= 2 ? 101 : 15;
}

std::vector<Vector> simplex_grid(std::size_t num_agents, int density) {
  if (num_agents == 0) throw InvalidArgument("grid needs at least one agent");
  if (density < 1) throw InvalidArgument("grid density must be >= 1");
  const auto m = static_cast<Eigen::Index>(num_agents);
  const double M = static_cast<double>(num_agents);
  if (density == 1 || num_agents == 1) return {Vector::Ones(m)};

  const double margin = std::min(0.05, 0.5 / M);
  const int K = density - 1;
  std::vector<Vector> grid;
  std::vector<int> parts(num_agents, 0);
  // Compositions of K into M parts in lexicographic order.
  auto emit = [&] {
    Vector r(m);
    for (Eigen::Index i = 0; i < m; ++i)
      r(i) = M * (margin + (1.0 - M * margin) *
                               parts[static_cast<std::size_t>(i)] / K);
    grid.push_back(r);
  };
  auto recurse = [&](auto&& self, std::size_t pos, int remaining) -> void {
    if (pos + 1 == num_agents) {
      parts[pos] = remaining;
      emit();
      return;
    }
    for (int v = 0; v <= remaining; ++v) {
      parts[pos] = v;
      self(self, pos + 1, remaining - v);
    }
  };
  recurse(recurse, 0, K);
  return grid;
}

std::vector<GneSample> gne_set_sample(const GameModel& game,
                                      const std::vector<Vector>& grid,
                                      const vi::SolverParams& params,
                                      unsigned threads) {
  std::vector<GneSample> samples(grid.size());
  detail::parallel_for(grid.size(), threads, [&](std::size_t k) {
    GneSample& s = samples[k];
    try {
      s.r = normalize_weights(grid[k]);
      s.result = solve_normalized(game, s.r, params);
      s.converged = s.result.converged;
      s.strict_complementarity =
          !s.result.budget_active ||
          (s.result.lambda_per_agent.array() > kStrictComplementarity).all();
      const auto check = is_gne(game, s.result.x, kVerifyTolerance);
      s.verified_gne = check.verdict;
      s.max_gap = check.max_improvement;
    } catch (const std::exception& e) {
      if (s.r.size() == 0) s.r = grid[k];
      s.converged = false;
      s.failure = e.what();
    }
  });
  return samples;
}

}  // namespace gnefair
