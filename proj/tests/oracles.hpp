#pragma once

// Reference computations written independently of the library, used as test
// oracles. Nothing here calls into gnefair except for plain data types.

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <vector>

#include "gnefair/evgame.hpp"

namespace oracle {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Euclidean projection onto {x >= lb, w'x <= U} by enumerating every
/// combination of active lower bounds and budget, keeping the closest
/// feasible candidate.
inline Vec project_by_enumeration(const Vec& p, const Vec& lb, const Vec& w, double U) {
  const int n = static_cast<int>(p.size());
  Vec best;
  double best_dist = std::numeric_limits<double>::infinity();
  auto feasible = [&](const Vec& x) {
    if ((x - lb).minCoeff() < -1e-12) return false;
    return w.dot(x) <= U + 1e-12 * std::max(1.0, std::abs(U));
  };
  auto consider = [&](const Vec& x) {
    if (!feasible(x)) return;
    const double d = (x - p).squaredNorm();
    if (d < best_dist) {
      best_dist = d;
      best = x;
    }
  };
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
    Vec x = p;
    for (int i = 0; i < n; ++i)
      if (mask >> i & 1) x(i) = lb(i);
    consider(x);
    double free_ww = 0.0, rhs = -U;
    for (int i = 0; i < n; ++i) {
      if (mask >> i & 1) {
        rhs += w(i) * lb(i);
      } else {
        rhs += w(i) * p(i);
        free_ww += w(i) * w(i);
      }
    }
    if (free_ww == 0.0) continue;
    const double lambda = rhs / free_ww;
    if (lambda < 0.0) continue;
    Vec y = x;
    for (int i = 0; i < n; ++i)
      if (!(mask >> i & 1)) y(i) = p(i) - lambda * w(i);
    consider(y);
  }
  return best;
}

/// Cost of agent i in an EV game, straight from the model definition.
inline double ev_cost(const gnefair::ev::EvParams& p, std::size_t i, const Vec& u) {
  const double z = p.A[i] * p.z_init[i] + p.B[i] * u(static_cast<Eigen::Index>(i));
  return p.q[i] * (p.z_ref[i] - z) * (p.z_ref[i] - z) +
         u(static_cast<Eigen::Index>(i)) * (p.rho1[i] * u.sum() + p.rho0[i]);
}

/// Gradient of sum_i ev_cost(i) with respect to the whole decision vector.
inline Vec ev_total_cost_gradient(const gnefair::ev::EvParams& p, const Vec& u) {
  const auto n = u.size();
  Vec g(n);
  double weighted = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) weighted += p.rho1[static_cast<std::size_t>(i)] * u(i);
  for (Eigen::Index k = 0; k < n; ++k) {
    const auto s = static_cast<std::size_t>(k);
    const double z = p.A[s] * p.z_init[s] + p.B[s] * u(k);
    g(k) = -2.0 * p.q[s] * p.B[s] * (p.z_ref[s] - z) + p.rho1[s] * u.sum() + p.rho0[s] + weighted;
  }
  return g;
}

/// Projected gradient descent with constant step on a smooth convex function
/// over {x >= lb, w'x <= U}; stops when an iteration moves less than `tol`.
inline Vec projected_gradient_min(const std::function<Vec(const Vec&)>& grad, const Vec& lb,
                                  const Vec& w, double U, double step, double tol = 1e-14,
                                  int max_iters = 1000000) {
  Vec x = lb;
  for (int k = 0; k < max_iters; ++k) {
    Vec next = project_by_enumeration(x - step * grad(x), lb, w, U);
    const double move = (next - x).lpNorm<Eigen::Infinity>();
    x = next;
    if (move < tol) break;
  }
  return x;
}

/// Central difference of f at x along coordinate i.
inline double central_difference(const std::function<double(const Vec&)>& f, const Vec& x,
                                  Eigen::Index i, double h = 1e-5) {
  Vec a = x, b = x;
  a(i) += h;
  b(i) -= h;
  return (f(a) - f(b)) / (2.0 * h);
}

/// Uniform point of {x >= lb, sum x <= U} scaled down by `shrink`.
inline Vec random_feasible(std::mt19937_64& rng, const Vec& lb, double U, double shrink = 1.0) {
  std::exponential_distribution<double> e(1.0);
  const auto n = lb.size();
  Vec g(n + 1);
  for (Eigen::Index i = 0; i <= n; ++i) g(i) = e(rng);
  g /= g.sum();
  const double room = (U - lb.sum()) * shrink;
  return lb + room * g.head(n);
}

/// EV game parameters whose budget binds at the v-GNE.
inline gnefair::ev::EvParams random_ev_params(std::mt19937_64& rng, std::size_t m) {
  std::uniform_real_distribution<double> q(0.5, 2.0), a(0.0, 1.0), b(0.5, 1.0), z0(0.0, 0.3),
      zr(0.8, 1.5), r0(0.01, 0.1), r1(0.0, 0.2), budget(0.5, 1.0);
  gnefair::ev::EvParams p;
  for (std::size_t i = 0; i < m; ++i) {
    p.q.push_back(q(rng));
    p.A.push_back(a(rng));
    p.B.push_back(b(rng));
    p.z_init.push_back(z0(rng));
    p.z_ref.push_back(zr(rng));
    p.rho0.push_back(r0(rng));
    p.rho1.push_back(r1(rng));
  }
  p.U_bar = budget(rng);
  return p;
}

/// Random operator M x + m with symmetric part >= `margin` * I.
inline std::pair<Mat, Vec> random_strongly_monotone(std::mt19937_64& rng, Eigen::Index n,
                                                    double margin = 0.1) {
  std::normal_distribution<double> g(0.0, 1.0);
  Mat S(n, n), K(n, n);
  Vec m(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    m(i) = g(rng);
    for (Eigen::Index j = 0; j < n; ++j) {
      S(i, j) = g(rng);
      K(i, j) = g(rng);
    }
  }
  Mat M = S * S.transpose() / static_cast<double>(n) + margin * Mat::Identity(n, n) +
          0.5 * (K - K.transpose());
  return {M, m};
}

/// Smallest eigenvalue of the symmetric part.
inline double min_sym_eigen(const Mat& M) {
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (M + M.transpose()));
  return es.eigenvalues().minCoeff();
}

}  // namespace oracle
