#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "gnefair/equilibria.hpp"
#include "gnefair/errors.hpp"
#include "gnefair/evgame.hpp"
#include "gnefair/fairness.hpp"

using namespace gnefair;

namespace {

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

GameModel scaled_pair(double a1) {
  return apply_transformation(ev::scenario(ev::Scenario::two_agent),
                              Transformation::cnc({a1, 1.0}, {0.0, 0.0}));
}

std::vector<double> ranks(const std::vector<double>& v) {
  std::vector<std::size_t> idx(v.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](auto a, auto b) { return v[a] < v[b]; });
  std::vector<double> r(v.size());
  for (std::size_t k = 0; k < idx.size(); ++k) r[idx[k]] = static_cast<double>(k);
  return r;
}

double spearman(const std::vector<double>& a, const std::vector<double>& b) {
  const auto ra = ranks(a), rb = ranks(b);
  double d2 = 0.0;
  for (std::size_t k = 0; k < ra.size(); ++k) d2 += (ra[k] - rb[k]) * (ra[k] - rb[k]);
  const double n = static_cast<double>(ra.size());
  return 1.0 - 6.0 * d2 / (n * (n * n - 1.0));
}

}  // namespace

TEST_CASE("metric values on a hand-checked cost vector") {
  const Vector c = vec({1.0, 2.0, 3.0});
  CHECK(fairness_value(FairnessMetric::maximin(), c) == 3.0);
  CHECK(fairness_value(FairnessMetric::social_welfare(), c) == 6.0);
  CHECK(fairness_value(FairnessMetric::jain(), c) == doctest::Approx(-36.0 / 42.0));
  CHECK(fairness_value(FairnessMetric::atkinson(2.0), c) ==
        doctest::Approx(-(1.0 + 0.5 + 1.0 / 3.0)));
  CHECK(fairness_value(FairnessMetric::atkinson(0.5), c) ==
        doctest::Approx(2.0 * (1.0 + std::sqrt(2.0) + std::sqrt(3.0))));
  CHECK(fairness_value(FairnessMetric::nash_bargaining(), c, vec({2.0, 3.0, 5.0})) ==
        doctest::Approx(-2.0));
  // Jain's index is maximal for equal costs.
  CHECK(fairness_value(FairnessMetric::jain(), vec({4.0, 4.0, 4.0})) == doctest::Approx(-1.0));
}

TEST_CASE("metric domains and validation") {
  const Vector c = vec({1.0, 2.0});
  CHECK_THROWS_AS(fairness_value(FairnessMetric::nash_bargaining(), c), MissingBenchmark);
  CHECK_THROWS_AS(fairness_value(FairnessMetric::nash_bargaining(), c, vec({1.0, 3.0})),
                  DomainError);
  CHECK_THROWS_AS(fairness_value(FairnessMetric::atkinson(2.0), vec({0.0, 1.0})), DomainError);
  CHECK_THROWS_AS(FairnessMetric::atkinson(1.0).validate(), InvalidArgument);
  CHECK_THROWS_AS(FairnessMetric::atkinson(0.0).validate(), InvalidArgument);
  CHECK_THROWS_AS(fairness_value(FairnessMetric::jain(), vec({0.0, 0.0})), DomainError);
  CHECK(FairnessMetric::atkinson(2.0).label() == "AI(2)");
  CHECK(FairnessMetric::atkinson(0.5).label() == "AI(0.5)");
  CHECK(FairnessMetric::maximin().label() == "MM");
  CHECK(metric_kind_from_string("JI") == FairnessMetric::Kind::JI);
  CHECK_THROWS_AS(metric_kind_from_string("gini"), InvalidArgument);
}

TEST_CASE("NBS benchmark defaults to nobody charging and follows transformations") {
  const GameModel g = ev::scenario(ev::Scenario::two_agent);
  const Vector bench = resolve_benchmark_costs(g, FairnessMetric::nash_bargaining());
  CHECK(bench(0) == doctest::Approx(1.0));
  const GameModel s = scaled_pair(3.0);
  CHECK(resolve_benchmark_costs(s, FairnessMetric::nash_bargaining())(0) == doctest::Approx(3.0));
  auto explicit_costs = FairnessMetric::nash_bargaining();
  explicit_costs.benchmark_costs = vec({5.0, 6.0});
  CHECK(resolve_benchmark_costs(s, explicit_costs)(1) == 6.0);
  auto decision = FairnessMetric::nash_bargaining();
  decision.benchmark_decision = vec({0.1, 0.1});
  CHECK(resolve_benchmark_costs(g, decision)(0) == doctest::Approx(eval_cost(g, 0, vec({0.1, 0.1}))));
}

TEST_CASE("NBS values scale by the product of multipliers under CNC") {
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> pos(0.2, 5.0), any(-3.0, 3.0);
  const GameModel g = ev::scenario(ev::Scenario::baseline);
  const auto samples = gne_set_sample(g, simplex_grid(3, 10), {}, 1);
  const auto nbs = FairnessMetric::nash_bargaining();
  for (int trial = 0; trial < 5; ++trial) {
    const std::vector<double> a{pos(rng), pos(rng), pos(rng)};
    const GameModel t = apply_transformation(g, Transformation::cnc(a, {any(rng), any(rng), any(rng)}));
    std::size_t best_before = 0, best_after = 0;
    double fb = 1e300, fa = 1e300;
    for (std::size_t k = 0; k < samples.size(); ++k) {
      // Samples that leave an agent without charge gain nothing over the benchmark.
      const bool defined = samples[k].result.x.minCoeff() > kBoundTolerance;
      if (!defined) {
        CHECK_THROWS_AS(evaluate_fairness(g, nbs, samples[k].result.x), DomainError);
        CHECK_THROWS_AS(evaluate_fairness(t, nbs, samples[k].result.x), DomainError);
        continue;
      }
      const double before = evaluate_fairness(g, nbs, samples[k].result.x);
      const double after = evaluate_fairness(t, nbs, samples[k].result.x);
      CHECK(after == doctest::Approx(a[0] * a[1] * a[2] * before).epsilon(1e-10));
      if (before < fb) fb = before, best_before = k;
      if (after < fa) fa = after, best_after = k;
    }
    CHECK(best_before == best_after);
  }
}

TEST_CASE("f-GNE selections on the symmetric pair split evenly") {
  const GameModel g = ev::scenario(ev::Scenario::two_agent);
  for (const auto& m : {FairnessMetric::maximin(), FairnessMetric::social_welfare(),
                        FairnessMetric::nash_bargaining(), FairnessMetric::jain()}) {
    const auto res = solve_fgne(g, m, 101, 100);
    CHECK(res.x_star(0) == doctest::Approx(0.5).epsilon(1e-6));
    CHECK(res.x_star(1) == doctest::Approx(0.5).epsilon(1e-6));
    CHECK(is_gne(g, res.x_star, 1e-6).verdict);
  }
}

TEST_CASE("MM and SW move under CNC while NBS stays put") {
  const GameModel base = scaled_pair(1.0), scaled = scaled_pair(3.0);
  auto moved = [&](const FairnessMetric& m) {
    return (solve_fgne(base, m, 101, 100).x_star - solve_fgne(scaled, m, 101, 100).x_star)
        .lpNorm<Eigen::Infinity>();
  };
  CHECK(moved(FairnessMetric::maximin()) > 1e-3);
  CHECK(moved(FairnessMetric::social_welfare()) > 1e-3);
  CHECK(moved(FairnessMetric::nash_bargaining()) < 1e-4);

  // Maximin equalizes the scaled costs: 3 J_1 = J_2 at the selection.
  const auto mm = solve_fgne(scaled, FairnessMetric::maximin(), 101, 100);
  const Vector c = eval_costs(scaled, mm.x_star);
  CHECK(c(0) == doctest::Approx(c(1)).epsilon(1e-5));
  CHECK(mm.x_star(0) > mm.x_star(1) + 1e-3);
  CHECK(is_gne(scaled, mm.x_star, 1e-6).verdict);
}

TEST_CASE("Atkinson index limits") {
  const GameModel g = scaled_pair(3.0);
  const auto samples = gne_set_sample(g, simplex_grid(2, 101), {}, 1);
  std::vector<double> sw, ai_small, ai_large, mm, min_cost;
  for (const auto& s : samples) {
    REQUIRE(s.converged);
    const Vector c = eval_costs(g, s.result.x);
    sw.push_back(fairness_value(FairnessMetric::social_welfare(), c));
    ai_small.push_back(fairness_value(FairnessMetric::atkinson(1e-3), c));
    ai_large.push_back(fairness_value(FairnessMetric::atkinson(50.0), c));
    mm.push_back(fairness_value(FairnessMetric::maximin(), c));
    min_cost.push_back(c.minCoeff());
  }
  // alpha -> 0 recovers the utilitarian ordering.
  CHECK(spearman(ai_small, sw) == doctest::Approx(1.0));

  // For large alpha the sum over costs is dominated by the smallest cost, so
  // the selection drives the best-off agent's cost down; maximin instead
  // equalizes. The two argmins differ on this game.
  const auto argmin = [](const std::vector<double>& v) {
    return static_cast<std::size_t>(std::min_element(v.begin(), v.end()) - v.begin());
  };
  CHECK(argmin(ai_large) == argmin(min_cost));
  CHECK(argmin(ai_large) != argmin(mm));
}

TEST_CASE("f-GNE failure modes and determinism") {
  const GameModel g = ev::scenario(ev::Scenario::baseline);
  vi::SolverParams p;
  p.method = vi::Method::extragradient;
  p.max_iters = 1;
  CHECK_THROWS_AS(solve_fgne(g, FairnessMetric::social_welfare(), 4, 10, p, 1), AllPointsFailed);

  auto hopeless = FairnessMetric::nash_bargaining();
  hopeless.benchmark_costs = Vector::Zero(3);
  CHECK_THROWS_AS(solve_fgne(g, hopeless, 4, 10), DomainError);
  CHECK_THROWS_AS(solve_fgne(g, FairnessMetric::maximin(), 2, 10), InvalidArgument);

  const auto a = solve_fgne(g, FairnessMetric::jain(), 6, 30, {}, 1);
  const auto b = solve_fgne(g, FairnessMetric::jain(), 6, 30, {}, 3);
  CHECK(a.x_star == b.x_star);
  REQUIRE(a.search_trace.size() == b.search_trace.size());
  CHECK(a.search_trace.size() >= simplex_grid(3, 6).size());
  for (std::size_t k = 0; k < a.search_trace.size(); ++k) CHECK(a.search_trace[k].r == b.search_trace[k].r);
}

TEST_CASE("fairness profile keeps one row per converged sample") {
  const GameModel g = ev::scenario(ev::Scenario::baseline);
  const auto samples = gne_set_sample(g, simplex_grid(3, 5), {}, 1);
  auto bad_nbs = FairnessMetric::nash_bargaining();
  bad_nbs.benchmark_costs = Vector::Zero(3);
  const auto rows =
      fairness_profile(samples, {FairnessMetric::maximin(), bad_nbs, FairnessMetric::jain()}, g);
  CHECK(rows.size() == samples.size());
  for (const auto& r : rows) {
    CHECK(r.values[0].has_value());
    CHECK_FALSE(r.values[1].has_value());
    CHECK(*r.values[0] == doctest::Approx(r.costs.maxCoeff()));
  }
}
