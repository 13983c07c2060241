#include "gnefair/evgame.hpp"

#include <cmath>
#include <sstream>

#include "gnefair/errors.hpp"

namespace gnefair::ev {

namespace {

void check_field(const std::vector<double>& v, std::size_t m, const char* name,
                 auto&& ok, const char* requirement) {
  if (v.size() != m) {
    std::ostringstream os;
    os << name << " has " << v.size() << " entries, expected " << m;
    throw InvalidParams(os.str());
  }
  for (std::size_t i = 0; i < m; ++i) {
    if (!std::isfinite(v[i]) || !ok(v[i])) {
      std::ostringstream os;
      os << name << "[" << i << "] = " << v[i] << " must be " << requirement;
      throw InvalidParams(os.str());
    }
  }
}

AgentSpec congestion_agent(const EvParams& p, std::size_t i, TrackingTerm tracking) {
  AgentSpec a;
  a.cost.tracking = tracking;
  a.cost.dynamics = {p.A[i], p.B[i], p.z_init[i]};
  a.cost.congestion = {p.rho0[i], p.rho1[i]};
  return a;
}

}  // namespace

EvParams EvParams::symmetric(std::size_t num_agents) {
  EvParams p;
  p.q.assign(num_agents, 1.0);
  p.A.assign(num_agents, 1.0);
  p.B.assign(num_agents, 1.0);
  p.z_init.assign(num_agents, 0.0);
  p.z_ref.assign(num_agents, 1.0);
  p.rho0.assign(num_agents, 0.05);
  p.rho1.assign(num_agents, 0.1);
  p.U_bar = 1.0;
  return p;
}

void EvParams::validate() const {
  const std::size_t m = q.size();
  if (m == 0) throw InvalidParams("at least one agent is required");
  check_field(q, m, "q", [](double v) { return v > 0.0; }, "> 0");
  check_field(A, m, "A", [](double v) { return v >= 0.0 && v <= 1.0; }, "in [0, 1]");
  check_field(B, m, "B", [](double v) { return v > 0.0 && v <= 1.0; }, "in (0, 1]");
  check_field(z_init, m, "z_init", [](double v) { return v >= 0.0; }, ">= 0");
  check_field(z_ref, m, "z_ref", [](double v) { return v > 0.0; }, "> 0");
  check_field(rho0, m, "rho0", [](double v) { return v >= 0.0; }, ">= 0");
  check_field(rho1, m, "rho1", [](double v) { return v >= 0.0; }, ">= 0");
  if (!(U_bar > 0.0) || !std::isfinite(U_bar)) throw InvalidParams("U_bar must be > 0");
  for (std::size_t i = 0; i < m; ++i)
    if (!(q[i] * B[i] * B[i] + rho1[i] > 0.0))
      throw InvalidParams("own-decision curvature q*B^2 + rho1 must be positive");
}

bool EvParams::budget_is_scarce() const {
  double demand = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i)
    demand += (z_ref[i] - A[i] * z_init[i]) / B[i];
  return U_bar < demand;
}

GameModel build_ev_game(const EvParams& p) {
  p.validate();
  std::vector<AgentSpec> agents;
  for (std::size_t i = 0; i < p.num_agents(); ++i)
    agents.push_back(congestion_agent(p, i, EvQuadratic{p.q[i], p.z_ref[i]}));
  return GameModel(std::move(agents),
                   FeasibleSet::capped_orthant(
                       static_cast<Eigen::Index>(p.num_agents()), p.U_bar));
}

GameModel transformed_cost_game(const EvParams& base, double C) {
  base.validate();
  if (base.num_agents() != 3)
    throw InvalidParams("the transformed-cost game has exactly three agents");
  if (!(C > 0.0)) throw InvalidParams("C must be > 0");
  const double U = base.U_bar;
  std::vector<AgentSpec> agents{
      congestion_agent(base, 0, PureQuadraticGap{U}),
      congestion_agent(base, 1, LogPlusQuadratic{C, 0.1, U}),
      congestion_agent(base, 2, ExponentialGap{U}),
  };
  FeasibleSet set = FeasibleSet::capped_orthant(3, U);
  for (std::size_t i = 0; i < agents.size(); ++i)
    set.lower_bounds(static_cast<Eigen::Index>(i)) =
        agents[i].cost.domain_lower_bound();
  return GameModel(std::move(agents), std::move(set));
}

std::string to_string(Scenario s) {
  switch (s) {
    case Scenario::baseline: return "baseline";
    case Scenario::scaling: return "scaling";
    case Scenario::initial_charge: return "initial_charge";
    case Scenario::transformed_cost: return "transformed_cost";
    case Scenario::two_agent: return "two_agent";
  }
  return "?";
}

Scenario scenario_from_string(std::string_view name) {
  for (auto s : {Scenario::baseline, Scenario::scaling, Scenario::initial_charge,
                 Scenario::transformed_cost, Scenario::two_agent})
    if (to_string(s) == name) return s;
  throw UnknownScenario("unknown scenario '" + std::string(name) + "'");
}

std::vector<Scenario> figure3_scenarios() {
  return {Scenario::baseline, Scenario::scaling, Scenario::initial_charge,
          Scenario::transformed_cost};
}

GameModel scenario(Scenario s) {
  const EvParams base = EvParams::symmetric(3);
  switch (s) {
    case Scenario::baseline:
      return build_ev_game(base);
    case Scenario::scaling:
      return apply_transformation(build_ev_game(base),
                                  Transformation::cnc({1.0, 2.0, 3.0}, {0.0, 0.0, 0.0}));
    case Scenario::initial_charge: {
      EvParams p = base;
      p.z_init = {0.0, 0.25, 0.5};
      return build_ev_game(p);
    }
    case Scenario::transformed_cost:
      return transformed_cost_game(base, base.U_bar);
    case Scenario::two_agent:
      return build_ev_game(EvParams::symmetric(2));
  }
  throw UnknownScenario("unknown scenario");
}

GameModel scenario(std::string_view name) { return scenario(scenario_from_string(name)); }

}  // namespace gnefair::ev
