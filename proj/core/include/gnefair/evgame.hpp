#pragma once

// Electric-vehicle charging game: agent i charges u_i >= 0 toward a desired
// state of charge, pays an affine congestion price on the aggregate, and all
// agents share sum_i u_i <= budget.

#include <string>
#include <string_view>
#include <vector>

#include "gnefair/model.hpp"

namespace gnefair::ev {

struct EvParams {
  std::vector<double> q;
  std::vector<double> A;
  std::vector<double> B;
  std::vector<double> z_init;
  std::vector<double> z_ref;
  std::vector<double> rho0;
  std::vector<double> rho1;
  double U_bar = 1.0;

  std::size_t num_agents() const { return q.size(); }

  /// Symmetric agents: q = 1, A = 1, B = 1, z_init = 0, z_ref = 1,
  /// rho1 = 0.1, rho0 = 0.05, budget 1.
  static EvParams symmetric(std::size_t num_agents);

  /// Throws InvalidParams naming the first offending field.
  void validate() const;
  /// sum_i (z_ref_i - A_i z_init_i) / B_i > U_bar: the budget cannot satisfy everyone.
  bool budget_is_scarce() const;
};

/// EvQuadratic costs over the capped nonnegative orthant.
GameModel build_ev_game(const EvParams& p);

enum class Scenario { baseline, scaling, initial_charge, transformed_cost, two_agent };

/// Stable identifiers: baseline, scaling, initial_charge, transformed_cost, two_agent.
std::string to_string(Scenario s);
/// Throws UnknownScenario.
Scenario scenario_from_string(std::string_view name);
std::vector<Scenario> figure3_scenarios();

/// Three-agent study scenarios; two_agent is the symmetric pair with budget 1.
GameModel scenario(Scenario s);
GameModel scenario(std::string_view name);

/// (Ubar - z_1)^2, log(C / z_2) + 0.1 (Ubar - z_2)^2, exp(Ubar - z_3) - 1 with
/// the baseline dynamics and congestion price. C defaults to Ubar.
GameModel transformed_cost_game(const EvParams& base, double C);

}  // namespace gnefair::ev
