#pragma once

// Experiment configuration documents (JSON).
//
//   {
//     "scenario": "baseline",              // or "game": { inline EvParams }
//     "transform": {"kind": "CNC", "a": [3, 1], "b": [0, 0]},
//     "solver": {"max_iters": 100000, "tol": 1e-10, "initial_step": 1.0,
//                "step_backtrack": 0.5, "seed": 0, "method": "automatic"},
//     "metric": {"kind": "NBS"},            // or "MM", {"kind": "AI", "alpha": 2}
//     "sweep": {"grid_density": 101, "refine_iters": 100,
//               "metrics": ["MM", "SW", "NBS", "JI"], "threads": 0},
//     "audit": {"transformations": [{"label": "cuc", "kind": "CUC", "a": 2, "b": [1, 2, 3]}]},
//     "output": {"directory": "out", "emit_plots": false}
//   }
//
// Inline games take per-agent arrays (or a scalar broadcast to M agents) for
// q, A, B, z_init, z_ref, rho0, rho1 plus U_bar; omitted fields fall back to
// the symmetric defaults of ev::EvParams::symmetric.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gnefair/evgame.hpp"
#include "gnefair/fairness.hpp"
#include "gnefair/model.hpp"
#include "gnefair/vi.hpp"

namespace gnefair::config {

struct NamedTransformation {
  std::string label;
  Transformation transformation;
};

struct SweepConfig {
  /// 0 picks default_grid_density(M).
  int grid_density = 0;
  int refine_iters = 100;
  std::vector<FairnessMetric> metrics;
  unsigned threads = 0;
};

struct AuditConfig {
  std::vector<NamedTransformation> transformations;
};

struct OutputConfig {
  std::string directory = "out";
  bool emit_plots = false;
};

struct ExperimentConfig {
  std::optional<std::string> scenario;
  std::optional<ev::EvParams> game;
  std::optional<Transformation> transform;
  vi::SolverParams solver{};
  FairnessMetric metric = FairnessMetric::social_welfare();
  SweepConfig sweep{};
  AuditConfig audit{};
  OutputConfig output{};

  /// Scenario or inline game, with `transform` applied when present.
  GameModel build_game() const;
};

/// Throws ParseError for malformed JSON and ValidationError listing every
/// schema violation with its field path.
ExperimentConfig parse_config(std::string_view document);

/// Canonical JSON with every field explicit; parse_config inverts it.
std::string serialize_config(const ExperimentConfig& cfg);

/// 64-bit FNV-1a of the canonical serialization, as 16 hex digits.
std::string config_hash(const ExperimentConfig& cfg);

/// Metrics used by sweep when none are configured.
std::vector<FairnessMetric> default_sweep_metrics();
/// Transformations used by audit when none are configured.
std::vector<NamedTransformation> default_audit_transformations(std::size_t num_agents);

}  // namespace gnefair::config
