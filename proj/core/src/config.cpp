#include "gnefair/config.hpp"

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <initializer_list>
#include <string>

#include <json.hpp>

#include "gnefair/errors.hpp"

namespace gnefair::config {

namespace {

using nlohmann::json;

class Collector {
 public:
  void add(std::string path, std::string message) {
    errors_.push_back({std::move(path), std::move(message)});
  }
  bool empty() const { return errors_.empty(); }
  std::vector<FieldError> take() { return std::move(errors_); }

 private:
  std::vector<FieldError> errors_;
};

std::string child(const std::string& path, std::string_view key) {
  return path.empty() ? std::string(key) : path + "." + std::string(key);
}

std::string indexed(const std::string& path, std::size_t i) {
  return path + "[" + std::to_string(i) + "]";
}

void check_keys(const json& obj, const std::string& path,
                std::initializer_list<std::string_view> allowed, Collector& c) {
  for (const auto& [key, value] : obj.items()) {
    bool known = false;
    for (auto a : allowed) known = known || key == a;
    if (!known) c.add(child(path, key), "unknown field");
  }
}

bool require_object(const json& j, const std::string& path, Collector& c) {
  if (j.is_object()) return true;
  c.add(path, "must be an object");
  return false;
}

std::optional<double> read_number(const json& obj, std::string_view key,
                                  const std::string& path, Collector& c) {
  const auto it = obj.find(key);
  if (it == obj.end()) return std::nullopt;
  if (!it->is_number()) {
    c.add(child(path, key), "must be a number");
    return std::nullopt;
  }
  return it->get<double>();
}

std::optional<std::int64_t> read_integer(const json& obj, std::string_view key,
                                         const std::string& path, Collector& c) {
  const auto it = obj.find(key);
  if (it == obj.end()) return std::nullopt;
  if (!it->is_number_integer()) {
    c.add(child(path, key), "must be an integer");
    return std::nullopt;
  }
  return it->get<std::int64_t>();
}

std::optional<std::vector<double>> read_number_array(const json& j,
                                                     const std::string& path,
                                                     Collector& c) {
  if (!j.is_array()) {
    c.add(path, "must be an array of numbers");
    return std::nullopt;
  }
  std::vector<double> out;
  bool ok = true;
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) {
      c.add(indexed(path, i), "must be a number");
      ok = false;
    } else {
      out.push_back(j[i].get<double>());
    }
  }
  if (!ok) return std::nullopt;
  return out;
}

// Scalar or array; scalars become one-element vectors.
std::optional<std::vector<double>> read_scalar_or_array(const json& j,
                                                        const std::string& path,
                                                        Collector& c) {
  if (j.is_number()) return std::vector<double>{j.get<double>()};
  return read_number_array(j, path, c);
}

std::optional<Transformation> parse_transformation(const json& j,
                                                   const std::string& path,
                                                   Collector& c,
                                                   bool allow_label) {
  if (!require_object(j, path, c)) return std::nullopt;
  if (allow_label)
    check_keys(j, path, {"label", "kind", "a", "b"}, c);
  else
    check_keys(j, path, {"kind", "a", "b"}, c);
  Transformation t;
  bool ok = true;
  if (!j.contains("kind") || !j["kind"].is_string()) {
    c.add(child(path, "kind"), "must be one of CNC, CUC, CFC");
    ok = false;
  } else {
    try {
      t.kind = transformation_kind_from_string(j["kind"].get<std::string>());
    } catch (const InvalidArgument& e) {
      c.add(child(path, "kind"), e.what());
      ok = false;
    }
  }
  for (const char* key : {"a", "b"}) {
    if (!j.contains(key)) {
      c.add(child(path, key), "is required");
      ok = false;
      continue;
    }
    auto values = read_scalar_or_array(j[key], child(path, key), c);
    if (!values) {
      ok = false;
      continue;
    }
    (std::string_view(key) == "a" ? t.a : t.b) = std::move(*values);
  }
  for (std::size_t i = 0; ok && i < t.a.size(); ++i) {
    if (!(t.a[i] > 0.0)) {
      c.add(t.a.size() == 1 && j["a"].is_number() ? child(path, "a")
                                                  : indexed(child(path, "a"), i),
            "must be > 0");
      ok = false;
    }
  }
  if (!ok) return std::nullopt;
  return t;
}

void check_transformation_arity(const Transformation& t, std::size_t agents,
                                const std::string& path, Collector& c) {
  try {
    t.validate(agents);
  } catch (const InvalidArgument& e) {
    c.add(path, e.what());
  }
}

std::optional<ev::EvParams> parse_game(const json& j, Collector& c) {
  const std::string path = "game";
  if (!require_object(j, path, c)) return std::nullopt;
  static constexpr std::string_view kFields[] = {"q",    "A",    "B",   "z_init",
                                                 "z_ref", "rho0", "rho1"};
  check_keys(j, path, {"M", "q", "A", "B", "z_init", "z_ref", "rho0", "rho1", "U_bar"}, c);

  std::optional<std::size_t> m;
  if (auto given = read_integer(j, "M", path, c)) {
    if (*given < 1)
      c.add(child(path, "M"), "must be >= 1");
    else
      m = static_cast<std::size_t>(*given);
  }
  if (!m) {
    for (auto f : kFields) {
      const auto it = j.find(f);
      if (it != j.end() && it->is_array()) {
        m = it->size();
        break;
      }
    }
  }
  if (!m || *m == 0) {
    c.add(child(path, "M"), "agent count is required (give M or a per-agent array)");
    return std::nullopt;
  }

  ev::EvParams p = ev::EvParams::symmetric(*m);
  std::vector<double>* targets[] = {&p.q,     &p.A,    &p.B,   &p.z_init,
                                    &p.z_ref, &p.rho0, &p.rho1};
  using Check = std::function<bool(double)>;
  const std::pair<Check, const char*> rules[] = {
      {[](double v) { return v > 0.0; }, "must be > 0"},
      {[](double v) { return v >= 0.0 && v <= 1.0; }, "must lie in [0, 1]"},
      {[](double v) { return v > 0.0 && v <= 1.0; }, "must lie in (0, 1]"},
      {[](double v) { return v >= 0.0; }, "must be >= 0"},
      {[](double v) { return v > 0.0; }, "must be > 0"},
      {[](double v) { return v >= 0.0; }, "must be >= 0"},
      {[](double v) { return v >= 0.0; }, "must be >= 0"},
  };
  bool ok = true;
  for (std::size_t f = 0; f < std::size(kFields); ++f) {
    const std::string fpath = child(path, kFields[f]);
    const auto it = j.find(kFields[f]);
    if (it == j.end()) continue;
    auto values = read_scalar_or_array(*it, fpath, c);
    if (!values) {
      ok = false;
      continue;
    }
    if (it->is_number()) values->assign(*m, values->front());
    if (values->size() != *m) {
      c.add(fpath, "expected " + std::to_string(*m) + " entries, got " +
                       std::to_string(values->size()));
      ok = false;
      continue;
    }
    for (std::size_t i = 0; i < *m; ++i) {
      if (!std::isfinite((*values)[i]) || !rules[f].first((*values)[i])) {
        c.add(indexed(fpath, i), rules[f].second);
        ok = false;
      }
    }
    *targets[f] = std::move(*values);
  }
  if (auto u = read_number(j, "U_bar", path, c)) {
    if (!(*u > 0.0)) {
      c.add(child(path, "U_bar"), "must be > 0");
      ok = false;
    } else {
      p.U_bar = *u;
    }
  }
  if (!ok) return std::nullopt;
  return p;
}

std::optional<FairnessMetric> parse_metric(const json& j, const std::string& path,
                                           Collector& c) {
  FairnessMetric m;
  auto set_kind = [&](const std::string& name, const std::string& kpath) {
    try {
      m.kind = metric_kind_from_string(name);
      return true;
    } catch (const InvalidArgument& e) {
      c.add(kpath, e.what());
      return false;
    }
  };
  if (j.is_string()) {
    if (!set_kind(j.get<std::string>(), path)) return std::nullopt;
    if (m.kind == FairnessMetric::Kind::AI) {
      c.add(path, "AI needs an alpha; use {\"kind\": \"AI\", \"alpha\": ...}");
      return std::nullopt;
    }
    return m;
  }
  if (!require_object(j, path, c)) return std::nullopt;
  check_keys(j, path, {"kind", "alpha", "benchmark_decision", "benchmark_costs"}, c);
  if (!j.contains("kind") || !j["kind"].is_string()) {
    c.add(child(path, "kind"), "must be one of MM, SW, NBS, AI, JI");
    return std::nullopt;
  }
  if (!set_kind(j["kind"].get<std::string>(), child(path, "kind"))) return std::nullopt;
  bool ok = true;
  if (auto a = read_number(j, "alpha", path, c)) m.alpha = *a;
  if (m.kind == FairnessMetric::Kind::AI) {
    if (!j.contains("alpha")) {
      c.add(child(path, "alpha"), "is required for AI");
      ok = false;
    } else if (!(m.alpha > 0.0) || m.alpha == 1.0) {
      c.add(child(path, "alpha"), "must be > 0 and != 1");
      ok = false;
    }
  }
  for (const char* key : {"benchmark_decision", "benchmark_costs"}) {
    if (!j.contains(key)) continue;
    auto values = read_number_array(j[key], child(path, key), c);
    if (!values) {
      ok = false;
      continue;
    }
    Vector v = Eigen::Map<const Vector>(values->data(),
                                        static_cast<Eigen::Index>(values->size()));
    if (std::string_view(key) == "benchmark_decision")
      m.benchmark_decision = std::move(v);
    else
      m.benchmark_costs = std::move(v);
  }
  if (!ok) return std::nullopt;
  return m;
}

json number_array(const std::vector<double>& v) { return json(v); }

json number_array(const Vector& v) {
  return json(std::vector<double>(v.data(), v.data() + v.size()));
}

json transformation_json(const Transformation& t) {
  json out;
  out["kind"] = to_string(t.kind);
  if (t.kind == Transformation::Kind::CNC)
    out["a"] = number_array(t.a);
  else
    out["a"] = t.a.front();
  if (t.kind == Transformation::Kind::CFC)
    out["b"] = t.b.front();
  else
    out["b"] = number_array(t.b);
  return out;
}

json metric_json(const FairnessMetric& m) {
  json out;
  out["kind"] = to_string(m.kind);
  if (m.kind == FairnessMetric::Kind::AI) out["alpha"] = m.alpha;
  if (m.benchmark_decision) out["benchmark_decision"] = number_array(*m.benchmark_decision);
  if (m.benchmark_costs) out["benchmark_costs"] = number_array(*m.benchmark_costs);
  return out;
}

}  // namespace

std::vector<FairnessMetric> default_sweep_metrics() {
  return {FairnessMetric::maximin(), FairnessMetric::social_welfare(),
          FairnessMetric::nash_bargaining(), FairnessMetric::jain()};
}

std::vector<NamedTransformation> default_audit_transformations(std::size_t num_agents) {
  std::vector<double> ramp(num_agents);
  std::vector<double> zeros(num_agents, 0.0);
  std::vector<double> offsets(num_agents);
  for (std::size_t i = 0; i < num_agents; ++i) {
    ramp[i] = static_cast<double>(i + 1);
    offsets[i] = 5.0 - 2.0 * static_cast<double>(i);
  }
  return {
      {"cfc", Transformation::cfc(2.0, 1.0)},
      {"cuc", Transformation::cuc(2.0, offsets)},
      {"cnc", Transformation::cnc(ramp, zeros)},
  };
}

GameModel ExperimentConfig::build_game() const {
  if (scenario.has_value() == game.has_value())
    throw InvalidArgument("exactly one of 'scenario' or 'game' must be set");
  GameModel g = scenario ? ev::scenario(*scenario) : ev::build_ev_game(*game);
  if (transform) g = apply_transformation(g, *transform);
  return g;
}

ExperimentConfig parse_config(std::string_view document) {
  json doc;
  try {
    doc = json::parse(document.begin(), document.end());
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("malformed configuration document: ") + e.what());
  }

  Collector c;
  ExperimentConfig cfg;
  if (!doc.is_object()) {
    c.add("", "document must be a JSON object");
    throw ValidationError(c.take());
  }
  check_keys(doc, "",
             {"scenario", "game", "transform", "solver", "metric", "sweep", "audit",
              "output"},
             c);

  const bool has_scenario = doc.contains("scenario");
  const bool has_game = doc.contains("game");
  if (has_scenario && has_game)
    c.add("game", "'game' and 'scenario' are mutually exclusive; give exactly one");
  if (!has_scenario && !has_game)
    c.add("scenario", "one of 'scenario' or 'game' is required");

  std::optional<std::size_t> agents;
  if (has_scenario) {
    if (!doc["scenario"].is_string()) {
      c.add("scenario", "must be a string");
    } else {
      const auto name = doc["scenario"].get<std::string>();
      try {
        agents = ev::scenario(name).num_agents();
        cfg.scenario = name;
      } catch (const UnknownScenario& e) {
        c.add("scenario", e.what());
      }
    }
  }
  if (has_game) {
    if (auto p = parse_game(doc["game"], c)) {
      if (!agents) agents = p->num_agents();
      cfg.game = std::move(*p);
    }
  }
  if (has_scenario && has_game) {
    cfg.scenario.reset();
    cfg.game.reset();
  }

  if (doc.contains("transform")) {
    if (auto t = parse_transformation(doc["transform"], "transform", c, false)) {
      if (agents) check_transformation_arity(*t, *agents, "transform", c);
      cfg.transform = std::move(*t);
    }
  }

  if (doc.contains("solver") && require_object(doc["solver"], "solver", c)) {
    const json& s = doc["solver"];
    check_keys(s, "solver",
               {"max_iters", "tol", "initial_step", "step_backtrack", "seed", "method"}, c);
    if (auto v = read_integer(s, "max_iters", "solver", c)) {
      if (*v < 1) c.add("solver.max_iters", "must be >= 1");
      else cfg.solver.max_iters = static_cast<int>(std::min<std::int64_t>(*v, 1'000'000'000));
    }
    if (auto v = read_number(s, "tol", "solver", c)) {
      if (!(*v > 0.0)) c.add("solver.tol", "must be > 0");
      else cfg.solver.tol = *v;
    }
    if (auto v = read_number(s, "initial_step", "solver", c)) {
      if (!(*v > 0.0)) c.add("solver.initial_step", "must be > 0");
      else cfg.solver.initial_step = *v;
    }
    if (auto v = read_number(s, "step_backtrack", "solver", c)) {
      if (!(*v > 0.0 && *v < 1.0)) c.add("solver.step_backtrack", "must lie in (0, 1)");
      else cfg.solver.step_backtrack = *v;
    }
    if (s.contains("seed")) {
      if (!s["seed"].is_number_unsigned())
        c.add("solver.seed", "must be a nonnegative integer");
      else
        cfg.solver.seed = s["seed"].get<std::uint64_t>();
    }
    if (s.contains("method")) {
      if (!s["method"].is_string()) {
        c.add("solver.method", "must be a string");
      } else {
        try {
          cfg.solver.method = vi::method_from_string(s["method"].get<std::string>());
        } catch (const InvalidArgument& e) {
          c.add("solver.method", e.what());
        }
      }
    }
  }

  if (doc.contains("metric")) {
    if (auto m = parse_metric(doc["metric"], "metric", c)) cfg.metric = std::move(*m);
  }

  if (doc.contains("sweep") && require_object(doc["sweep"], "sweep", c)) {
    const json& s = doc["sweep"];
    check_keys(s, "sweep", {"grid_density", "refine_iters", "metrics", "threads"}, c);
    if (auto v = read_integer(s, "grid_density", "sweep", c)) {
      if (*v != 0 && (*v < 3 || *v > 100000))
        c.add("sweep.grid_density", "must be 0 (default) or between 3 and 100000");
      else cfg.sweep.grid_density = static_cast<int>(*v);
    }
    if (auto v = read_integer(s, "refine_iters", "sweep", c)) {
      if (*v < 0 || *v > 1'000'000) c.add("sweep.refine_iters", "must lie in [0, 1000000]");
      else cfg.sweep.refine_iters = static_cast<int>(*v);
    }
    if (auto v = read_integer(s, "threads", "sweep", c)) {
      if (*v < 0 || *v > 1024) c.add("sweep.threads", "must lie in [0, 1024]");
      else cfg.sweep.threads = static_cast<unsigned>(*v);
    }
    if (s.contains("metrics")) {
      if (!s["metrics"].is_array()) {
        c.add("sweep.metrics", "must be an array");
      } else {
        for (std::size_t i = 0; i < s["metrics"].size(); ++i)
          if (auto m = parse_metric(s["metrics"][i], indexed("sweep.metrics", i), c))
            cfg.sweep.metrics.push_back(std::move(*m));
      }
    }
  }

  if (doc.contains("audit") && require_object(doc["audit"], "audit", c)) {
    const json& a = doc["audit"];
    check_keys(a, "audit", {"transformations"}, c);
    if (a.contains("transformations")) {
      if (!a["transformations"].is_array()) {
        c.add("audit.transformations", "must be an array");
      } else {
        for (std::size_t i = 0; i < a["transformations"].size(); ++i) {
          const std::string path = indexed("audit.transformations", i);
          const json& entry = a["transformations"][i];
          if (auto t = parse_transformation(entry, path, c, true)) {
            if (agents) check_transformation_arity(*t, *agents, path, c);
            std::string label = to_string(t->kind);
            if (entry.contains("label")) {
              if (!entry["label"].is_string())
                c.add(child(path, "label"), "must be a string");
              else
                label = entry["label"].get<std::string>();
            }
            cfg.audit.transformations.push_back({std::move(label), std::move(*t)});
          }
        }
      }
    }
  }

  if (doc.contains("output") && require_object(doc["output"], "output", c)) {
    const json& o = doc["output"];
    check_keys(o, "output", {"directory", "emit_plots"}, c);
    if (o.contains("directory")) {
      if (!o["directory"].is_string() || o["directory"].get<std::string>().empty())
        c.add("output.directory", "must be a nonempty string");
      else
        cfg.output.directory = o["directory"].get<std::string>();
    }
    if (o.contains("emit_plots")) {
      if (!o["emit_plots"].is_boolean())
        c.add("output.emit_plots", "must be a boolean");
      else
        cfg.output.emit_plots = o["emit_plots"].get<bool>();
    }
  }

  if (!c.empty()) throw ValidationError(c.take());
  return cfg;
}

std::string serialize_config(const ExperimentConfig& cfg) {
  json doc;
  if (cfg.scenario) doc["scenario"] = *cfg.scenario;
  if (cfg.game) {
    const auto& p = *cfg.game;
    doc["game"] = {{"M", p.num_agents()},      {"q", p.q},
                   {"A", p.A},                 {"B", p.B},
                   {"z_init", p.z_init},       {"z_ref", p.z_ref},
                   {"rho0", p.rho0},           {"rho1", p.rho1},
                   {"U_bar", p.U_bar}};
  }
  if (cfg.transform) doc["transform"] = transformation_json(*cfg.transform);
  doc["solver"] = {{"max_iters", cfg.solver.max_iters},
                   {"tol", cfg.solver.tol},
                   {"initial_step", cfg.solver.initial_step},
                   {"step_backtrack", cfg.solver.step_backtrack},
                   {"seed", cfg.solver.seed},
                   {"method", vi::to_string(cfg.solver.method)}};
  doc["metric"] = metric_json(cfg.metric);
  json metrics = json::array();
  for (const auto& m : cfg.sweep.metrics) metrics.push_back(metric_json(m));
  doc["sweep"] = {{"grid_density", cfg.sweep.grid_density},
                  {"refine_iters", cfg.sweep.refine_iters},
                  {"metrics", metrics},
                  {"threads", cfg.sweep.threads}};
  json transforms = json::array();
  for (const auto& t : cfg.audit.transformations) {
    json entry = transformation_json(t.transformation);
    entry["label"] = t.label;
    transforms.push_back(entry);
  }
  doc["audit"] = {{"transformations", transforms}};
  doc["output"] = {{"directory", cfg.output.directory},
                   {"emit_plots", cfg.output.emit_plots}};
  return doc.dump(2) + "\n";
}

std::string config_hash(const ExperimentConfig& cfg) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : serialize_config(cfg)) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace gnefair::config
