#include "config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "pathhj/errors.hpp"

namespace pathhj::cli {

using nlohmann::json;

namespace {

/// Reads one JSON object, recording which keys were consumed so that
/// leftovers can be reported as unknown.
class Block {
 public:
  Block(const json& doc, std::string where) : doc_(doc), where_(std::move(where)) {
    if (!doc_.is_object()) fail("must be an object");
  }

  [[noreturn]] void fail(const std::string& msg) const {
    throw SchemaError(where_ + ": " + msg);
  }

  bool has(const std::string& key) {
    seen_.insert(key);
    return doc_.contains(key);
  }

  const json& raw(const std::string& key) {
    seen_.insert(key);
    return doc_.at(key);
  }

  std::optional<double> number(const std::string& key, double lo, double hi,
                               bool open_lo = false) {
    if (!has(key)) return std::nullopt;
    const json& v = doc_.at(key);
    if (!v.is_number()) fail("'" + key + "' must be a number");
    const double x = v.get<double>();
    if (!std::isfinite(x) || x < lo || x > hi || (open_lo && x == lo)) {
      fail("'" + key + "' = " + v.dump() + " is out of range");
    }
    return x;
  }

  std::optional<std::uint64_t> integer(const std::string& key, std::uint64_t lo,
                                       std::uint64_t hi) {
    if (!has(key)) return std::nullopt;
    const json& v = doc_.at(key);
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
      fail("'" + key + "' must be a non-negative integer");
    }
    const std::uint64_t x = v.get<std::uint64_t>();
    if (x < lo || x > hi) fail("'" + key + "' = " + v.dump() + " is out of range");
    return x;
  }

  std::optional<std::string> string(const std::string& key) {
    if (!has(key)) return std::nullopt;
    const json& v = doc_.at(key);
    if (!v.is_string()) fail("'" + key + "' must be a string");
    return v.get<std::string>();
  }

  std::optional<bool> boolean(const std::string& key) {
    if (!has(key)) return std::nullopt;
    const json& v = doc_.at(key);
    if (!v.is_boolean()) fail("'" + key + "' must be a boolean");
    return v.get<bool>();
  }

  std::optional<std::vector<double>> numbers(const std::string& key, bool nonempty = true) {
    if (!has(key)) return std::nullopt;
    const json& v = doc_.at(key);
    if (!v.is_array() || (nonempty && v.empty())) fail("'" + key + "' must be a non-empty array");
    std::vector<double> out;
    for (const json& e : v) {
      if (!e.is_number() || !std::isfinite(e.get<double>())) {
        fail("'" + key + "' must contain finite numbers");
      }
      out.push_back(e.get<double>());
    }
    return out;
  }

  std::optional<std::vector<std::size_t>> counts(const std::string& key) {
    if (!has(key)) return std::nullopt;
    const json& v = doc_.at(key);
    if (!v.is_array() || v.empty()) fail("'" + key + "' must be a non-empty array");
    std::vector<std::size_t> out;
    for (const json& e : v) {
      if (!e.is_number_unsigned() || e.get<std::uint64_t>() == 0) {
        fail("'" + key + "' must contain positive integers");
      }
      out.push_back(e.get<std::size_t>());
    }
    return out;
  }

  std::optional<std::vector<std::string>> strings(const std::string& key) {
    if (!has(key)) return std::nullopt;
    const json& v = doc_.at(key);
    if (!v.is_array()) fail("'" + key + "' must be an array of strings");
    std::vector<std::string> out;
    for (const json& e : v) {
      if (!e.is_string()) fail("'" + key + "' must be an array of strings");
      out.push_back(e.get<std::string>());
    }
    return out;
  }

  void finish() const {
    for (const auto& [key, value] : doc_.items()) {
      if (!seen_.count(key)) fail("unknown key '" + key + "'");
    }
  }

 private:
  const json& doc_;
  std::string where_;
  std::set<std::string> seen_;
};

OperatorKind parse_kind(Block& b, const std::string& key, const std::string& name) {
  try {
    return operator_kind_from_string(name);
  } catch (const InvalidArgument&) {
    b.fail("'" + key + "' must be one of linear_laplacian, p_laplacian, zero");
  }
}

InlineProblemSpec parse_inline(const json& doc) {
  Block b(doc, "problem.inline");
  InlineProblemSpec s;
  if (auto v = b.string("name")) s.name = *v;
  if (auto v = b.numbers("P")) s.P = *v;
  if (auto v = b.numbers("Q")) s.Q = *v;
  if (auto v = b.numbers("control_modes", false)) s.control_modes = *v;
  if (auto v = b.numbers("disturbance_modes", false)) s.disturbance_modes = *v;
  if (auto v = b.numbers("x_star_modes", false)) s.x_star_modes = *v;
  if (auto v = b.number("state_gain", -1e6, 1e6)) s.state_gain = *v;
  if (auto v = b.number("delay_gain", -1e6, 1e6)) s.delay_gain = *v;
  if (auto v = b.number("state_weight", -1e6, 1e6)) s.state_weight = *v;
  if (auto v = b.number("delay_weight", -1e6, 1e6)) s.delay_weight = *v;
  if (auto v = b.number("p_weight", -1e6, 1e6)) s.p_weight = *v;
  if (auto v = b.number("p_abs_weight", -1e6, 1e6)) s.p_abs_weight = *v;
  if (auto v = b.number("q_weight", -1e6, 1e6)) s.q_weight = *v;
  if (auto v = b.number("q_abs_weight", -1e6, 1e6)) s.q_abs_weight = *v;
  if (auto v = b.number("terminal_weight", -1e6, 1e6)) s.terminal_weight = *v;
  b.finish();
  if (s.P.size() > 16 || s.Q.size() > 16) b.fail("control sets are limited to 16 entries");
  return s;
}

const char* const kSchema = R"json({
  "$schema": "https://json-schema.org/draft/2020-12/schema",
  "$id": "pathhj-config.schema.json",
  "title": "pathhj experiment configuration",
  "type": "object",
  "additionalProperties": false,
  "required": ["problem", "bundle"],
  "properties": {
    "discretization": {
      "type": "object",
      "additionalProperties": false,
      "properties": {
        "n": {"type": "integer", "minimum": 2, "maximum": 256},
        "dt": {"type": "number", "exclusiveMinimum": 0},
        "domain_length": {"type": "number", "exclusiveMinimum": 0},
        "T": {"type": "number", "exclusiveMinimum": 0}
      }
    },
    "operator": {
      "type": "object",
      "additionalProperties": false,
      "properties": {
        "kind": {"enum": ["linear_laplacian", "p_laplacian", "zero"]},
        "p": {"type": "number", "minimum": 2, "maximum": 8}
      }
    },
    "problem": {
      "type": "object",
      "additionalProperties": false,
      "oneOf": [{"required": ["preset"]}, {"required": ["inline"]}],
      "properties": {
        "preset": {"enum": ["heat_control", "heat_delay", "plaplace", "bilinear_game"]},
        "inline": {
          "type": "object",
          "additionalProperties": false,
          "properties": {
            "name": {"type": "string"},
            "P": {"type": "array", "items": {"type": "number"}, "minItems": 1, "maxItems": 16},
            "Q": {"type": "array", "items": {"type": "number"}, "minItems": 1, "maxItems": 16},
            "control_modes": {"type": "array", "items": {"type": "number"}},
            "disturbance_modes": {"type": "array", "items": {"type": "number"}},
            "x_star_modes": {"type": "array", "items": {"type": "number"}},
            "state_gain": {"type": "number"},
            "delay_gain": {"type": "number"},
            "state_weight": {"type": "number"},
            "delay_weight": {"type": "number"},
            "p_weight": {"type": "number"},
            "p_abs_weight": {"type": "number"},
            "q_weight": {"type": "number"},
            "q_abs_weight": {"type": "number"},
            "terminal_weight": {"type": "number"}
          }
        },
        "control_intervals": {"type": "integer", "minimum": 1, "maximum": 64},
        "Lf": {"type": "number", "exclusiveMinimum": 0},
        "tau": {"type": "number", "minimum": 0},
        "kappa": {"type": "number", "exclusiveMinimum": 0}
      }
    },
    "bundle": {
      "type": "object",
      "additionalProperties": false,
      "required": ["seed"],
      "properties": {
        "L": {"type": "number", "minimum": 0},
        "size": {"type": "integer", "minimum": 1, "maximum": 4096},
        "modes": {"type": "integer", "minimum": 1, "maximum": 64},
        "seed": {"type": "integer", "minimum": 0}
      }
    },
    "verification": {
      "type": "object",
      "additionalProperties": false,
      "properties": {
        "suites": {
          "type": "array",
          "items": {"enum": ["operators", "calculus", "minimax", "control", "game"]}
        },
        "tolerances": {
          "type": "object",
          "additionalProperties": false,
          "properties": {
            "dpp": {"type": "number", "exclusiveMinimum": 0},
            "isaacs": {"type": "number", "exclusiveMinimum": 0},
            "order": {"type": "number", "exclusiveMinimum": 0},
            "kappa_c": {"type": "number", "exclusiveMinimum": 0},
            "kappa_d": {"type": "number", "exclusiveMinimum": 0},
            "nu_fd": {"type": "number", "exclusiveMinimum": 0},
            "operator_slack": {"type": "number", "minimum": 0}
          }
        },
        "eps": {"type": "array", "items": {"type": "number", "exclusiveMinimum": 0}, "minItems": 1},
        "partitions": {"type": "array", "items": {"type": "integer", "minimum": 1}, "minItems": 1},
        "random_pairs": {"type": "integer", "minimum": 1, "maximum": 100000},
        "z_random": {"type": "integer", "minimum": 0, "maximum": 1024},
        "dt_ladder": {"type": "array", "items": {"type": "integer", "minimum": 1}, "minItems": 2}
      }
    },
    "output": {
      "type": "object",
      "additionalProperties": false,
      "properties": {
        "directory": {"type": "string"},
        "formats": {"type": "array", "items": {"enum": ["csv", "json"]}}
      }
    }
  }
})json";

}  // namespace

const json& config_schema() {
  static const json schema = json::parse(kSchema);
  return schema;
}

ExperimentConfig parse_config(const json& doc) {
  ExperimentConfig c;
  Block root(doc, "config");

  if (root.has("discretization")) {
    Block b(root.raw("discretization"), "discretization");
    if (auto v = b.integer("n", 2, 256)) c.discretization.n = static_cast<int>(*v);
    c.discretization.dt = b.number("dt", 0.0, 1e6, true);
    c.discretization.domain_length = b.number("domain_length", 0.0, 1e6, true);
    c.discretization.T = b.number("T", 0.0, 1e6, true);
    b.finish();
  }

  if (root.has("operator")) {
    Block b(root.raw("operator"), "operator");
    if (auto v = b.string("kind")) c.op.kind = parse_kind(b, "kind", *v);
    c.op.p = b.number("p", 2.0, 8.0);
    b.finish();
  }

  if (!root.has("problem")) root.fail("missing block 'problem'");
  {
    Block b(root.raw("problem"), "problem");
    c.preset = b.string("preset");
    if (b.has("inline")) c.inline_problem = parse_inline(b.raw("inline"));
    if (c.preset.has_value() == c.inline_problem.has_value()) {
      b.fail("exactly one of 'preset' and 'inline' is required");
    }
    if (c.preset) {
      const auto names = preset_names();
      if (std::find(names.begin(), names.end(), *c.preset) == names.end()) {
        b.fail("unknown preset '" + *c.preset + "'");
      }
    }
    if (auto v = b.integer("control_intervals", 1, 64)) c.control_intervals = *v;
    c.Lf = b.number("Lf", 0.0, 1e6, true);
    c.tau = b.number("tau", 0.0, 1e6);
    if (auto v = b.number("kappa", 0.0, 1e6, true)) c.kappa = *v;
    b.finish();
  }

  if (!root.has("bundle")) root.fail("missing block 'bundle' (seeds are mandatory)");
  {
    Block b(root.raw("bundle"), "bundle");
    if (auto v = b.number("L", 0.0, 1e6)) c.bundle.L = *v;
    if (auto v = b.integer("size", 1, 4096)) c.bundle.size = *v;
    if (auto v = b.integer("modes", 1, 64)) c.bundle.modes = static_cast<int>(*v);
    auto seed = b.integer("seed", 0, UINT64_MAX);
    if (!seed) b.fail("'seed' is mandatory");
    c.bundle.seed = *seed;
    b.finish();
  }

  if (root.has("verification")) {
    Block b(root.raw("verification"), "verification");
    if (auto v = b.strings("suites")) {
      static const std::set<std::string> known{"operators", "calculus", "minimax", "control",
                                               "game"};
      for (const auto& s : *v) {
        if (!known.count(s)) b.fail("unknown suite '" + s + "'");
      }
      c.verification.suites = *v;
    }
    if (b.has("tolerances")) {
      Block t(b.raw("tolerances"), "verification.tolerances");
      Tolerances& tol = c.verification.tolerances;
      if (auto v = t.number("dpp", 0.0, 1.0, true)) tol.dpp = *v;
      if (auto v = t.number("isaacs", 0.0, 1.0, true)) tol.isaacs = *v;
      if (auto v = t.number("order", 0.0, 10.0, true)) tol.order = *v;
      if (auto v = t.number("kappa_c", 0.0, 1e6, true)) tol.kappa_c = *v;
      if (auto v = t.number("kappa_d", 0.0, 1e6, true)) tol.kappa_d = *v;
      if (auto v = t.number("nu_fd", 0.0, 1.0, true)) tol.nu_fd = *v;
      if (auto v = t.number("operator_slack", 0.0, 1.0)) tol.operator_slack = *v;
      t.finish();
    }
    if (auto v = b.numbers("eps")) {
      for (double e : *v) {
        if (!(e > 0.0)) b.fail("'eps' entries must be positive");
      }
      c.verification.eps = *v;
    }
    if (auto v = b.counts("partitions")) c.verification.partitions = *v;
    if (auto v = b.integer("random_pairs", 1, 100000)) c.verification.random_pairs = *v;
    if (auto v = b.integer("z_random", 0, 1024)) c.verification.z_random = *v;
    if (auto v = b.counts("dt_ladder")) {
      if (v->size() < 2) b.fail("'dt_ladder' needs at least two entries");
      c.verification.dt_ladder = *v;
    }
    b.finish();
  }

  if (root.has("output")) {
    Block b(root.raw("output"), "output");
    if (auto v = b.string("directory")) c.output.directory = *v;
    if (auto v = b.strings("formats")) {
      c.output.csv = c.output.json = false;
      for (const auto& f : *v) {
        if (f == "csv") {
          c.output.csv = true;
        } else if (f == "json") {
          c.output.json = true;
        } else {
          b.fail("unknown format '" + f + "'");
        }
      }
    }
    b.finish();
  }

  root.finish();
  c.source = doc;
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("cannot open config '" + path + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw SchemaError("config '" + path + "' is not valid JSON: " + e.what());
  }
  return parse_config(doc);
}

namespace {

std::size_t steps_for(const ExperimentConfig& c, double T, std::size_t fallback) {
  if (!c.discretization.dt) return fallback;
  const double ratio = T / *c.discretization.dt;
  const double rounded = std::round(ratio);
  if (rounded < 1.0 || std::abs(ratio - rounded) > 1e-9 * std::max(1.0, ratio)) {
    throw SchemaError("discretization: T / dt must be a positive integer");
  }
  return static_cast<std::size_t>(rounded);
}

}  // namespace

ControlProblem build_problem(const ExperimentConfig& c) {
  try {
    if (c.inline_problem) {
      InlineProblemSpec s = *c.inline_problem;
      if (c.discretization.n) s.n = *c.discretization.n;
      if (c.discretization.domain_length) s.domain_length = *c.discretization.domain_length;
      if (c.discretization.T) s.T = *c.discretization.T;
      s.steps = steps_for(c, s.T, s.steps);
      if (c.op.kind) s.op_kind = *c.op.kind;
      if (c.op.p) s.p_exponent = *c.op.p;
      if (s.op_kind != OperatorKind::p_laplacian) {
        if (c.op.p && *c.op.p != 2.0) throw SchemaError("operator: p != 2 needs kind p_laplacian");
        s.p_exponent = 2.0;
      }
      if (c.control_intervals) s.control_intervals = *c.control_intervals;
      if (c.Lf) s.Lf = *c.Lf;
      if (c.tau) s.tau = *c.tau;
      s.kappa = c.kappa;
      return make_inline_problem(s);
    }
    PresetOptions o;
    o.name = *c.preset;
    const ControlProblem defaults = make_preset(o.name);
    if (c.op.kind && *c.op.kind != defaults.op.kind) {
      throw SchemaError(std::string("operator: kind ") + to_string(*c.op.kind) +
                        " does not match preset " + o.name + " (" +
                        to_string(defaults.op.kind) + ")");
    }
    if (c.op.p) {
      if (defaults.op.kind != OperatorKind::p_laplacian && *c.op.p != 2.0) {
        throw SchemaError("operator: p != 2 needs kind p_laplacian");
      }
      o.p_exponent = *c.op.p;
    }
    o.n = c.discretization.n.value_or(0);
    o.domain_length = c.discretization.domain_length.value_or(0.0);
    o.T = c.discretization.T.value_or(defaults.grid.T);
    o.steps = steps_for(c, o.T, c.discretization.T ? 0 : defaults.grid.steps);
    if (o.steps == 0) o.steps = defaults.grid.steps;
    o.control_intervals = c.control_intervals.value_or(0);
    o.Lf = c.Lf.value_or(0.0);
    if (c.tau) o.tau = *c.tau;
    o.kappa = c.kappa;
    return make_preset(o);
  } catch (const InvalidArgument& e) {
    throw SchemaError(std::string("config does not describe a valid problem: ") + e.what());
  }
}

std::string config_hash(const json& doc) {
  const std::string text = doc.dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace pathhj::cli
