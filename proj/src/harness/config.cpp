#include "nag/harness/config.hpp"

#include <yaml-cpp/yaml.h>

#include <fstream>
#include <set>
#include <sstream>

#include "nag/errors.hpp"

namespace nag::harness {
namespace {

class Reader {
 public:
  explicit Reader(std::string source) : source_(std::move(source)) {}

  [[noreturn]] void fail(const YAML::Node& node, const std::string& msg) const {
    std::ostringstream os;
    os << source_;
    const YAML::Mark m = node.Mark();
    if (m.line >= 0) os << ':' << m.line + 1 << ':' << m.column + 1;
    os << ": " << msg;
    throw ConfigError(os.str());
  }

  void require_map(const YAML::Node& node, const std::string& what) const {
    if (!node.IsMap()) fail(node, what + " must be a mapping");
  }

  void allow_keys(const YAML::Node& node, const std::set<std::string>& keys, const std::string& what) const {
    for (const auto& kv : node) {
      const auto key = kv.first.as<std::string>();
      if (!keys.count(key)) fail(kv.first, "unknown key '" + key + "' in " + what);
    }
  }

  double real(const YAML::Node& node, const std::string& key) const {
    try {
      return node.as<double>();
    } catch (const YAML::Exception&) {
      fail(node, "'" + key + "' must be a number");
    }
  }

  std::size_t count(const YAML::Node& node, const std::string& key) const {
    try {
      const auto v = node.as<long long>();
      if (v < 0) fail(node, "'" + key + "' must be non-negative");
      return static_cast<std::size_t>(v);
    } catch (const YAML::Exception&) {
      fail(node, "'" + key + "' must be a non-negative integer");
    }
  }

  bool flag(const YAML::Node& node, const std::string& key) const {
    try {
      return node.as<bool>();
    } catch (const YAML::Exception&) {
      fail(node, "'" + key + "' must be true or false");
    }
  }

  std::string text(const YAML::Node& node, const std::string& key) const {
    if (!node.IsScalar()) fail(node, "'" + key + "' must be a string");
    return node.as<std::string>();
  }

  Vec vector(const YAML::Node& node, const std::string& key) const {
    if (!node.IsSequence()) fail(node, "'" + key + "' must be a list of numbers");
    Vec out;
    for (const auto& item : node) out.push_back(real(item, key));
    return out;
  }

  DenseMatrix matrix(const YAML::Node& node, const std::string& key) const {
    if (!node.IsSequence() || node.size() == 0) fail(node, "'" + key + "' must be a non-empty list of rows");
    std::vector<Vec> rows;
    for (const auto& row : node) {
      rows.push_back(vector(row, key));
      if (rows.back().size() != rows.front().size()) fail(row, "'" + key + "' rows differ in length");
    }
    return DenseMatrix::from_rows(rows);
  }

  // Wraps errors raised by library validation with the node's position.
  template <class F>
  auto at(const YAML::Node& node, F&& f) const {
    try {
      return f();
    } catch (const ConfigError& e) {
      fail(node, e.what());
    }
  }

 private:
  std::string source_;
};

ObjectiveSection read_objective(const Reader& rd, const YAML::Node& node, std::uint64_t seed) {
  rd.require_map(node, "objective");
  rd.allow_keys(node, {"preset", "builtin", "name", "matrix", "vector", "samples", "features", "regularization",
                       "seed", "x0"},
                "objective");
  ObjectiveSection out;
  if (node["preset"] && node["builtin"]) rd.fail(node, "objective: give either 'preset' or 'builtin', not both");
  if (node["preset"]) {
    out.preset = rd.text(node["preset"], "preset");
    out.spec = rd.at(node["preset"], [&] { return preset_spec(out.preset, seed); });
    for (const char* k : {"matrix", "vector", "samples", "features", "regularization"})
      if (node[k]) rd.fail(node[k], std::string("'") + k + "' cannot be combined with 'preset'");
  } else if (node["builtin"]) {
    out.spec.builtin = rd.at(node["builtin"], [&] { return parse_builtin(rd.text(node["builtin"], "builtin")); });
    out.spec.seed = seed;
    if (node["matrix"]) out.spec.matrix = rd.matrix(node["matrix"], "matrix");
    if (node["vector"]) out.spec.vector = rd.vector(node["vector"], "vector");
    if (node["samples"]) out.spec.samples = rd.count(node["samples"], "samples");
    if (node["features"]) out.spec.features = rd.count(node["features"], "features");
    if (node["regularization"]) out.spec.regularization = rd.real(node["regularization"], "regularization");
    if (out.spec.builtin != Builtin::logistic && out.spec.matrix.rows == 0)
      rd.fail(node, "objective: builtin '" + builtin_id(out.spec.builtin) + "' needs 'matrix'");
  } else {
    rd.fail(node, "objective: one of 'preset' or 'builtin' is required");
  }
  if (node["name"]) out.spec.name = rd.text(node["name"], "name");
  if (node["seed"]) out.seed = rd.count(node["seed"], "seed");
  out.spec.seed = out.seed.value_or(seed);
  if (node["x0"]) out.x0 = rd.vector(node["x0"], "x0");
  // Surface construction errors (non-PSD matrix, shape mismatch) with a position.
  rd.at(node, [&] { return make_objective(out.spec); });
  return out;
}

SchemeSection read_scheme(const Reader& rd, const YAML::Node& node) {
  rd.require_map(node, "scheme");
  rd.allow_keys(node, {"kinds", "r", "s", "s_frac", "x0", "max_iter"}, "scheme");
  SchemeSection out;
  if (node["kinds"]) {
    const YAML::Node& kinds = node["kinds"];
    out.kinds.clear();
    if (kinds.IsScalar()) {
      out.kinds.push_back(rd.at(kinds, [&] { return parse_scheme(kinds.as<std::string>()); }));
    } else if (kinds.IsSequence() && kinds.size() > 0) {
      for (const auto& k : kinds) out.kinds.push_back(rd.at(k, [&] { return parse_scheme(rd.text(k, "kinds")); }));
    } else {
      rd.fail(kinds, "'kinds' must be a scheme name or a non-empty list of them");
    }
  }
  if (node["r"]) out.r = rd.real(node["r"], "r");
  if (!(out.r >= 2.0)) rd.fail(node["r"], "'r' must be >= 2");
  if (node["s"] && node["s_frac"]) rd.fail(node, "scheme: give either 's' or 's_frac', not both");
  if (node["s"]) {
    out.s = rd.real(node["s"], "s");
    if (!(*out.s > 0.0)) rd.fail(node["s"], "'s' must be positive");
  }
  if (node["s_frac"]) {
    out.s_frac = rd.real(node["s_frac"], "s_frac");
    if (!(out.s_frac > 0.0)) rd.fail(node["s_frac"], "'s_frac' must be positive");
  }
  if (node["x0"]) out.x0 = rd.vector(node["x0"], "x0");
  if (node["max_iter"]) out.max_iter = rd.count(node["max_iter"], "max_iter");
  return out;
}

OdeSection read_ode(const Reader& rd, const YAML::Node& node) {
  rd.require_map(node, "ode");
  rd.allow_keys(node, {"r", "s", "rtol", "atol", "t_end", "samples", "x0"}, "ode");
  OdeSection out;
  if (node["r"]) out.r = rd.real(node["r"], "r");
  if (node["s"]) out.s = rd.real(node["s"], "s");
  if (node["rtol"]) out.rtol = rd.real(node["rtol"], "rtol");
  if (node["atol"]) out.atol = rd.real(node["atol"], "atol");
  if (node["t_end"]) out.t_end = rd.real(node["t_end"], "t_end");
  if (node["samples"]) out.samples = rd.count(node["samples"], "samples");
  if (node["x0"]) out.x0 = rd.vector(node["x0"], "x0");
  if (!(out.r >= 2.0)) rd.fail(node, "ode: 'r' must be >= 2");
  if (!(out.s > 0.0)) rd.fail(node, "ode: 's' must be positive");
  if (!(out.rtol > 0.0 && out.rtol <= 1e-3)) rd.fail(node, "ode: 'rtol' must lie in (0, 1e-3]");
  if (!(out.atol > 0.0 && out.atol <= 1e-3)) rd.fail(node, "ode: 'atol' must lie in (0, 1e-3]");
  if (out.samples < 2) rd.fail(node, "ode: 'samples' must be at least 2");
  return out;
}

}  // namespace

ExperimentConfig parse_config(std::string_view text, const std::string& source) {
  Reader rd(source);
  YAML::Node root;
  try {
    root = YAML::Load(std::string(text));
  } catch (const YAML::ParserException& e) {
    std::ostringstream os;
    os << source << ':' << e.mark.line + 1 << ':' << e.mark.column + 1 << ": " << e.msg;
    throw ConfigError(os.str());
  }
  if (!root.IsMap()) rd.fail(root, "top level must be a mapping");
  rd.allow_keys(root, {"name", "seed", "objective", "scheme", "ode", "output", "verify"}, "config");

  ExperimentConfig cfg;
  if (root["name"]) cfg.name = rd.text(root["name"], "name");
  if (root["seed"]) cfg.seed = rd.count(root["seed"], "seed");
  if (!root["objective"]) rd.fail(root, "missing 'objective' section");
  cfg.objective = read_objective(rd, root["objective"], cfg.seed);
  if (root["scheme"]) cfg.scheme = read_scheme(rd, root["scheme"]);
  if (root["ode"]) cfg.ode = read_ode(rd, root["ode"]);
  if (!cfg.scheme && !cfg.ode) rd.fail(root, "at least one of 'scheme' or 'ode' is required");

  if (const YAML::Node out = root["output"]) {
    rd.require_map(out, "output");
    rd.allow_keys(out, {"dir", "csv", "svg", "report"}, "output");
    if (out["dir"]) cfg.output_dir = rd.text(out["dir"], "dir");
    if (out["csv"]) cfg.emit.csv = rd.flag(out["csv"], "csv");
    if (out["svg"]) cfg.emit.svg = rd.flag(out["svg"], "svg");
    if (out["report"]) cfg.emit.report = rd.flag(out["report"], "report");
  }
  if (const YAML::Node v = root["verify"]) {
    rd.require_map(v, "verify");
    rd.allow_keys(v, {"objective", "step_facts", "lyapunov", "envelopes", "series", "tail_decay", "ode"}, "verify");
    auto set = [&](const char* key, bool& slot) {
      if (v[key]) slot = rd.flag(v[key], key);
    };
    set("objective", cfg.verify.objective);
    set("step_facts", cfg.verify.step_facts);
    set("lyapunov", cfg.verify.lyapunov);
    set("envelopes", cfg.verify.envelopes);
    set("series", cfg.verify.series);
    set("tail_decay", cfg.verify.tail_decay);
    set("ode", cfg.verify.ode);
  }
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path.string() + ": cannot open config");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), path.string());
}

Objective build_objective(const ExperimentConfig& cfg) {
  ObjectiveSpec spec = cfg.objective.spec;
  spec.seed = cfg.objective.seed.value_or(cfg.seed);
  return make_objective(spec);
}

Vec start_point(const ExperimentConfig& cfg, const Objective& obj, const std::optional<Vec>& section_x0) {
  Vec x0;
  if (section_x0) {
    x0 = *section_x0;
  } else if (cfg.objective.x0) {
    x0 = *cfg.objective.x0;
  } else if (!cfg.objective.preset.empty()) {
    x0 = preset_start(cfg.objective.preset, obj.dim());
  } else {
    x0 = Vec(obj.dim(), 1.0);
  }
  if (x0.size() != obj.dim())
    throw ConfigError("x0 has dimension " + std::to_string(x0.size()) + ", objective has " +
                      std::to_string(obj.dim()));
  return x0;
}

}  // namespace nag::harness
