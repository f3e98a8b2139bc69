#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "nag/objectives.hpp"
#include "nag/schemes.hpp"

// Experiment configuration loaded from YAML. The accepted layout is
// published in schema/experiment.schema.json; unknown keys are rejected.
namespace nag::harness {

struct ObjectiveSection {
  std::string preset;  // empty when a builtin is spelled out
  ObjectiveSpec spec;
  std::optional<std::uint64_t> seed;  // falls back to the global seed
  std::optional<Vec> x0;
};

struct SchemeSection {
  std::vector<SchemeKind> kinds{SchemeKind::two_sequence};
  double r = 2.0;
  std::optional<double> s;  // absolute step, wins over s_frac
  double s_frac = 1.0;      // fraction of 1/L
  std::optional<Vec> x0;
  std::size_t max_iter = 10000;
};

struct OdeSection {
  double r = 2.0;
  double s = 1e-2;
  double rtol = 1e-9;
  double atol = 1e-12;
  std::optional<double> t_end;  // default 100 sqrt(s)
  std::size_t samples = 2000;
  std::optional<Vec> x0;
};

struct EmitFlags {
  bool csv = true;
  bool svg = false;
  bool report = true;
};

struct VerifyToggles {
  bool objective = true;
  bool step_facts = true;
  bool lyapunov = true;
  bool envelopes = true;
  bool series = true;
  bool tail_decay = false;
  bool ode = true;
};

struct ExperimentConfig {
  std::string name = "experiment";
  std::uint64_t seed = 1;
  ObjectiveSection objective;
  std::optional<SchemeSection> scheme;
  std::optional<OdeSection> ode;
  std::optional<std::filesystem::path> output_dir;
  EmitFlags emit;
  VerifyToggles verify;
};

// Throws ConfigError with "<source>:<line>:<col>: message".
ExperimentConfig parse_config(std::string_view text, const std::string& source = "<config>");
ExperimentConfig load_config(const std::filesystem::path& path);

// Objective described by the config, with the seed override applied.
Objective build_objective(const ExperimentConfig& cfg);
Vec start_point(const ExperimentConfig& cfg, const Objective& obj, const std::optional<Vec>& section_x0);

}  // namespace nag::harness
