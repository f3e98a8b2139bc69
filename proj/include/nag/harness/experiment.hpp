#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "nag/harness/checks.hpp"
#include "nag/harness/config.hpp"
#include "nag/ode.hpp"

namespace nag::harness {

enum ExitCode : int { kExitOk = 0, kExitVerification = 1, kExitConfig = 2, kExitRuntime = 3 };

// Command-line overrides on top of a config.
struct RunOptions {
  std::optional<std::uint64_t> seed;
  std::optional<bool> csv;
  std::optional<bool> svg;
  std::optional<std::filesystem::path> out_dir;
  bool quiet = false;
  std::ostream* log = nullptr;  // progress and summary; nullptr is silent
};

struct ExperimentOutcome {
  CheckLog checks;
  std::vector<std::filesystem::path> artifacts;
  int exit_code() const { return checks.all_passed() ? kExitOk : kExitVerification; }
};

// Environment variable naming the default output directory.
inline constexpr const char* kOutputDirEnv = "NAGCERT_OUT_DIR";
inline constexpr const char* kDefaultOutputDir = "nagcert-out";

// --out, then the config, then NAGCERT_OUT_DIR, then ./nagcert-out.
std::filesystem::path resolve_output_dir(const std::optional<std::filesystem::path>& config_dir,
                                         const RunOptions& opts);

// Config errors throw ConfigError before any scheme runs.
ExperimentOutcome run_experiment(const ExperimentConfig& cfg, const RunOptions& opts);
ExperimentOutcome run_ode_experiment(const ExperimentConfig& cfg, const RunOptions& opts);

struct SchemeComparison {
  std::vector<SchemeKind> kinds;
  std::vector<double> per_k;  // max pairwise |x^a_k - x^b_k| at each k
  double max_deviation = 0.0;
};

// Throws ConfigError when fewer than two schemes are given.
SchemeComparison compare_schemes(const Objective& obj, const SchemeConfig& base, const std::vector<SchemeKind>& kinds);
SchemeComparison compare_schemes(const ExperimentConfig& cfg, const RunOptions& opts = {});

// Building blocks shared by run, ode and verify-all.
void verify_objective(const Objective& obj, std::uint64_t seed, const std::string& cell, CheckLog& log);

struct TraceChecks {
  bool step_facts = true;
  bool lyapunov = true;
  bool envelopes = true;
  bool series = true;
  bool grad_tail = false;  // k^3 min grad^2 and T(k) ratios
  bool gap_tail = false;   // k^2 min gap ratio
  bool report_gap_tail = false;  // report the gap ratio without asserting it
};
void verify_trace(const Trace& trace, const TraceChecks& which, const std::string& cell, CheckLog& log);

struct OdeChecks {
  bool gap_tail = false;  // assert t^2 inf gap ratio, otherwise report it
};
struct OdeCellResult {
  Trajectory trajectory;
  ContinuousRateReport report;
};
OdeCellResult verify_ode(const Objective& obj, const OdeConfig& cfg, const Vec& x0, const OdeChecks& which,
                         const std::string& cell, CheckLog& log);

// max_{1<=k<=K} |x_k - X(k sqrt s)| for the two-sequence scheme against the ODE.
double discrete_continuous_error(const Objective& obj, double r, double s, std::size_t K, const Vec& x0,
                                 double rtol = 1e-10, double atol = 1e-13);

// Ratio of the last value to the running maximum; 0 when the maximum is 0.
double final_to_max_ratio(const std::vector<double>& values);

struct VerifyAllOptions {
  std::optional<std::filesystem::path> out_dir;  // no files when empty
  bool csv = true;
  bool svg = false;
  std::uint64_t seed = 1;
  std::size_t iterations = 10000;
  unsigned threads = 0;  // 0 = hardware concurrency
  std::ostream* log = nullptr;
};

// Default matrix: {quadratic-2d, quadratic-ill, log-sum-exp, logistic} x r {2,3,4}
// x s_frac {1, 0.5}, all three schemes, plus the ODE cells and the
// discrete/continuous refinement check.
ExperimentOutcome verify_all(const VerifyAllOptions& opts);

}  // namespace nag::harness
