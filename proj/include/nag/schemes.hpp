#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "nag/objectives.hpp"

// Three equivalent formulations of Nesterov's accelerated gradient method
// with momentum coefficient (k-1)/(k+r):
//
//   two_sequence         x_k = y_{k-1} - s grad f(y_{k-1})
//                        y_k = x_k + (k-1)/(k+r) (x_k - x_{k-1})
//
//   gradient_correction  single sequence in y, phase velocity
//                        v_{k-1} = (y_k - y_{k-1}) / sqrt(s)
//                        (k+r+1) v_k = k v_{k-1} - sqrt(s) [(2k+r+1) g_k - k g_{k-1}]
//                        y_{k+1} = y_k + sqrt(s) v_k
//
//   implicit_velocity    single sequence in x, phase velocity
//                        v_k = (x_k - x_{k-1}) / sqrt(s)
//                        y_k = x_k + (k-1)/(k+r) sqrt(s) v_k
//                        v_{k+1} = (k-1)/(k+r) v_k - sqrt(s) grad f(y_k)
//                        x_{k+1} = x_k + sqrt(s) v_{k+1}
//
// with x_0 = y_0. All three are seeded from one plain gradient step, where
// the momentum coefficient vanishes, and then produce the same iterates.
namespace nag {

enum class SchemeKind { two_sequence, gradient_correction, implicit_velocity };

SchemeKind parse_scheme(const std::string& id);
std::string scheme_id(SchemeKind kind);
inline constexpr SchemeKind kAllSchemes[] = {SchemeKind::two_sequence, SchemeKind::gradient_correction,
                                             SchemeKind::implicit_velocity};

struct SchemeConfig {
  double r = 2.0;
  double s = 0.0;
  SchemeKind scheme = SchemeKind::two_sequence;
  Vec x0;
  std::size_t max_iter = 0;
};

// Throws ConfigError when r < 2, s <= 0, s > 1/L, or x0 has the wrong size.
void validate(const SchemeConfig& cfg, const Objective& obj);

// Divergence guard: |x_k| above this aborts the run.
inline constexpr double kDivergenceBound = 1e12;

// Iteration state at index k. Which velocity `v` holds depends on the scheme:
//   gradient_correction: v_{k-1} = (y_k - y_{k-1}) / sqrt(s)
//   implicit_velocity and two_sequence: v_k = (x_k - x_{k-1}) / sqrt(s)
struct PhasePoint {
  std::size_t k = 0;
  Vec x;
  Vec y;
  Vec v;
  Vec y_prev;
  Vec g_y;       // grad f(y_k)
  Vec g_y_prev;  // grad f(y_{k-1})
  std::size_t grad_evals = 0;
};

// State at k = 1 from x_0 = y_0: x_1 = x_0 - s grad f(x_0), y_1 = x_1.
PhasePoint seed_state(const Objective& obj, const SchemeConfig& cfg);

PhasePoint step_two_sequence(const Objective& obj, const SchemeConfig& cfg, const PhasePoint& state);
PhasePoint step_gradient_correction(const Objective& obj, const SchemeConfig& cfg, const PhasePoint& state);
PhasePoint step_implicit_velocity(const Objective& obj, const SchemeConfig& cfg, const PhasePoint& state);
PhasePoint step(const Objective& obj, const SchemeConfig& cfg, const PhasePoint& state);

struct TraceRecord {
  std::size_t k = 0;
  Vec x;
  Vec y;
  Vec v;    // scheme velocity, see PhasePoint; zero at k = 0
  Vec g_y;  // grad f(y_k)
  double f_y = 0.0;
  double f_x = 0.0;
  double gap_y = 0.0;  // f(y_k) - f*
  double gap_x = 0.0;  // f(x_k) - f*
  double grad_sq_y = 0.0;
  double grad_sq_x = 0.0;    // |grad f(x_k)|^2, diagnostic only
  double min_grad_sq = 0.0;  // min_{i<=k} |grad f(y_i)|^2
  double min_gap = 0.0;      // min_{i<=k} f(y_i) - f*
  double cross_term = 0.0;   // <grad f(y_k), grad f(y_{k-1})>, NaN at k = 0
};

struct StepFailure {
  std::size_t k = 0;
  std::string message;
};

struct Trace {
  SchemeConfig config;
  std::string objective_name;
  double lipschitz = 0.0;
  double f_star = 0.0;
  bool f_star_known = false;
  bool f_star_estimated = false;
  std::optional<Vec> minimizer;
  std::optional<double> d0;  // |x0 - x*|
  std::vector<TraceRecord> records;
  std::optional<StepFailure> failure;
  std::size_t grad_evals = 0;  // evaluations spent by the scheme itself

  std::size_t size() const noexcept { return records.size(); }
  const TraceRecord& operator[](std::size_t k) const { return records[k]; }
};

// Runs max_iter steps of the selected scheme. Records k = 0..max_iter. A
// divergence during stepping is recorded in `failure` and the partial trace
// is returned. Configuration errors throw.
Trace run(const Objective& obj, const SchemeConfig& cfg);

// Long two-sequence reference run at s = 1/L. Returns min f seen minus 1e-12.
double estimate_optimal_value(const Objective& obj, const Vec& x0, std::size_t iterations = 1'000'000);
inline constexpr double kOptimalValueMargin = 1e-12;

// Fills the optimal value by estimation when the objective lacks one.
Objective ensure_optimal_value(const Objective& obj, const Vec& x0, std::size_t iterations = 1'000'000);

}  // namespace nag
