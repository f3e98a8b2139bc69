#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "nag/schemes.hpp"

// Lyapunov functions, the per-step decrease bound, closed-form rate
// envelopes, the series budget and the tail quantities behind the
// o(1/k^3) and o(1/k^2) limits. Everything here is a pure function of a
// Trace.
namespace nag {

// Absolute tolerance on algebraic identities and on the Lyapunov decrease bound.
inline constexpr double kIdentityTolerance = 1e-10;
// Absolute tolerance on inequalities that hold strictly in exact arithmetic.
inline constexpr double kInequalityTolerance = 1e-12;
// Relative tolerance on agreement between Lyapunov forms.
inline constexpr double kLyapunovFormTolerance = 1e-10;

enum class LyapunovForm { gradient_correction, implicit_velocity, unified };
std::string form_id(LyapunovForm form);
inline constexpr LyapunovForm kAllForms[] = {LyapunovForm::gradient_correction, LyapunovForm::implicit_velocity,
                                             LyapunovForm::unified};

// E(k) in the requested form. All forms share the potential
// s k (k+r) (f(y_{k-1}) - f*) and differ in the mixed term:
//   gradient_correction  |sqrt(s) k v_{k-1} + r (y_k - x*) + s k grad f(y_{k-1})|^2 / 2
//   implicit_velocity    |sqrt(s) (k-1) v_k + r (x_k - x*)|^2 / 2
//   unified              |k (y_k - x_k) + r (y_k - x*)|^2 / 2
// Velocities come from the trace when the scheme carries them and from
// differences of iterates otherwise. E(0) = r^2 |x0 - x*|^2 / 2.
double lyapunov_value(const Trace& trace, std::size_t k, LyapunovForm form);

struct LyapunovSeries {
  std::vector<double> gradient_correction;
  std::vector<double> implicit_velocity;
  std::vector<double> unified;
  std::vector<double> decrease_slack;  // slack of E(k+1) - E(k); NaN at the last index

  const std::vector<double>& form(LyapunovForm f) const;
};

LyapunovSeries lyapunov_series(const Trace& trace);

// RHS - (E(k+1) - E(k)) with
//   RHS = -(s^2 k (k+r) / 2) |grad f(y_{k-1})|^2 - s [(r-2) k + r^2 - r - 1] (f(y_k) - f*).
// The first term is 0 at k = 0. Passes iff >= -kIdentityTolerance.
double verify_monotone_bound(const Trace& trace, std::size_t k, LyapunovForm form = LyapunovForm::unified);

enum class Sequence { y, x };

// y: r^2 d0^2 / (2 s (k+1)(k+r+1)), k >= 0.   x: r^2 d0^2 / (2 s k (k+r)), k >= 1.
double envelope_objective(std::size_t k, double r, double s, double d0, Sequence seq);

// 6 r^2 d0^2 / (s^2 (k+1)(k+2)(2k+3r+3)). For integral r it first checks
// sum_{i=0}^{k} (i+1)(i+r+1) == (k+1)(k+2)(2k+3r+3)/6 exactly and throws
// std::logic_error on mismatch.
double envelope_gradnorm(std::size_t k, double r, double s, double d0);

// Exact integer evaluation of both sides of the weighted index identity.
struct IndexSumIdentity {
  std::int64_t direct_sum = 0;
  std::int64_t closed_form = 0;
  bool holds() const noexcept { return direct_sum == closed_form; }
};
IndexSumIdentity index_sum_identity(std::int64_t k, std::int64_t r);

struct EnvelopeEntry {
  std::size_t k = 0;
  double bound = 0.0;
  double measured = 0.0;
  bool satisfied = false;
};

enum class EnvelopeQuantity { objective_y, objective_x, min_grad_sq_y };
std::string quantity_id(EnvelopeQuantity q);

struct EnvelopeReport {
  EnvelopeQuantity quantity = EnvelopeQuantity::objective_y;
  std::vector<EnvelopeEntry> entries;
  double d0 = 0.0;
  double r = 0.0;
  double s = 0.0;

  bool all_satisfied() const;
  // min over entries of bound - measured, and where it occurs.
  double worst_slack() const;
  std::size_t worst_k() const;
};

// Throws MissingMinimizerError when the trace has no d0.
EnvelopeReport envelope_report(const Trace& trace, EnvelopeQuantity quantity);

struct SeriesBudget {
  double lhs = 0.0;
  double budget = 0.0;
  bool satisfied() const noexcept { return lhs <= budget + kIdentityTolerance; }
};

// Truncated sum over i = 0..K of
//   s^2 (i+1)(i+r+1) |grad f(y_i)|^2 / 2 + s [(r-2) i + r^2 - r - 1] (f(y_i) - f*)
// against r^2 d0^2 / 2.
SeriesBudget series_budget(const Trace& trace, std::size_t K);
// lhs for every K at once.
std::vector<double> series_budget_profile(const Trace& trace);

struct TailMetrics {
  double k3_min_grad_sq = 0.0;  // k^3 min_{i<=k} |grad f(y_i)|^2
  double k2_min_gap = 0.0;      // k^2 min_{i<=k} (f(y_i) - f*)
  double tail_sum = 0.0;        // sum_{i=floor(k/2)}^{k} s^2 (i+1)(i+r+1) |grad f(y_i)|^2
};

TailMetrics tail_scaled_metrics(const Trace& trace, std::size_t k);
std::vector<TailMetrics> tail_profile(const Trace& trace);

// f(y_k) - (s - L s^2 / 2) |grad f(y_k)|^2 - f(x_{k+1}); >= 0 when s <= 1/L.
double descent_fact_slack(const Trace& trace, std::size_t k);
// |grad f(y_k)| - |grad f(x_{k+1})|; >= 0 when s <= 1/L and f is C^2.
double gradient_nonexpansion_slack(const Trace& trace, std::size_t k);
// max_i |x_k - (y_{k-1} - s grad f(y_{k-1}))|_i for k >= 1.
double interleaving_residual(const Trace& trace, std::size_t k);

}  // namespace nag
