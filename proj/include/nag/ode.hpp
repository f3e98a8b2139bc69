#pragma once

#include <cstddef>
#include <vector>

#include "nag/objectives.hpp"

// High-resolution ODE with the velocity inside the gradient argument:
//
//   X'' + (r+1)/t X' + [1 + (r+1) sqrt(s) / (2t)] grad f(X + sqrt(s) X') = 0,
//   t >= (r-1) sqrt(s) / 2,  X = x0,  X' = -sqrt(s) grad f(x0) at the start.
//
// Lyapunov and rate statements are evaluated from t0 = (r+2) sqrt(s) on,
// which keeps clear of the Lyapunov coefficient's pole at (r+1) sqrt(s).
namespace nag {

struct OdeState {
  double t = 0.0;
  Vec X;
  Vec V;
};

struct OdeConfig {
  double r = 2.0;
  double s = 1e-2;
  double rtol = 1e-9;
  double atol = 1e-12;
  double t_end = 1.0;
  std::vector<double> sample_times;  // ascending, inside [initial time, t_end]
  double max_step = 0.0;             // 0 means unlimited
};

double ode_initial_time(double r, double s);
double lyapunov_start_time(double r, double s);
double lyapunov_pole(double r, double s);

// n evenly spaced times from t_first to t_last inclusive.
std::vector<double> uniform_times(double t_first, double t_last, std::size_t n);

// Throws ConfigError on out-of-range parameters.
void validate(const OdeConfig& cfg);

struct OdeDerivative {
  Vec dX;
  Vec dV;
};

OdeDerivative ode_rhs(const Objective& obj, double r, double s, const OdeState& state);

struct Trajectory {
  double r = 0.0;
  double s = 0.0;
  std::vector<OdeState> samples;
  std::size_t accepted_steps = 0;
  std::size_t rejected_steps = 0;
  std::size_t rhs_evals = 0;
};

// Adaptive Dormand-Prince 5(4) integration with a mixed absolute/relative
// error test; samples come from cubic Hermite interpolation over accepted
// steps. Throws StiffnessError when the step falls below 1e-14 sqrt(s).
Trajectory ode_integrate(const Objective& obj, const OdeConfig& cfg, const Vec& x0);

// E(t) = t (t - r sqrt s) / (t - (r+1) sqrt s) * [t + (r+1) sqrt(s)/2] (f(X + sqrt(s) V) - f*)
//        + |t V + r (X - x*)|^2 / 2
// Throws DomainError for t <= (r+1) sqrt(s), MissingMinimizerError without x*.
double continuous_lyapunov(const Objective& obj, double r, double s, const OdeState& state);

struct ContinuousRateSample {
  double t = 0.0;
  double gap = 0.0;    // f(X + sqrt(s) V) - f*
  double lyap = 0.0;   // E(t)
  double bound = 0.0;  // E(t0) / t^2
  double t3_inf_grad_sq = 0.0;
  double t2_inf_gap = 0.0;
  bool satisfied = false;  // gap <= bound + tolerance
};

struct ContinuousRateReport {
  double t0 = 0.0;
  double e0 = 0.0;
  std::vector<ContinuousRateSample> samples;
  bool all_satisfied() const;
};

// Uses samples with t >= t0; the first of them must sit at t0.
ContinuousRateReport continuous_rate_report(const Trajectory& traj, const Objective& obj, double r, double s,
                                            double tolerance = 1e-12);

// min over consecutive samples of 10 (atol + rtol |E_i|) - (E_{i+1} - E_i).
// Non-negative iff E is nonincreasing up to ten times the integrator tolerance.
double lyapunov_monotonicity_slack(const ContinuousRateReport& report, double rtol, double atol);

}  // namespace nag
