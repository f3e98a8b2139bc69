#include "nag/ode.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "nag/errors.hpp"
#include "nag/kernels.hpp"

namespace nag {
namespace {

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

// Packed state u = [X, V].
class System {
 public:
  System(const Objective& obj, double r, double s) : obj_(obj), r_(r), rs_(std::sqrt(s)), d_(obj.dim()) {}

  void operator()(double t, const Vec& u, Vec& du) {
    ++evals;
    const double* x = u.data();
    const double* v = u.data() + d_;
    probe_.resize(d_);
    for (std::size_t i = 0; i < d_; ++i) probe_[i] = x[i] + rs_ * v[i];
    obj_.gradient(probe_, grad_);
    const double damp = (r_ + 1.0) / t;
    const double gain = 1.0 + (r_ + 1.0) * rs_ / (2.0 * t);
    for (std::size_t i = 0; i < d_; ++i) {
      du[i] = v[i];
      du[d_ + i] = -damp * v[i] - gain * grad_[i];
    }
  }

  std::size_t evals = 0;

 private:
  const Objective& obj_;
  double r_;
  double rs_;
  std::size_t d_;
  Vec probe_;
  Vec grad_{Vec(d_)};
};

double error_norm(const Vec& err, const Vec& u0, const Vec& u1, double rtol, double atol) {
  double worst = 0.0;
  for (std::size_t i = 0; i < err.size(); ++i) {
    const double sc = atol + rtol * std::max(std::abs(u0[i]), std::abs(u1[i]));
    worst = std::max(worst, std::abs(err[i]) / sc);
  }
  return worst;
}

// Cubic Hermite interpolation on [t0, t0 + h].
void hermite(double theta, double h, const Vec& u0, const Vec& f0, const Vec& u1, const Vec& f1, Vec& out) {
  const double t2 = theta * theta;
  const double t3 = t2 * theta;
  const double h00 = 2 * t3 - 3 * t2 + 1;
  const double h10 = t3 - 2 * t2 + theta;
  const double h01 = -2 * t3 + 3 * t2;
  const double h11 = t3 - t2;
  for (std::size_t i = 0; i < u0.size(); ++i)
    out[i] = h00 * u0[i] + h10 * h * f0[i] + h01 * u1[i] + h11 * h * f1[i];
}

OdeState unpack(double t, const Vec& u, std::size_t d) {
  OdeState st;
  st.t = t;
  st.X.assign(u.begin(), u.begin() + static_cast<std::ptrdiff_t>(d));
  st.V.assign(u.begin() + static_cast<std::ptrdiff_t>(d), u.end());
  return st;
}

bool finite(const Vec& u) {
  return std::all_of(u.begin(), u.end(), [](double c) { return std::isfinite(c); });
}

}  // namespace

double ode_initial_time(double r, double s) { return (r - 1.0) * std::sqrt(s) / 2.0; }
double lyapunov_start_time(double r, double s) { return (r + 2.0) * std::sqrt(s); }
double lyapunov_pole(double r, double s) { return (r + 1.0) * std::sqrt(s); }

std::vector<double> uniform_times(double t_first, double t_last, std::size_t n) {
  std::vector<double> out;
  if (n == 0) return out;
  if (n == 1) return {t_first};
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i)
    out.push_back(t_first + (t_last - t_first) * static_cast<double>(i) / static_cast<double>(n - 1));
  out.back() = t_last;
  return out;
}

void validate(const OdeConfig& cfg) {
  if (!(cfg.r >= 2.0)) throw ConfigError("ode: r must be >= 2");
  if (!(cfg.s > 0.0)) throw ConfigError("ode: s must be positive");
  if (!(cfg.rtol > 0.0 && cfg.rtol <= 1e-3)) throw ConfigError("ode: rtol must lie in (0, 1e-3]");
  if (!(cfg.atol > 0.0 && cfg.atol <= 1e-3)) throw ConfigError("ode: atol must lie in (0, 1e-3]");
  if (!(cfg.t_end > lyapunov_start_time(cfg.r, cfg.s)))
    throw ConfigError("ode: t_end must exceed (r+2) sqrt(s)");
  if (cfg.max_step < 0.0) throw ConfigError("ode: max_step must be non-negative");
  const double t_init = ode_initial_time(cfg.r, cfg.s);
  for (std::size_t i = 0; i < cfg.sample_times.size(); ++i) {
    const double t = cfg.sample_times[i];
    if (t < t_init || t > cfg.t_end) throw ConfigError("ode: sample time outside [initial time, t_end]");
    if (i > 0 && t < cfg.sample_times[i - 1]) throw ConfigError("ode: sample times must be ascending");
  }
}

OdeDerivative ode_rhs(const Objective& obj, double r, double s, const OdeState& state) {
  if (!(state.t > 0.0)) throw DomainError("ode_rhs: t must be positive");
  const std::size_t d = state.X.size();
  Vec u(2 * d), du(2 * d);
  std::copy(state.X.begin(), state.X.end(), u.begin());
  std::copy(state.V.begin(), state.V.end(), u.begin() + static_cast<std::ptrdiff_t>(d));
  System sys(obj, r, s);
  sys(state.t, u, du);
  OdeDerivative out;
  out.dX.assign(du.begin(), du.begin() + static_cast<std::ptrdiff_t>(d));
  out.dV.assign(du.begin() + static_cast<std::ptrdiff_t>(d), du.end());
  return out;
}

Trajectory ode_integrate(const Objective& obj, const OdeConfig& cfg, const Vec& x0) {
  validate(cfg);
  if (x0.size() != obj.dim()) throw ConfigError("ode: x0 has wrong dimension");
  const std::size_t d = obj.dim();
  const std::size_t n = 2 * d;
  const double rs = std::sqrt(cfg.s);
  const double h_min = 1e-14 * rs;

  Trajectory traj;
  traj.r = cfg.r;
  traj.s = cfg.s;
  traj.samples.reserve(cfg.sample_times.size());

  System sys(obj, cfg.r, cfg.s);
  double t = ode_initial_time(cfg.r, cfg.s);
  Vec u(n);
  const Vec g0 = obj.gradient(x0);
  for (std::size_t i = 0; i < d; ++i) {
    u[i] = x0[i];
    u[d + i] = -rs * g0[i];
  }

  Vec k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), tmp(n), u_new(n), err(n), dense(n);
  sys(t, u, k1);

  std::size_t next_sample = 0;
  auto emit_until = [&](double t_hi, double t_lo, double h, const Vec& ua, const Vec& fa, const Vec& ub,
                        const Vec& fb) {
    while (next_sample < cfg.sample_times.size() && cfg.sample_times[next_sample] <= t_hi) {
      const double ts = cfg.sample_times[next_sample];
      if (h > 0.0) {
        hermite((ts - t_lo) / h, h, ua, fa, ub, fb, dense);
      } else {
        dense = ua;
      }
      traj.samples.push_back(unpack(ts, dense, d));
      ++next_sample;
    }
  };
  emit_until(t, t, 0.0, u, k1, u, k1);

  // Initial step from the scaled size of u and u'.
  double h;
  {
    double d0 = 0.0, d1 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double sc = cfg.atol + cfg.rtol * std::abs(u[i]);
      d0 = std::max(d0, std::abs(u[i]) / sc);
      d1 = std::max(d1, std::abs(k1[i]) / sc);
    }
    h = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
    h = std::min(h, 0.1 * (cfg.t_end - t));
    if (cfg.max_step > 0.0) h = std::min(h, cfg.max_step);
  }

  while (t < cfg.t_end) {
    if (h < h_min) {
      std::ostringstream os;
      os.precision(17);
      os << "ode step size underflow (h = " << h << ") at t = " << t;
      throw StiffnessError(t, os.str());
    }
    if (t + h > cfg.t_end) h = cfg.t_end - t;

    for (std::size_t i = 0; i < n; ++i) tmp[i] = u[i] + h * a21 * k1[i];
    sys(t + c2 * h, tmp, k2);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = u[i] + h * (a31 * k1[i] + a32 * k2[i]);
    sys(t + c3 * h, tmp, k3);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = u[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
    sys(t + c4 * h, tmp, k4);
    for (std::size_t i = 0; i < n; ++i)
      tmp[i] = u[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
    sys(t + c5 * h, tmp, k5);
    for (std::size_t i = 0; i < n; ++i)
      tmp[i] = u[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
    sys(t + h, tmp, k6);
    for (std::size_t i = 0; i < n; ++i)
      u_new[i] = u[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
    sys(t + h, u_new, k7);
    for (std::size_t i = 0; i < n; ++i)
      err[i] = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);

    const double en = finite(u_new) && finite(k7) ? error_norm(err, u, u_new, cfg.rtol, cfg.atol)
                                                   : std::numeric_limits<double>::infinity();
    if (en <= 1.0) {
      const double t_new = (t + h >= cfg.t_end) ? cfg.t_end : t + h;
      emit_until(t_new, t, t_new - t, u, k1, u_new, k7);
      t = t_new;
      u.swap(u_new);
      k1.swap(k7);
      ++traj.accepted_steps;
      const double factor = en == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(en, -0.2), 0.2, 5.0);
      h *= factor;
    } else {
      ++traj.rejected_steps;
      const double factor = std::isfinite(en) ? std::clamp(0.9 * std::pow(en, -0.2), 0.2, 1.0) : 0.2;
      h *= factor;
    }
    if (cfg.max_step > 0.0) h = std::min(h, cfg.max_step);
  }
  traj.rhs_evals = sys.evals;
  return traj;
}

double continuous_lyapunov(const Objective& obj, double r, double s, const OdeState& state) {
  if (!obj.minimizer() || !obj.optimal_value())
    throw MissingMinimizerError("continuous Lyapunov needs the minimizer of '" + obj.name() + "'");
  const double rs = std::sqrt(s);
  const double t = state.t;
  if (!(t > lyapunov_pole(r, s))) {
    std::ostringstream os;
    os.precision(17);
    os << "continuous Lyapunov undefined at t = " << t << " <= (r+1) sqrt(s) = " << lyapunov_pole(r, s);
    throw DomainError(os.str());
  }
  const std::size_t d = state.X.size();
  Vec probe(d), mixed(d);
  kernels::axpby(1.0, state.X, rs, state.V, probe);
  const double gap = obj.optimality_gap(probe);
  const double coeff = t * (t - r * rs) / (t - (r + 1.0) * rs) * (t + (r + 1.0) * rs / 2.0);
  kernels::axpbypcz(t, state.V, r, state.X, -r, *obj.minimizer(), mixed);
  return coeff * gap + 0.5 * kernels::norm_sq(mixed);
}

bool ContinuousRateReport::all_satisfied() const {
  return std::all_of(samples.begin(), samples.end(), [](const ContinuousRateSample& s) { return s.satisfied; });
}

ContinuousRateReport continuous_rate_report(const Trajectory& traj, const Objective& obj, double r, double s,
                                            double tolerance) {
  ContinuousRateReport rep;
  rep.t0 = lyapunov_start_time(r, s);
  const double rs = std::sqrt(s);
  // Sample times are interpolated from a grid; allow a few ulps around t0.
  const double eps = 1e-12 * std::max(1.0, rep.t0);
  auto first = std::find_if(traj.samples.begin(), traj.samples.end(),
                            [&](const OdeState& st) { return st.t >= rep.t0 - eps; });
  if (first == traj.samples.end()) return rep;
  if (std::abs(first->t - rep.t0) > eps) throw DomainError("continuous_rate_report: samples must include t0");

  OdeState start = *first;
  start.t = std::max(start.t, rep.t0);
  rep.e0 = continuous_lyapunov(obj, r, s, start);

  double inf_grad = std::numeric_limits<double>::infinity();
  double inf_gap = std::numeric_limits<double>::infinity();
  Vec probe(obj.dim());
  for (auto it = first; it != traj.samples.end(); ++it) {
    ContinuousRateSample out;
    out.t = std::max(it->t, rep.t0);
    kernels::axpby(1.0, it->X, rs, it->V, probe);
    out.gap = obj.optimality_gap(probe);
    const double g2 = kernels::norm_sq(obj.gradient(probe));
    inf_grad = std::min(inf_grad, g2);
    inf_gap = std::min(inf_gap, out.gap);
    OdeState st = *it;
    st.t = out.t;
    out.lyap = continuous_lyapunov(obj, r, s, st);
    out.bound = rep.e0 / (out.t * out.t);
    out.t3_inf_grad_sq = out.t * out.t * out.t * inf_grad;
    out.t2_inf_gap = out.t * out.t * inf_gap;
    out.satisfied = out.gap <= out.bound + tolerance;
    rep.samples.push_back(out);
  }
  return rep;
}

double lyapunov_monotonicity_slack(const ContinuousRateReport& report, double rtol, double atol) {
  double worst = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i + 1 < report.samples.size(); ++i) {
    const double e_i = report.samples[i].lyap;
    const double allowance = 10.0 * (atol + rtol * std::abs(e_i));
    worst = std::min(worst, allowance - (report.samples[i + 1].lyap - e_i));
  }
  return worst;
}

}  // namespace nag
