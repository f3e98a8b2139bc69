#include "nag/schemes.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "nag/errors.hpp"
#include "nag/kernels.hpp"

namespace nag {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

bool all_finite(const Vec& v) {
  return std::all_of(v.begin(), v.end(), [](double c) { return std::isfinite(c); });
}

void guard(const PhasePoint& p) {
  if (!all_finite(p.x) || !all_finite(p.y) || !all_finite(p.v)) throw DivergenceError(p.k, "non-finite iterate");
  if (!all_finite(p.g_y)) throw DivergenceError(p.k, "non-finite gradient");
  if (std::sqrt(kernels::norm_sq(p.x)) > kDivergenceBound) throw DivergenceError(p.k, "|x_k| exceeded 1e12");
}

TraceRecord make_record(const Objective& obj, const Trace& trace, std::size_t k, const Vec& x, const Vec& y,
                        const Vec& v, const Vec& g_y) {
  TraceRecord rec;
  rec.k = k;
  rec.x = x;
  rec.y = y;
  rec.v = v;
  rec.g_y = g_y;
  rec.f_y = obj.value(y);
  rec.f_x = obj.value(x);
  rec.gap_y = trace.f_star_known ? obj.optimality_gap(y) : kNaN;
  rec.gap_x = trace.f_star_known ? obj.optimality_gap(x) : kNaN;
  rec.grad_sq_y = kernels::norm_sq(g_y);
  rec.grad_sq_x = kernels::norm_sq(obj.gradient(x));
  if (trace.records.empty()) {
    rec.min_grad_sq = rec.grad_sq_y;
    rec.min_gap = rec.gap_y;
    rec.cross_term = kNaN;
  } else {
    const TraceRecord& prev = trace.records.back();
    rec.min_grad_sq = std::min(prev.min_grad_sq, rec.grad_sq_y);
    rec.min_gap = trace.f_star_known ? std::min(prev.min_gap, rec.gap_y) : kNaN;
    rec.cross_term = kernels::dot(g_y, prev.g_y);
  }
  return rec;
}

}  // namespace

SchemeKind parse_scheme(const std::string& id) {
  if (id == "two_sequence") return SchemeKind::two_sequence;
  if (id == "gradient_correction") return SchemeKind::gradient_correction;
  if (id == "implicit_velocity") return SchemeKind::implicit_velocity;
  throw ConfigError("unknown scheme '" + id + "' (expected two_sequence, gradient_correction or implicit_velocity)");
}

std::string scheme_id(SchemeKind kind) {
  switch (kind) {
    case SchemeKind::two_sequence: return "two_sequence";
    case SchemeKind::gradient_correction: return "gradient_correction";
    case SchemeKind::implicit_velocity: return "implicit_velocity";
  }
  return "?";
}

void validate(const SchemeConfig& cfg, const Objective& obj) {
  if (!(cfg.r >= 2.0) || !std::isfinite(cfg.r)) throw ConfigError("momentum parameter r must be >= 2");
  if (!(cfg.s > 0.0) || !std::isfinite(cfg.s)) throw ConfigError("step size s must be positive");
  const double limit = 1.0 / obj.lipschitz();
  if (cfg.s > limit) {
    std::ostringstream os;
    os.precision(17);
    os << "step size s = " << cfg.s << " exceeds 1/L = " << limit << " (L = " << obj.lipschitz() << ")";
    throw ConfigError(os.str());
  }
  if (cfg.x0.size() != obj.dim())
    throw ConfigError("x0 has dimension " + std::to_string(cfg.x0.size()) + ", objective has " +
                      std::to_string(obj.dim()));
  if (!all_finite(cfg.x0)) throw ConfigError("x0 must be finite");
}

PhasePoint seed_state(const Objective& obj, const SchemeConfig& cfg) {
  validate(cfg, obj);
  const double s = cfg.s;
  const double rs = std::sqrt(s);
  PhasePoint p;
  p.k = 1;
  p.y_prev = cfg.x0;
  p.g_y_prev = obj.gradient(cfg.x0);
  p.x.resize(cfg.x0.size());
  kernels::axpby(1.0, cfg.x0, -s, p.g_y_prev, p.x);
  p.y = p.x;
  p.v.resize(cfg.x0.size());
  if (cfg.scheme == SchemeKind::gradient_correction) {
    // v_0 = -sqrt(s) grad f(y_0)
    kernels::axpby(-rs, p.g_y_prev, 0.0, p.g_y_prev, p.v);
  } else {
    // v_1 = (x_1 - x_0) / sqrt(s)
    kernels::axpby(1.0 / rs, p.x, -1.0 / rs, cfg.x0, p.v);
  }
  p.g_y = obj.gradient(p.y);
  p.grad_evals = 2;
  guard(p);
  return p;
}

PhasePoint step_two_sequence(const Objective& obj, const SchemeConfig& cfg, const PhasePoint& st) {
  const double s = cfg.s;
  const double k = static_cast<double>(st.k);
  PhasePoint next;
  next.k = st.k + 1;
  next.x.resize(st.x.size());
  kernels::axpby(1.0, st.y, -s, st.g_y, next.x);
  next.y.resize(st.x.size());
  kernels::extrapolate(next.x, st.x, k / (k + 1.0 + cfg.r), next.y);
  next.v.resize(st.x.size());
  const double rs = std::sqrt(s);
  kernels::axpby(1.0 / rs, next.x, -1.0 / rs, st.x, next.v);
  next.y_prev = st.y;
  next.g_y_prev = st.g_y;
  next.g_y = obj.gradient(next.y);
  next.grad_evals = st.grad_evals + 1;
  guard(next);
  return next;
}

PhasePoint step_gradient_correction(const Objective& obj, const SchemeConfig& cfg, const PhasePoint& st) {
  const double s = cfg.s;
  const double rs = std::sqrt(s);
  const double k = static_cast<double>(st.k);
  const double denom = k + cfg.r + 1.0;
  PhasePoint next;
  next.k = st.k + 1;
  // (k+r+1) v_k = k v_{k-1} - sqrt(s) [(2k+r+1) g_k - k g_{k-1}]
  next.v.resize(st.v.size());
  kernels::axpbypcz(k / denom, st.v, -rs * (2.0 * k + cfg.r + 1.0) / denom, st.g_y, rs * k / denom, st.g_y_prev,
                    next.v);
  next.y = st.y;
  kernels::axpy(rs, next.v, next.y);
  next.x.resize(st.x.size());
  kernels::axpby(1.0, st.y, -s, st.g_y, next.x);
  next.y_prev = st.y;
  next.g_y_prev = st.g_y;
  next.g_y = obj.gradient(next.y);
  next.grad_evals = st.grad_evals + 1;
  guard(next);
  return next;
}

PhasePoint step_implicit_velocity(const Objective& obj, const SchemeConfig& cfg, const PhasePoint& st) {
  const double rs = std::sqrt(cfg.s);
  const double k = static_cast<double>(st.k);
  PhasePoint next;
  next.k = st.k + 1;
  // v_{k+1} = v_k - (r+1)/(k+r) v_k - sqrt(s) grad f(y_k)
  next.v.resize(st.v.size());
  kernels::axpby((k - 1.0) / (k + cfg.r), st.v, -rs, st.g_y, next.v);
  next.x = st.x;
  kernels::axpy(rs, next.v, next.x);
  // y_{k+1} = x_{k+1} + k/(k+1+r) sqrt(s) v_{k+1}
  next.y.resize(st.x.size());
  kernels::axpby(1.0, next.x, k / (k + 1.0 + cfg.r) * rs, next.v, next.y);
  next.y_prev = st.y;
  next.g_y_prev = st.g_y;
  next.g_y = obj.gradient(next.y);
  next.grad_evals = st.grad_evals + 1;
  guard(next);
  return next;
}

PhasePoint step(const Objective& obj, const SchemeConfig& cfg, const PhasePoint& state) {
  switch (cfg.scheme) {
    case SchemeKind::two_sequence: return step_two_sequence(obj, cfg, state);
    case SchemeKind::gradient_correction: return step_gradient_correction(obj, cfg, state);
    case SchemeKind::implicit_velocity: return step_implicit_velocity(obj, cfg, state);
  }
  throw ConfigError("unknown scheme");
}

Trace run(const Objective& obj, const SchemeConfig& cfg) {
  validate(cfg, obj);
  Trace trace;
  trace.config = cfg;
  trace.objective_name = obj.name();
  trace.lipschitz = obj.lipschitz();
  if (obj.optimal_value()) {
    trace.f_star = *obj.optimal_value();
    trace.f_star_known = true;
    trace.f_star_estimated = obj.optimal_value_estimated();
  }
  if (obj.minimizer()) {
    trace.minimizer = obj.minimizer();
    trace.d0 = std::sqrt(kernels::dist_sq(cfg.x0, *obj.minimizer()));
  }
  trace.records.reserve(cfg.max_iter + 1);

  const Vec zero(cfg.x0.size(), 0.0);
  if (cfg.max_iter == 0) {
    trace.records.push_back(make_record(obj, trace, 0, cfg.x0, cfg.x0, zero, obj.gradient(cfg.x0)));
    trace.grad_evals = 1;
    return trace;
  }

  PhasePoint state;
  try {
    state = seed_state(obj, cfg);
  } catch (const DivergenceError& e) {
    trace.failure = StepFailure{e.k(), e.what()};
    return trace;
  }
  trace.records.push_back(make_record(obj, trace, 0, cfg.x0, cfg.x0, zero, state.g_y_prev));
  trace.records.push_back(make_record(obj, trace, 1, state.x, state.y, state.v, state.g_y));
  try {
    while (state.k < cfg.max_iter) {
      state = step(obj, cfg, state);
      trace.records.push_back(make_record(obj, trace, state.k, state.x, state.y, state.v, state.g_y));
    }
  } catch (const DivergenceError& e) {
    trace.failure = StepFailure{e.k(), e.what()};
  }
  trace.grad_evals = state.grad_evals;
  return trace;
}

double estimate_optimal_value(const Objective& obj, const Vec& x0, std::size_t iterations) {
  SchemeConfig cfg;
  cfg.r = 2.0;
  cfg.s = 1.0 / obj.lipschitz();
  cfg.scheme = SchemeKind::two_sequence;
  cfg.x0 = x0;
  cfg.max_iter = iterations;
  double best = obj.value(x0);
  PhasePoint state = seed_state(obj, cfg);
  best = std::min({best, obj.value(state.x), obj.value(state.y)});
  while (state.k < iterations) {
    state = step_two_sequence(obj, cfg, state);
    best = std::min({best, obj.value(state.x), obj.value(state.y)});
  }
  return best - kOptimalValueMargin;
}

Objective ensure_optimal_value(const Objective& obj, const Vec& x0, std::size_t iterations) {
  if (obj.optimal_value()) return obj;
  return obj.with_estimated_optimal_value(estimate_optimal_value(obj, x0, iterations));
}

}  // namespace nag
