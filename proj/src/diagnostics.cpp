#include "nag/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "nag/errors.hpp"
#include "nag/kernels.hpp"

namespace nag {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

const Vec& require_minimizer(const Trace& trace) {
  if (!trace.minimizer || !trace.d0)
    throw MissingMinimizerError("objective '" + trace.objective_name + "' has no known minimizer");
  return *trace.minimizer;
}

void require_index(const Trace& trace, std::size_t k) {
  if (k >= trace.size())
    throw std::out_of_range("trace index " + std::to_string(k) + " beyond last record " +
                            std::to_string(trace.size() == 0 ? 0 : trace.size() - 1));
}

double gradnorm_bound(std::size_t k, double r, double s, double d0) {
  const double kk = static_cast<double>(k);
  return 6.0 * r * r * d0 * d0 / (s * s * (kk + 1.0) * (kk + 2.0) * (2.0 * kk + 3.0 * r + 3.0));
}

bool integral(double r) { return std::floor(r) == r && r < 1e9; }

double series_term(const Trace& trace, std::size_t i) {
  const double s = trace.config.s;
  const double r = trace.config.r;
  const double ii = static_cast<double>(i);
  const TraceRecord& rec = trace[i];
  return 0.5 * s * s * (ii + 1.0) * (ii + r + 1.0) * rec.grad_sq_y +
         s * ((r - 2.0) * ii + r * r - r - 1.0) * rec.gap_y;
}

double tail_weight(const Trace& trace, std::size_t i) {
  const double s = trace.config.s;
  const double ii = static_cast<double>(i);
  return s * s * (ii + 1.0) * (ii + trace.config.r + 1.0) * trace[i].grad_sq_y;
}

}  // namespace

std::string form_id(LyapunovForm form) {
  switch (form) {
    case LyapunovForm::gradient_correction: return "gc";
    case LyapunovForm::implicit_velocity: return "iv";
    case LyapunovForm::unified: return "unified";
  }
  return "?";
}

double lyapunov_value(const Trace& trace, std::size_t k, LyapunovForm form) {
  const Vec& xs = require_minimizer(trace);
  require_index(trace, k);
  const double r = trace.config.r;
  const double s = trace.config.s;
  const double rs = std::sqrt(s);
  if (k == 0) return 0.5 * r * r * (*trace.d0) * (*trace.d0);

  const TraceRecord& cur = trace[k];
  const TraceRecord& prev = trace[k - 1];
  const double kk = static_cast<double>(k);
  const std::size_t d = cur.x.size();
  Vec mixed(d);

  switch (form) {
    case LyapunovForm::gradient_correction: {
      Vec v(d);
      if (trace.config.scheme == SchemeKind::gradient_correction)
        v = cur.v;
      else
        kernels::axpby(1.0 / rs, cur.y, -1.0 / rs, prev.y, v);
      // sqrt(s) k v_{k-1} + r (y_k - x*) + s k grad f(y_{k-1})
      kernels::axpbypcz(rs * kk, v, r, cur.y, s * kk, prev.g_y, mixed);
      kernels::axpy(-r, xs, mixed);
      break;
    }
    case LyapunovForm::implicit_velocity: {
      Vec v(d);
      if (trace.config.scheme == SchemeKind::gradient_correction)
        kernels::axpby(1.0 / rs, cur.x, -1.0 / rs, prev.x, v);
      else
        v = cur.v;
      // sqrt(s) (k-1) v_k + r (x_k - x*)
      kernels::axpbypcz(rs * (kk - 1.0), v, r, cur.x, -r, xs, mixed);
      break;
    }
    case LyapunovForm::unified: {
      // k (y_k - x_k) + r (y_k - x*)
      Vec gap(d);
      kernels::axpby(1.0, cur.y, -1.0, cur.x, gap);
      kernels::axpbypcz(kk, gap, r, cur.y, -r, xs, mixed);
      break;
    }
  }
  const double potential = s * kk * (kk + r) * prev.gap_y;
  return potential + 0.5 * kernels::norm_sq(mixed);
}

const std::vector<double>& LyapunovSeries::form(LyapunovForm f) const {
  switch (f) {
    case LyapunovForm::gradient_correction: return gradient_correction;
    case LyapunovForm::implicit_velocity: return implicit_velocity;
    case LyapunovForm::unified: break;
  }
  return unified;
}

LyapunovSeries lyapunov_series(const Trace& trace) {
  require_minimizer(trace);
  LyapunovSeries out;
  const std::size_t n = trace.size();
  out.gradient_correction.resize(n);
  out.implicit_velocity.resize(n);
  out.unified.resize(n);
  out.decrease_slack.assign(n, kNaN);
  for (std::size_t k = 0; k < n; ++k) {
    out.gradient_correction[k] = lyapunov_value(trace, k, LyapunovForm::gradient_correction);
    out.implicit_velocity[k] = lyapunov_value(trace, k, LyapunovForm::implicit_velocity);
    out.unified[k] = lyapunov_value(trace, k, LyapunovForm::unified);
  }
  for (std::size_t k = 0; k + 1 < n; ++k) out.decrease_slack[k] = verify_monotone_bound(trace, k);
  return out;
}

double verify_monotone_bound(const Trace& trace, std::size_t k, LyapunovForm form) {
  require_minimizer(trace);
  require_index(trace, k + 1);
  const double r = trace.config.r;
  const double s = trace.config.s;
  const double kk = static_cast<double>(k);
  const double delta = lyapunov_value(trace, k + 1, form) - lyapunov_value(trace, k, form);
  double rhs = -s * ((r - 2.0) * kk + r * r - r - 1.0) * trace[k].gap_y;
  if (k > 0) rhs -= 0.5 * s * s * kk * (kk + r) * trace[k - 1].grad_sq_y;
  return rhs - delta;
}

double envelope_objective(std::size_t k, double r, double s, double d0, Sequence seq) {
  const double kk = static_cast<double>(k);
  if (seq == Sequence::y) return r * r * d0 * d0 / (2.0 * s * (kk + 1.0) * (kk + r + 1.0));
  if (k == 0) throw std::domain_error("x-sequence envelope is undefined at k = 0");
  return r * r * d0 * d0 / (2.0 * s * kk * (kk + r));
}

IndexSumIdentity index_sum_identity(std::int64_t k, std::int64_t r) {
  IndexSumIdentity out;
  for (std::int64_t i = 0; i <= k; ++i) out.direct_sum += (i + 1) * (i + r + 1);
  const std::int64_t num = (k + 1) * (k + 2) * (2 * k + 3 * r + 3);
  out.closed_form = num % 6 == 0 ? num / 6 : -1;
  return out;
}

double envelope_gradnorm(std::size_t k, double r, double s, double d0) {
  if (integral(r)) {
    const auto id = index_sum_identity(static_cast<std::int64_t>(k), static_cast<std::int64_t>(r));
    if (!id.holds())
      throw std::logic_error("weighted index identity failed at k=" + std::to_string(k) + ": " +
                             std::to_string(id.direct_sum) + " != " + std::to_string(id.closed_form));
  }
  return gradnorm_bound(k, r, s, d0);
}

std::string quantity_id(EnvelopeQuantity q) {
  switch (q) {
    case EnvelopeQuantity::objective_y: return "objective_y";
    case EnvelopeQuantity::objective_x: return "objective_x";
    case EnvelopeQuantity::min_grad_sq_y: return "min_grad_sq_y";
  }
  return "?";
}

bool EnvelopeReport::all_satisfied() const {
  return std::all_of(entries.begin(), entries.end(), [](const EnvelopeEntry& e) { return e.satisfied; });
}

double EnvelopeReport::worst_slack() const {
  double worst = std::numeric_limits<double>::infinity();
  for (const auto& e : entries) worst = std::min(worst, e.bound - e.measured);
  return worst;
}

std::size_t EnvelopeReport::worst_k() const {
  std::size_t at = 0;
  double worst = std::numeric_limits<double>::infinity();
  for (const auto& e : entries) {
    if (e.bound - e.measured < worst) {
      worst = e.bound - e.measured;
      at = e.k;
    }
  }
  return at;
}

EnvelopeReport envelope_report(const Trace& trace, EnvelopeQuantity quantity) {
  require_minimizer(trace);
  EnvelopeReport rep;
  rep.quantity = quantity;
  rep.d0 = *trace.d0;
  rep.r = trace.config.r;
  rep.s = trace.config.s;
  const bool check_identity = integral(rep.r);
  const auto ri = static_cast<std::int64_t>(rep.r);
  std::int64_t running = 0;
  for (std::size_t k = 0; k < trace.size(); ++k) {
    EnvelopeEntry e;
    e.k = k;
    switch (quantity) {
      case EnvelopeQuantity::objective_y:
        e.bound = envelope_objective(k, rep.r, rep.s, rep.d0, Sequence::y);
        e.measured = trace[k].gap_y;
        break;
      case EnvelopeQuantity::objective_x:
        if (k == 0) continue;
        e.bound = envelope_objective(k, rep.r, rep.s, rep.d0, Sequence::x);
        e.measured = trace[k].gap_x;
        break;
      case EnvelopeQuantity::min_grad_sq_y: {
        if (check_identity) {
          const auto ki = static_cast<std::int64_t>(k);
          running += (ki + 1) * (ki + ri + 1);
          const std::int64_t num = (ki + 1) * (ki + 2) * (2 * ki + 3 * ri + 3);
          if (num % 6 != 0 || running != num / 6)
            throw std::logic_error("weighted index identity failed at k=" + std::to_string(k));
        }
        e.bound = gradnorm_bound(k, rep.r, rep.s, rep.d0);
        e.measured = trace[k].min_grad_sq;
        break;
      }
    }
    e.satisfied = e.measured <= e.bound + kInequalityTolerance;
    rep.entries.push_back(e);
  }
  return rep;
}

SeriesBudget series_budget(const Trace& trace, std::size_t K) {
  require_minimizer(trace);
  require_index(trace, K);
  SeriesBudget out;
  for (std::size_t i = 0; i <= K; ++i) out.lhs += series_term(trace, i);
  const double r = trace.config.r;
  out.budget = 0.5 * r * r * (*trace.d0) * (*trace.d0);
  return out;
}

std::vector<double> series_budget_profile(const Trace& trace) {
  require_minimizer(trace);
  std::vector<double> out(trace.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < trace.size(); ++i) {
    acc += series_term(trace, i);
    out[i] = acc;
  }
  return out;
}

TailMetrics tail_scaled_metrics(const Trace& trace, std::size_t k) {
  require_index(trace, k);
  const double kk = static_cast<double>(k);
  TailMetrics m;
  m.k3_min_grad_sq = kk * kk * kk * trace[k].min_grad_sq;
  m.k2_min_gap = kk * kk * trace[k].min_gap;
  for (std::size_t i = k / 2; i <= k; ++i) m.tail_sum += tail_weight(trace, i);
  return m;
}

std::vector<TailMetrics> tail_profile(const Trace& trace) {
  const std::size_t n = trace.size();
  std::vector<double> prefix(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + tail_weight(trace, i);
  std::vector<TailMetrics> out(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double kk = static_cast<double>(k);
    out[k].k3_min_grad_sq = kk * kk * kk * trace[k].min_grad_sq;
    out[k].k2_min_gap = kk * kk * trace[k].min_gap;
    out[k].tail_sum = prefix[k + 1] - prefix[k / 2];
  }
  return out;
}

double descent_fact_slack(const Trace& trace, std::size_t k) {
  require_index(trace, k + 1);
  const double s = trace.config.s;
  const double decrease = (s - 0.5 * trace.lipschitz * s * s) * trace[k].grad_sq_y;
  return trace[k].f_y - decrease - trace[k + 1].f_x;
}

double gradient_nonexpansion_slack(const Trace& trace, std::size_t k) {
  require_index(trace, k + 1);
  return std::sqrt(trace[k].grad_sq_y) - std::sqrt(trace[k + 1].grad_sq_x);
}

double interleaving_residual(const Trace& trace, std::size_t k) {
  if (k == 0) throw std::domain_error("interleaving identity starts at k = 1");
  require_index(trace, k);
  const TraceRecord& cur = trace[k];
  const TraceRecord& prev = trace[k - 1];
  Vec expected(cur.x.size());
  kernels::axpby(1.0, prev.y, -trace.config.s, prev.g_y, expected);
  double worst = 0.0;
  for (std::size_t i = 0; i < expected.size(); ++i) worst = std::max(worst, std::abs(cur.x[i] - expected[i]));
  return worst;
}

}  // namespace nag
