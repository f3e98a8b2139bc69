#include <doctest.h>

#include <cmath>

#include "nag/diagnostics.hpp"
#include "nag/errors.hpp"

using namespace nag;

namespace {

Trace running_trace(std::size_t iters = 6, double x0 = 1.0) {
  SchemeConfig c;
  c.r = 2.0;
  c.s = 0.5;
  c.x0 = {x0};
  c.max_iter = iters;
  return run(make_objective(preset_spec("quadratic-1d")), c);
}

}  // namespace

TEST_CASE("Lyapunov hand values in every form") {
  const Trace t = running_trace();
  for (auto form : kAllForms) {
    CAPTURE(form_id(form));
    CHECK(std::abs(lyapunov_value(t, 0, form) - 2.0) <= 1e-12);
    CHECK(std::abs(lyapunov_value(t, 1, form) - 1.25) <= 1e-12);
    CHECK(std::abs(lyapunov_value(t, 2, form) - 0.53125) <= 1e-12);
    CHECK(std::abs(lyapunov_value(t, 3, form) - 0.13964843750) <= 1e-12);
  }
}

TEST_CASE("Lyapunov forms agree whichever scheme produced the trace") {
  const Objective f = make_objective(preset_spec("quadratic-2d"));
  for (auto kind : kAllSchemes) {
    SchemeConfig c;
    c.r = 3.0;
    c.s = 0.5 / f.lipschitz();
    c.scheme = kind;
    c.x0 = preset_start("quadratic-2d", 2);
    c.max_iter = 300;
    const LyapunovSeries ls = lyapunov_series(run(f, c));
    for (std::size_t k = 0; k < ls.unified.size(); ++k) {
      const double tol = kLyapunovFormTolerance * (1.0 + ls.unified[k]);
      CHECK(std::abs(ls.gradient_correction[k] - ls.unified[k]) <= tol);
      CHECK(std::abs(ls.implicit_velocity[k] - ls.unified[k]) <= tol);
      CHECK(ls.unified[k] >= 0.0);
    }
  }
}

TEST_CASE("decrease bound hand slacks") {
  const Trace t = running_trace();
  CHECK(verify_monotone_bound(t, 1) == doctest::Approx(0.28125).epsilon(1e-12));
  CHECK(verify_monotone_bound(t, 2) == doctest::Approx(0.1328).epsilon(1e-3));
  for (std::size_t k = 0; k + 1 < t.size(); ++k) CHECK(verify_monotone_bound(t, k) >= -kIdentityTolerance);
}

TEST_CASE("stationary run has zero slack and zero metrics") {
  const Trace t = running_trace(5, 0.0);
  for (std::size_t k = 0; k + 1 < t.size(); ++k) CHECK(verify_monotone_bound(t, k) == 0.0);
  CHECK(series_budget(t, 4).lhs == 0.0);
  CHECK(series_budget(t, 4).budget == 0.0);
  const TailMetrics m = tail_scaled_metrics(t, 4);
  CHECK(m.k3_min_grad_sq == 0.0);
  CHECK(m.k2_min_gap == 0.0);
  CHECK(m.tail_sum == 0.0);
  CHECK(envelope_objective(3, 2.0, 0.5, 0.0, Sequence::y) == 0.0);
}

TEST_CASE("envelope hand values") {
  CHECK(envelope_objective(2, 2.0, 0.5, 1.0, Sequence::y) == doctest::Approx(0.26667).epsilon(1e-5));
  CHECK(envelope_objective(2, 2.0, 0.5, 1.0, Sequence::x) == doctest::Approx(0.5));
  CHECK(envelope_gradnorm(2, 2.0, 0.5, 1.0) == doctest::Approx(0.615385).epsilon(1e-6));
  CHECK(envelope_gradnorm(0, 2.0, 0.5, 1.0) == doctest::Approx(5.3333).epsilon(1e-4));
  CHECK_THROWS(envelope_objective(0, 2.0, 0.5, 1.0, Sequence::x));

  const Trace t = running_trace();
  CHECK(t[2].gap_y == doctest::Approx(0.017578125));
  CHECK(t[2].gap_x == doctest::Approx(0.03125));
  CHECK(t[2].min_grad_sq == doctest::Approx(0.03515625));
  for (auto q : {EnvelopeQuantity::objective_y, EnvelopeQuantity::objective_x, EnvelopeQuantity::min_grad_sq_y}) {
    const EnvelopeReport rep = envelope_report(t, q);
    CHECK(rep.all_satisfied());
    CHECK(rep.d0 == 1.0);
  }
}

TEST_CASE("weighted index identity") {
  const IndexSumIdentity id = index_sum_identity(2, 2);
  CHECK(id.direct_sum == 26);
  CHECK(id.closed_form == 26);
  for (std::int64_t r : {2, 3, 4, 7})
    for (std::int64_t k = 0; k <= 200; ++k) CHECK(index_sum_identity(k, r).holds());
}

TEST_CASE("series budget hand values") {
  const Trace t = running_trace();
  const SeriesBudget b2 = series_budget(t, 2);
  CHECK(b2.lhs == doctest::Approx(1.012207).epsilon(1e-6));
  CHECK(b2.budget == 2.0);
  CHECK(b2.satisfied());
  CHECK(series_budget(t, 0).lhs == doctest::Approx(0.625));
  const auto prof = series_budget_profile(t);
  for (std::size_t k = 1; k < prof.size(); ++k) CHECK(prof[k] >= prof[k - 1]);
}

TEST_CASE("tail metric hand values") {
  const Trace t = running_trace();
  CHECK(tail_scaled_metrics(t, 4).k3_min_grad_sq == doctest::Approx(0.0351563).epsilon(1e-6));
  CHECK(tail_scaled_metrics(t, 0).tail_sum == doctest::Approx(0.75));
  const auto prof = tail_profile(t);
  for (std::size_t k = 0; k < t.size(); ++k) {
    const TailMetrics m = tail_scaled_metrics(t, k);
    CHECK(prof[k].tail_sum == doctest::Approx(m.tail_sum).epsilon(1e-14));
    CHECK(prof[k].k3_min_grad_sq == m.k3_min_grad_sq);
  }
}

TEST_CASE("per-step facts on the running example") {
  const Trace t = running_trace(20);
  for (std::size_t k = 0; k + 1 < t.size(); ++k) {
    CHECK(descent_fact_slack(t, k) >= -1e-12);
    CHECK(gradient_nonexpansion_slack(t, k) >= -1e-12);
    CHECK(interleaving_residual(t, k + 1) <= 1e-15);
  }
}

TEST_CASE("Lyapunov quantities need the minimizer") {
  const Objective f = make_objective(preset_spec("log-sum-exp")).with_estimated_optimal_value(0.0);
  SchemeConfig c;
  c.s = 1.0 / f.lipschitz();
  c.x0 = {1, 1};
  c.max_iter = 5;
  const Trace t = run(f, c);
  CHECK_THROWS_AS(lyapunov_value(t, 2, LyapunovForm::unified), MissingMinimizerError);
  CHECK_THROWS_AS(envelope_report(t, EnvelopeQuantity::objective_y), MissingMinimizerError);
  CHECK_THROWS_AS(series_budget(t, 2), MissingMinimizerError);
  CHECK_NOTHROW(tail_scaled_metrics(t, 3));
  CHECK_NOTHROW(descent_fact_slack(t, 1));
}
