#include <doctest.h>

#include <cmath>
#include <memory>

#include "nag/errors.hpp"
#include "nag/ode.hpp"

using namespace nag;

namespace {

class ConstantModel final : public Objective::Model {
 public:
  double value(std::span<const double>) const override { return 3.0; }
  void gradient(std::span<const double>, std::span<double> out) const override {
    for (double& o : out) o = 0.0;
  }
};

Objective constant(std::size_t d) {
  return Objective("constant", d, 1.0, std::make_shared<ConstantModel>(), Vec(d, 0.0), 3.0);
}

Objective half_square() { return make_objective(preset_spec("quadratic-1d")); }

OdeConfig config(double r, double s, double t_end, std::size_t n = 200) {
  OdeConfig c;
  c.r = r;
  c.s = s;
  c.t_end = t_end;
  c.sample_times = uniform_times(lyapunov_start_time(r, s), t_end, n);
  return c;
}

// Classic fixed-step RK4 on the same system, as an independent reference.
double rk4_position(double r, double s, double x0, double t_end, std::size_t steps) {
  const double rs = std::sqrt(s);
  auto rhs = [&](double t, double x, double v, double& dx, double& dv) {
    dx = v;
    dv = -(r + 1.0) / t * v - (1.0 + (r + 1.0) * rs / (2.0 * t)) * (x + rs * v);
  };
  double t = ode_initial_time(r, s), x = x0, v = -rs * x0;
  const double h = (t_end - t) / static_cast<double>(steps);
  for (std::size_t i = 0; i < steps; ++i) {
    double k1x, k1v, k2x, k2v, k3x, k3v, k4x, k4v;
    rhs(t, x, v, k1x, k1v);
    rhs(t + h / 2, x + h / 2 * k1x, v + h / 2 * k1v, k2x, k2v);
    rhs(t + h / 2, x + h / 2 * k2x, v + h / 2 * k2v, k3x, k3v);
    rhs(t + h, x + h * k3x, v + h * k3v, k4x, k4v);
    x += h / 6 * (k1x + 2 * k2x + 2 * k3x + k4x);
    v += h / 6 * (k1v + 2 * k2v + 2 * k3v + k4v);
    t += h;
  }
  return x;
}

}  // namespace

TEST_CASE("right-hand side hand value") {
  OdeState st{1.0, {1.0}, {0.0}};
  const OdeDerivative d = ode_rhs(half_square(), 2.0, 0.25, st);
  CHECK(d.dX[0] == 0.0);
  CHECK(d.dV[0] == doctest::Approx(-1.75));
  st.t = 0.0;
  CHECK_THROWS_AS(ode_rhs(half_square(), 2.0, 0.25, st), DomainError);
}

TEST_CASE("right-hand side with vanishing gradient") {
  OdeState st{2.0, {0.0}, {0.0}};
  CHECK(ode_rhs(constant(1), 2.0, 0.25, st).dV[0] == 0.0);
  st.V = {0.4};
  CHECK(ode_rhs(constant(1), 3.0, 0.25, st).dV[0] == doctest::Approx(-4.0 / 2.0 * 0.4));
  // X + sqrt(s) V at the minimizer of x^2/2.
  OdeState at{2.0, {-0.2}, {0.4}};
  CHECK(ode_rhs(half_square(), 2.0, 0.25, at).dV[0] == doctest::Approx(-1.5 * 0.4));
}

TEST_CASE("constant objective keeps X fixed") {
  const Trajectory tr = ode_integrate(constant(2), config(2.0, 0.01, 2.0), Vec{1.0, -2.0});
  for (const auto& smp : tr.samples) {
    CHECK(smp.X[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(smp.X[1] == doctest::Approx(-2.0).epsilon(1e-12));
  }
  const ContinuousRateReport rep = continuous_rate_report(tr, constant(2), 2.0, 0.01);
  CHECK(rep.all_satisfied());
  for (const auto& smp : rep.samples) CHECK(smp.gap == 0.0);
}

TEST_CASE("adaptive solution matches a fine fixed-step reference") {
  OdeConfig c;
  c.r = 2.0;
  c.s = 0.01;
  c.t_end = 1.0;
  c.sample_times = {1.0};
  const Trajectory tr = ode_integrate(half_square(), c, Vec{1.0});
  const double ref = rk4_position(2.0, 0.01, 1.0, 1.0, 20000);
  const double half = rk4_position(2.0, 0.01, 1.0, 1.0, 40000);
  CHECK(std::abs(ref - half) <= 1e-12);
  CHECK(std::abs(tr.samples.back().X[0] - ref) <= 10.0 * (c.atol + c.rtol * std::abs(ref)));
}

TEST_CASE("tolerance refinement agrees") {
  const Objective f = make_objective(preset_spec("quadratic-2d"));
  OdeConfig loose = config(3.0, 0.01, 10.0, 300), tight = loose;
  loose.rtol = 1e-6;
  loose.atol = 1e-9;
  const Vec x0 = preset_start("quadratic-2d", 2);
  const Trajectory a = ode_integrate(f, loose, x0), b = ode_integrate(f, tight, x0);
  REQUIRE(a.samples.size() == b.samples.size());
  for (std::size_t i = 0; i < a.samples.size(); ++i)
    for (std::size_t j = 0; j < 2; ++j) CHECK(std::abs(a.samples[i].X[j] - b.samples[i].X[j]) <= 1e-5);
}

TEST_CASE("continuous Lyapunov function") {
  const Objective f = half_square();
  const double s = 0.01, r = 2.0;
  CHECK(continuous_lyapunov(f, r, s, OdeState{1.0, {0.0}, {0.0}}) == 0.0);
  CHECK_THROWS_AS(continuous_lyapunov(f, r, s, OdeState{lyapunov_pole(r, s), {0.0}, {0.0}}), DomainError);
  CHECK_THROWS_AS(continuous_lyapunov(f, r, s, OdeState{0.1, {0.0}, {0.0}}), DomainError);

  const double t0 = lyapunov_start_time(r, s);
  OdeConfig c = config(r, s, 2.0 * t0);
  c.sample_times = {t0, 2.0 * t0};
  const Trajectory tr = ode_integrate(f, c, Vec{1.0});
  CHECK(continuous_lyapunov(f, r, s, tr.samples[1]) <= continuous_lyapunov(f, r, s, tr.samples[0]));

  const Objective lse = make_objective(preset_spec("log-sum-exp"));
  CHECK_THROWS_AS(continuous_lyapunov(lse, r, s, OdeState{1.0, {0.0, 0.0}, {0.0, 0.0}}), MissingMinimizerError);
}

TEST_CASE("rate report on the 1-D quadratic") {
  const Objective f = half_square();
  const double s = 0.01;
  for (double r : {2.0, 3.0}) {
    CAPTURE(r);
    OdeConfig c = config(r, s, 100.0 * std::sqrt(s), 2000);
    const Trajectory tr = ode_integrate(f, c, Vec{1.0});
    const ContinuousRateReport rep = continuous_rate_report(tr, f, r, s);
    CHECK(rep.t0 == doctest::Approx(lyapunov_start_time(r, s)));
    CHECK(rep.samples.front().gap <= rep.samples.front().bound);
    CHECK(rep.all_satisfied());
    CHECK(lyapunov_monotonicity_slack(rep, c.rtol, c.atol) >= 0.0);
    double peak = 0.0;
    for (const auto& smp : rep.samples) peak = std::max(peak, smp.t3_inf_grad_sq);
    CHECK(rep.samples.back().t3_inf_grad_sq <= 0.05 * peak);
  }
}

TEST_CASE("configuration checks") {
  const Objective f = half_square();
  OdeConfig c = config(2.0, 0.01, 1.0);
  c.rtol = 1e-2;
  CHECK_THROWS_AS(ode_integrate(f, c, Vec{1.0}), ConfigError);
  c = config(2.0, 0.01, 1.0);
  c.t_end = 0.3;  // below (r+2) sqrt(s)
  c.sample_times.clear();
  CHECK_THROWS_AS(validate(c), ConfigError);
  c = config(2.0, 0.01, 1.0);
  c.sample_times = {0.5, 0.4};
  CHECK_THROWS_AS(validate(c), ConfigError);
  c = config(2.0, 0.01, 1.0);
  CHECK_THROWS_AS(ode_integrate(f, c, Vec{1.0, 2.0}), ConfigError);
}
