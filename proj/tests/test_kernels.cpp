#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "nag/kernels.hpp"

using namespace nag::kernels;

namespace {

std::vector<double> random_vec(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> u(-10.0, 10.0);
  std::vector<double> v(n);
  for (double& x : v) x = u(rng);
  return v;
}

// Reductions are reordered by the SIMD variant; bound by the absolute sum.
double abs_dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] * b[i]);
  return s;
}

}  // namespace

TEST_CASE("scalar backend is always available") {
  CHECK(backend_available(Backend::scalar));
  CHECK(backend_name(Backend::scalar) == "scalar");
}

TEST_CASE("set_backend round trip") {
  const Backend before = active_backend();
  set_backend(Backend::scalar);
  CHECK(active_backend() == Backend::scalar);
  if (backend_available(Backend::avx2)) {
    set_backend(Backend::avx2);
    CHECK(active_backend() == Backend::avx2);
  } else {
    CHECK_THROWS_AS(set_backend(Backend::avx2), std::invalid_argument);
  }
  set_backend(before);
}

TEST_CASE("scalar kernels on small hand values") {
  const KernelTable& t = table(Backend::scalar);
  const double a[] = {1, 2, 3};
  const double b[] = {4, -5, 6};
  CHECK(t.dot(a, b, 3) == 12.0);
  CHECK(t.norm_sq(a, 3) == 14.0);
  CHECK(t.dist_sq(a, b, 3) == 9.0 + 49.0 + 9.0);
  double y[] = {1, 1, 1};
  t.axpy(2.0, a, y, 3);
  CHECK(y[2] == 7.0);
  double out[3];
  t.axpby(2.0, a, -1.0, b, out, 3);
  CHECK(out[1] == 9.0);
  t.axpbypcz(1.0, a, 1.0, b, -1.0, a, out, 3);
  CHECK(out[0] == 4.0);
  t.extrapolate(a, b, 0.5, out, 3);
  CHECK(out[1] == 5.5);
}

TEST_CASE("SIMD kernels match the scalar reference") {
  if (!backend_available(Backend::avx2)) return;
  const KernelTable& s = table(Backend::scalar);
  const KernelTable& v = table(Backend::avx2);
  std::mt19937_64 rng(42);
  for (std::size_t n = 0; n <= 67; ++n) {
    for (int rep = 0; rep < 8; ++rep) {
      CAPTURE(n);
      const auto a = random_vec(rng, n), b = random_vec(rng, n), c = random_vec(rng, n);
      const double tol_dot = 1e-14 * (1.0 + abs_dot(a, b));
      CHECK(std::abs(s.dot(a.data(), b.data(), n) - v.dot(a.data(), b.data(), n)) <= tol_dot);
      CHECK(std::abs(s.norm_sq(a.data(), n) - v.norm_sq(a.data(), n)) <= 1e-14 * (1.0 + abs_dot(a, a)));
      std::vector<double> d(n);
      for (std::size_t i = 0; i < n; ++i) d[i] = a[i] - b[i];
      CHECK(std::abs(s.dist_sq(a.data(), b.data(), n) - v.dist_sq(a.data(), b.data(), n)) <=
            1e-14 * (1.0 + abs_dot(d, d)));

      // Elementwise kernels differ at most by FMA contraction: a few ulps of the terms.
      auto close = [&](const std::vector<double>& x, const std::vector<double>& y, double scale) {
        for (std::size_t i = 0; i < n; ++i)
          if (std::abs(x[i] - y[i]) > 4e-16 * scale) return false;
        return true;
      };
      std::vector<double> ys = c, yv = c;
      s.axpy(0.37, a.data(), ys.data(), n);
      v.axpy(0.37, a.data(), yv.data(), n);
      CHECK(close(ys, yv, 20.0));
      std::vector<double> os(n), ov(n);
      s.axpby(1.3, a.data(), -0.7, b.data(), os.data(), n);
      v.axpby(1.3, a.data(), -0.7, b.data(), ov.data(), n);
      CHECK(close(os, ov, 40.0));
      s.axpbypcz(0.4, a.data(), -2.0, b.data(), 1.5, c.data(), os.data(), n);
      v.axpbypcz(0.4, a.data(), -2.0, b.data(), 1.5, c.data(), ov.data(), n);
      CHECK(close(os, ov, 80.0));
      s.extrapolate(a.data(), b.data(), 0.61, os.data(), n);
      v.extrapolate(a.data(), b.data(), 0.61, ov.data(), n);
      CHECK(close(os, ov, 40.0));
    }
  }
}

TEST_CASE("SIMD kernels allow documented aliasing") {
  if (!backend_available(Backend::avx2)) return;
  std::mt19937_64 rng(3);
  const std::size_t n = 13;
  const auto a = random_vec(rng, n), b = random_vec(rng, n);
  for (Backend be : {Backend::scalar, Backend::avx2}) {
    const KernelTable& t = table(be);
    std::vector<double> x = a, ref(n);
    t.axpby(2.0, a.data(), 3.0, b.data(), ref.data(), n);
    t.axpby(2.0, x.data(), 3.0, b.data(), x.data(), n);
    CHECK(x == ref);
    std::vector<double> cur = a;
    t.extrapolate(a.data(), b.data(), 0.5, ref.data(), n);
    t.extrapolate(cur.data(), b.data(), 0.5, cur.data(), n);
    CHECK(cur == ref);
  }
}
