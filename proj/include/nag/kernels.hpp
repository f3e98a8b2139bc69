#pragma once

#include <cstddef>
#include <span>
#include <string_view>

// Dense vector kernels used by every iteration of the schemes and the
// integrator. Two implementations exist: a scalar reference and an AVX2/FMA
// variant. The active one is picked once at startup from the CPU features
// and can be overridden with NAG_KERNELS=scalar|avx2 or set_backend().
//
// All kernels take spans of equal length. Output spans may alias inputs
// only where stated.
namespace nag::kernels {

enum class Backend { scalar, avx2 };

// Function table for one backend.
struct KernelTable {
  double (*dot)(const double* a, const double* b, std::size_t n);
  double (*norm_sq)(const double* a, std::size_t n);
  double (*dist_sq)(const double* a, const double* b, std::size_t n);
  // y += alpha * x
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  // out = a*x + b*y  (out may alias x or y)
  void (*axpby)(double a, const double* x, double b, const double* y, double* out, std::size_t n);
  // out = a*x + b*y + c*z  (out may alias any input)
  void (*axpbypcz)(double a, const double* x, double b, const double* y, double c, const double* z,
                   double* out, std::size_t n);
  // out = cur + c*(cur - prev)  (out may alias cur or prev)
  void (*extrapolate)(const double* cur, const double* prev, double c, double* out, std::size_t n);
};

const KernelTable& table(Backend b);
bool backend_available(Backend b) noexcept;

Backend active_backend() noexcept;
// Throws std::invalid_argument if the backend is not available on this CPU.
void set_backend(Backend b);
std::string_view backend_name(Backend b) noexcept;

namespace detail {
const KernelTable& active() noexcept;
}

inline double dot(std::span<const double> a, std::span<const double> b) {
  return detail::active().dot(a.data(), b.data(), a.size());
}
inline double norm_sq(std::span<const double> a) { return detail::active().norm_sq(a.data(), a.size()); }
inline double dist_sq(std::span<const double> a, std::span<const double> b) {
  return detail::active().dist_sq(a.data(), b.data(), a.size());
}
inline void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  detail::active().axpy(alpha, x.data(), y.data(), x.size());
}
inline void axpby(double a, std::span<const double> x, double b, std::span<const double> y,
                  std::span<double> out) {
  detail::active().axpby(a, x.data(), b, y.data(), out.data(), x.size());
}
inline void axpbypcz(double a, std::span<const double> x, double b, std::span<const double> y, double c,
                     std::span<const double> z, std::span<double> out) {
  detail::active().axpbypcz(a, x.data(), b, y.data(), c, z.data(), out.data(), x.size());
}
inline void extrapolate(std::span<const double> cur, std::span<const double> prev, double c,
                        std::span<double> out) {
  detail::active().extrapolate(cur.data(), prev.data(), c, out.data(), cur.size());
}

}  // namespace nag::kernels
