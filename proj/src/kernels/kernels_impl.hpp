#pragma once

#include <cstddef>

namespace nag::kernels {

namespace scalar {
double dot(const double* a, const double* b, std::size_t n);
double norm_sq(const double* a, std::size_t n);
double dist_sq(const double* a, const double* b, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
void axpby(double a, const double* x, double b, const double* y, double* out, std::size_t n);
void axpbypcz(double a, const double* x, double b, const double* y, double c, const double* z, double* out,
              std::size_t n);
void extrapolate(const double* cur, const double* prev, double c, double* out, std::size_t n);
}  // namespace scalar

#if defined(NAG_HAVE_AVX2_TU)
// Defined in avx2.cpp, which is compiled with -mavx2 -mfma. Only call after
// checking the CPU supports both.
namespace avx2 {
double dot(const double* a, const double* b, std::size_t n);
double norm_sq(const double* a, std::size_t n);
double dist_sq(const double* a, const double* b, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
void axpby(double a, const double* x, double b, const double* y, double* out, std::size_t n);
void axpbypcz(double a, const double* x, double b, const double* y, double c, const double* z, double* out,
              std::size_t n);
void extrapolate(const double* cur, const double* prev, double c, double* out, std::size_t n);
}  // namespace avx2
#endif

}  // namespace nag::kernels
