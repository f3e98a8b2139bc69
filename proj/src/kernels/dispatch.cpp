#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>
#include <string_view>

#include "kernels_impl.hpp"
#include "nag/kernels.hpp"

namespace nag::kernels {
namespace {

constexpr KernelTable kScalar{scalar::dot,   scalar::norm_sq,  scalar::dist_sq,    scalar::axpy,
                              scalar::axpby, scalar::axpbypcz, scalar::extrapolate};

#if defined(NAG_HAVE_AVX2_TU)
constexpr KernelTable kAvx2{avx2::dot,   avx2::norm_sq,  avx2::dist_sq,    avx2::axpy,
                            avx2::axpby, avx2::axpbypcz, avx2::extrapolate};
#endif

bool cpu_has_avx2() noexcept {
#if defined(NAG_HAVE_AVX2_TU) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

Backend pick_default() noexcept {
  if (const char* env = std::getenv("NAG_KERNELS")) {
    const std::string_view want{env};
    if (want == "scalar") return Backend::scalar;
    if (want == "avx2" && cpu_has_avx2()) return Backend::avx2;
  }
  return cpu_has_avx2() ? Backend::avx2 : Backend::scalar;
}

std::atomic<Backend>& current() noexcept {
  static std::atomic<Backend> b{pick_default()};
  return b;
}

}  // namespace

bool backend_available(Backend b) noexcept { return b == Backend::scalar || cpu_has_avx2(); }

const KernelTable& table(Backend b) {
  if (!backend_available(b)) throw std::invalid_argument("kernel backend not available: " + std::string(backend_name(b)));
#if defined(NAG_HAVE_AVX2_TU)
  if (b == Backend::avx2) return kAvx2;
#endif
  return kScalar;
}

Backend active_backend() noexcept { return current().load(std::memory_order_relaxed); }

void set_backend(Backend b) {
  if (!backend_available(b)) throw std::invalid_argument("kernel backend not available: " + std::string(backend_name(b)));
  current().store(b, std::memory_order_relaxed);
}

std::string_view backend_name(Backend b) noexcept { return b == Backend::avx2 ? "avx2" : "scalar"; }

namespace detail {
const KernelTable& active() noexcept {
#if defined(NAG_HAVE_AVX2_TU)
  if (active_backend() == Backend::avx2) return kAvx2;
#endif
  return kScalar;
}
}  // namespace detail

}  // namespace nag::kernels
