#include <atomic>
#include <cmath>
#include <numbers>

#include "toral/dynamics/kernel.hpp"

namespace toral::kernel {

void displacement_scalar(const ModeTable& m, const double* x, std::size_t stride, std::size_t n, double* out) {
  const std::size_t d = m.d;
  for (std::size_t j = 0; j < m.count; ++j) {
    const double* k = &m.k[j * d];
    const double* a = &m.a[j * d];
    const double* b = &m.b[j * d];
    for (std::size_t p = 0; p < n; ++p) {
      double t = 0;
      for (std::size_t i = 0; i < d; ++i) t = std::fma(k[i], x[i * stride + p], t);
      const double r = 2 * std::numbers::pi * (t - std::nearbyint(t));
      const double c = std::cos(r), s = std::sin(r);
      for (std::size_t i = 0; i < d; ++i) out[i * stride + p] += a[i] * c + b[i] * s;
    }
  }
}

namespace {
std::atomic<Backend> g_backend{Backend::Auto};
}

bool avx2_available() {
#if defined(__x86_64__) || defined(__i386__)
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

void set_backend(Backend b) { g_backend.store(b); }

Backend active_backend() {
  const Backend b = g_backend.load();
  if (b == Backend::Auto) return avx2_available() ? Backend::Avx2 : Backend::Scalar;
  if (b == Backend::Avx2 && !avx2_available()) return Backend::Scalar;
  return b;
}

void displacement(const ModeTable& m, const double* x, std::size_t stride, std::size_t n, double* out) {
  if (active_backend() == Backend::Avx2)
    displacement_avx2(m, x, stride, n, out);
  else
    displacement_scalar(m, x, stride, n, out);
}

}  // namespace toral::kernel
