#include <immintrin.h>

#include <cmath>
#include <numbers>

#include "toral/dynamics/kernel.hpp"

namespace toral::kernel {

namespace {

// sin and cos of 2 pi r for r in [-1/2, 1/2]: quarter-turn reduction, then Taylor
// polynomials on [-pi/4, pi/4] (truncation below 5e-17).
inline void sincos_turns(__m256d r, __m256d& s_out, __m256d& c_out) {
  const __m256d q = _mm256_round_pd(_mm256_mul_pd(r, _mm256_set1_pd(4.0)), _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  const __m256d u = _mm256_fnmadd_pd(q, _mm256_set1_pd(0.25), r);
  const __m256d th = _mm256_mul_pd(u, _mm256_set1_pd(2 * std::numbers::pi));
  const __m256d z = _mm256_mul_pd(th, th);

  // sin: th * (1 - z/3! + z^2/5! - ... - z^7/15!)
  __m256d ps = _mm256_set1_pd(-1.0 / 1307674368000.0);
  ps = _mm256_fmadd_pd(ps, z, _mm256_set1_pd(1.0 / 6227020800.0));
  ps = _mm256_fmadd_pd(ps, z, _mm256_set1_pd(-1.0 / 39916800.0));
  ps = _mm256_fmadd_pd(ps, z, _mm256_set1_pd(1.0 / 362880.0));
  ps = _mm256_fmadd_pd(ps, z, _mm256_set1_pd(-1.0 / 5040.0));
  ps = _mm256_fmadd_pd(ps, z, _mm256_set1_pd(1.0 / 120.0));
  ps = _mm256_fmadd_pd(ps, z, _mm256_set1_pd(-1.0 / 6.0));
  ps = _mm256_mul_pd(ps, z);
  const __m256d s = _mm256_fmadd_pd(ps, th, th);

  // cos: 1 - z/2! + ... + z^8/16!
  __m256d pc = _mm256_set1_pd(1.0 / 20922789888000.0);
  pc = _mm256_fmadd_pd(pc, z, _mm256_set1_pd(-1.0 / 87178291200.0));
  pc = _mm256_fmadd_pd(pc, z, _mm256_set1_pd(1.0 / 479001600.0));
  pc = _mm256_fmadd_pd(pc, z, _mm256_set1_pd(-1.0 / 3628800.0));
  pc = _mm256_fmadd_pd(pc, z, _mm256_set1_pd(1.0 / 40320.0));
  pc = _mm256_fmadd_pd(pc, z, _mm256_set1_pd(-1.0 / 720.0));
  pc = _mm256_fmadd_pd(pc, z, _mm256_set1_pd(1.0 / 24.0));
  pc = _mm256_fmadd_pd(pc, z, _mm256_set1_pd(-0.5));
  const __m256d c = _mm256_fmadd_pd(pc, z, _mm256_set1_pd(1.0));

  // rotate by q quarter turns
  const __m128i qi = _mm256_cvtpd_epi32(q);
  const __m256i q64 = _mm256_cvtepi32_epi64(qi);
  const __m256i one = _mm256_set1_epi64x(1), two = _mm256_set1_epi64x(2);
  const __m256d swap = _mm256_castsi256_pd(_mm256_cmpeq_epi64(_mm256_and_si256(q64, one), one));
  const __m256d neg_s = _mm256_castsi256_pd(_mm256_cmpeq_epi64(_mm256_and_si256(q64, two), two));
  const __m256d neg_c =
      _mm256_castsi256_pd(_mm256_cmpeq_epi64(_mm256_and_si256(_mm256_add_epi64(q64, one), two), two));
  const __m256d sign = _mm256_set1_pd(-0.0);
  __m256d so = _mm256_blendv_pd(s, c, swap);
  __m256d co = _mm256_blendv_pd(c, s, swap);
  so = _mm256_xor_pd(so, _mm256_and_pd(neg_s, sign));
  co = _mm256_xor_pd(co, _mm256_and_pd(neg_c, sign));
  s_out = so;
  c_out = co;
}

}  // namespace

void displacement_avx2(const ModeTable& m, const double* x, std::size_t stride, std::size_t n, double* out) {
  const std::size_t d = m.d;
  const std::size_t body = n - n % 4;
  for (std::size_t j = 0; j < m.count; ++j) {
    const double* k = &m.k[j * d];
    const double* a = &m.a[j * d];
    const double* b = &m.b[j * d];
    for (std::size_t p = 0; p < body; p += 4) {
      __m256d t = _mm256_setzero_pd();
      for (std::size_t i = 0; i < d; ++i) t = _mm256_fmadd_pd(_mm256_set1_pd(k[i]), _mm256_loadu_pd(x + i * stride + p), t);
      const __m256d r = _mm256_sub_pd(t, _mm256_round_pd(t, _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC));
      __m256d s, c;
      sincos_turns(r, s, c);
      for (std::size_t i = 0; i < d; ++i) {
        double* o = out + i * stride + p;
        __m256d acc = _mm256_loadu_pd(o);
        acc = _mm256_fmadd_pd(_mm256_set1_pd(a[i]), c, acc);
        acc = _mm256_fmadd_pd(_mm256_set1_pd(b[i]), s, acc);
        _mm256_storeu_pd(o, acc);
      }
    }
    for (std::size_t p = body; p < n; ++p) {
      double t = 0;
      for (std::size_t i = 0; i < d; ++i) t = std::fma(k[i], x[i * stride + p], t);
      const double r = 2 * std::numbers::pi * (t - std::nearbyint(t));
      const double c = std::cos(r), s = std::sin(r);
      for (std::size_t i = 0; i < d; ++i) out[i * stride + p] += a[i] * c + b[i] * s;
    }
  }
}

}  // namespace toral::kernel
