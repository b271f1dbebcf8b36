#pragma once

#include <cstddef>
#include <vector>

namespace toral::kernel {

/// Fourier modes packed for the batch kernels: for mode j, frequency k[j*d + i]
/// and coefficient vectors a[j*d + i], b[j*d + i].
struct ModeTable {
  std::size_t d = 0;
  std::size_t count = 0;
  std::vector<double> k, a, b;
};

/// out_i(p) += sum_j a_ji cos(2 pi <k_j, x_p>) + b_ji sin(2 pi <k_j, x_p>).
/// Points are stored coordinate-major: x[i * stride + p] for p < n.
/// The phase is reduced to <k, x> - round(<k, x>) before the trigonometric call.
void displacement_scalar(const ModeTable& m, const double* x, std::size_t stride, std::size_t n, double* out);
void displacement_avx2(const ModeTable& m, const double* x, std::size_t stride, std::size_t n, double* out);

bool avx2_available();

enum class Backend { Auto, Scalar, Avx2 };
/// Process-wide choice for displacement(); Auto picks AVX2 when the CPU has it.
void set_backend(Backend b);
Backend active_backend();

void displacement(const ModeTable& m, const double* x, std::size_t stride, std::size_t n, double* out);

}  // namespace toral::kernel
