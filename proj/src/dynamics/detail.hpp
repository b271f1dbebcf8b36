#pragma once

#include <cmath>
#include <cstddef>
#include <random>

namespace toral::detail {

/// Solves J z = r for a row-major d x d J by partial pivoting; both are overwritten, z in r.
bool solve_in_place(double* J, double* r, std::size_t d);

/// x - round(x) componentwise.
void reduce(double* x, std::size_t count);

double uniform01(std::mt19937_64& rng);

/// Neumaier compensated sum.
struct Compensated {
  double sum = 0, comp = 0;
  void add(double v) {
    const double t = sum + v;
    if (std::abs(sum) >= std::abs(v))
      comp += (sum - t) + v;
    else
      comp += (v - t) + sum;
    sum = t;
  }
  double value() const { return sum + comp; }
};

}  // namespace toral::detail
