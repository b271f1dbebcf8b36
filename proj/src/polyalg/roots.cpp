#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>

#include "toral/polyalg/polyalg.hpp"

namespace toral {

namespace {

using cld = std::complex<long double>;

struct Eval {
  cld p, dp;
  long double err_p, err_dp;  // rounding error bounds for p and dp
};

Eval horner(const std::vector<long double>& c, cld z) {
  const long double u = std::numeric_limits<long double>::epsilon();
  const long double az = std::abs(z);
  cld p = 0, dp = 0;
  long double ap = 0, adp = 0;
  for (std::size_t k = c.size(); k-- > 0;) {
    dp = dp * z + p;
    adp = adp * az + ap;
    p = p * z + c[k];
    ap = ap * az + std::abs(c[k]);
  }
  const long double n = static_cast<long double>(c.size());
  const long double gamma = 4 * n * u;
  return {p, dp, gamma * ap, gamma * adp * n};
}

}  // namespace

std::vector<ApproxRoot> approximate_roots(const IntPoly& p) {
  const int n = p.degree();
  if (n < 1) return {};
  std::vector<long double> c(static_cast<std::size_t>(n) + 1);
  for (int i = 0; i <= n; ++i) c[static_cast<std::size_t>(i)] = static_cast<long double>(p.coeff(i).get_d());
  // exact for |coeff| < 2^53; larger coefficients carry a relative error we fold in below
  long double coeff_err = 0;
  for (int i = 0; i <= n; ++i)
    if (abs(p.coeff(i)) >= Integer(1) << 53)
      coeff_err = std::max(coeff_err, std::abs(c[static_cast<std::size_t>(i)]) * 1.2e-16L);

  using Mat = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;
  Mat comp = Mat::Zero(n, n);
  const long double lc = c.back();
  for (int i = 1; i < n; ++i) comp(i, i - 1) = 1;
  for (int i = 0; i < n; ++i) comp(i, n - 1) = -c[static_cast<std::size_t>(i)] / lc;
  Eigen::EigenSolver<Mat> es(comp, false);
  if (es.info() != Eigen::Success) throw NumericalError("companion eigenvalue solver failed");

  std::vector<ApproxRoot> out;
  for (int i = 0; i < n; ++i) {
    cld z = es.eigenvalues()(i);
    for (int it = 0; it < 8; ++it) {
      const Eval e = horner(c, z);
      if (std::abs(e.dp) == 0) break;
      const cld step = e.p / e.dp;
      const cld next = z - step;
      if (std::abs(horner(c, next).p) >= std::abs(e.p)) break;
      z = next;
    }
    const Eval e = horner(c, z);
    long double coeff_term = 0;
    {
      long double az = 1, s = 0;
      for (int k = 0; k <= n; ++k) {
        s += az;
        az *= std::abs(z);
      }
      coeff_term = coeff_err * s;
    }
    const long double num = std::abs(e.p) + e.err_p + coeff_term;
    const long double den = std::abs(e.dp) - e.err_dp - coeff_term * n;
    const long double radius = den > 0 ? static_cast<long double>(n) * num / den
                                        : std::numeric_limits<long double>::infinity();
    out.push_back({z, radius});
  }
  std::sort(out.begin(), out.end(), [](const ApproxRoot& a, const ApproxRoot& b) {
    if (a.z.real() != b.z.real()) return a.z.real() < b.z.real();
    return a.z.imag() < b.z.imag();
  });
  return out;
}

}  // namespace toral
