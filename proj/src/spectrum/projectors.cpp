#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include "toral/spectrum/spectrum.hpp"

namespace toral {

namespace {

using MatL = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;
using MatCL = Eigen::Matrix<std::complex<long double>, Eigen::Dynamic, Eigen::Dynamic>;

struct Decomposition {
  Eigen::Matrix<std::complex<long double>, Eigen::Dynamic, 1> values;
  MatCL vectors;
  std::vector<std::size_t> owner;  // eigenvalue index in the spectrum for each column
};

Decomposition decompose(const IntMatrix& L, const CertifiedSpectrum& s) {
  const auto d = static_cast<Eigen::Index>(L.rows());
  MatL A(d, d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j)
      A(i, j) = static_cast<long double>(L(static_cast<std::size_t>(i), static_cast<std::size_t>(j)).get_d());
  Eigen::EigenSolver<MatL> es(A, true);
  if (es.info() != Eigen::Success) throw NumericalError("eigendecomposition failed");
  Decomposition out{es.eigenvalues(), es.eigenvectors(), {}};
  for (Eigen::Index k = 0; k < d; ++k) {
    const auto mu = out.values(k);
    std::size_t best = 0;
    long double bd = -1;
    for (std::size_t i = 0; i < s.eigenvalues.size(); ++i) {
      const auto& v = s.eigenvalues[i].value;
      const std::complex<long double> z(static_cast<long double>(v.real()), static_cast<long double>(v.imag()));
      const long double dist = std::abs(z - mu);
      if (bd < 0 || dist < bd) {
        bd = dist;
        best = i;
      }
    }
    out.owner.push_back(best);
  }
  return out;
}

std::size_t class_of(const CertifiedSpectrum& s, std::size_t eig) {
  for (std::size_t c = 0; c < s.lyapunov.size(); ++c)
    for (std::size_t m : s.lyapunov[c].members)
      if (m == eig) return c;
  throw NumericalError("eigenvalue without an exponent class");
}

}  // namespace

SpectralProjectors projectors(const IntMatrix& L, const CertifiedSpectrum& s) {
  const auto d = static_cast<Eigen::Index>(L.rows());
  const Decomposition dec = decompose(L, s);
  const MatCL Vinv = dec.vectors.inverse();
  SpectralProjectors out;
  out.per_class.assign(s.lyapunov.size(), Eigen::MatrixXd::Zero(d, d));
  std::vector<MatCL> acc(s.lyapunov.size(), MatCL::Zero(d, d));
  for (Eigen::Index k = 0; k < d; ++k) {
    const std::size_t c = class_of(s, dec.owner[static_cast<std::size_t>(k)]);
    acc[c] += dec.vectors.col(k) * Vinv.row(k);
  }
  const Eigen::MatrixXd Ld = to_double(L);
  out.center = out.stable = out.unstable = Eigen::MatrixXd::Zero(d, d);
  Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(d, d);
  for (std::size_t c = 0; c < s.lyapunov.size(); ++c) {
    Eigen::MatrixXd P = acc[c].real().cast<double>();
    out.per_class[c] = P;
    sum += P;
    out.idempotence_residual = std::max(out.idempotence_residual, (P * P - P).norm());
    out.commutation_residual = std::max(out.commutation_residual, (Ld * P - P * Ld).norm());
    const auto& cls = s.lyapunov[c];
    if (cls.center)
      out.center += P;
    else if (cls.value > 0)
      out.unstable += P;
    else
      out.stable += P;
  }
  out.sum_residual = (sum - Eigen::MatrixXd::Identity(d, d)).norm();
  return out;
}

SpectralProjectors projectors(const IntMatrix& L) { return projectors(L, classify(L)); }

AdaptedBasis adapted_basis(const IntMatrix& L, const CertifiedSpectrum& s) {
  const auto d = static_cast<Eigen::Index>(L.rows());
  const Decomposition dec = decompose(L, s);
  AdaptedBasis out;
  out.S = Eigen::MatrixXd::Zero(d, d);
  Eigen::Index col = 0;
  for (std::size_t c = 0; c < s.lyapunov.size(); ++c) {
    out.offsets.push_back(static_cast<std::size_t>(col));
    for (Eigen::Index k = 0; k < d; ++k) {
      if (class_of(s, dec.owner[static_cast<std::size_t>(k)]) != c) continue;
      const auto v = dec.vectors.col(k);
      const long double im = dec.values(k).imag();
      if (im < 0) continue;
      if (col >= d) throw NumericalError("adapted basis: too many columns");
      if (im == 0) {
        Eigen::VectorXd r = v.real().cast<double>();
        out.S.col(col++) = r / r.norm();
      } else {
        if (col + 2 > d) throw NumericalError("adapted basis: too many columns");
        Eigen::VectorXd re = v.real().cast<double>();
        Eigen::VectorXd imv = v.imag().cast<double>();
        const double scale = std::sqrt(re.squaredNorm() + imv.squaredNorm());
        out.S.col(col++) = re / scale;
        out.S.col(col++) = imv / scale;
      }
    }
  }
  if (col != d) throw NumericalError("adapted basis: matrix is not diagonalizable over C");
  Eigen::FullPivLU<Eigen::MatrixXd> lu(out.S);
  if (!lu.isInvertible()) throw NumericalError("adapted basis is singular");
  return out;
}

}  // namespace toral
