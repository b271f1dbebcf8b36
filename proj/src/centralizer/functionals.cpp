#include <Eigen/QR>
#include <Eigen/SVD>
#include <cmath>
#include <sstream>

#include "toral/centralizer/centralizer.hpp"
#include "toral/exact/linalg.hpp"

namespace toral {

bool commutes(const IntMatrix& a, const IntMatrix& b) { return a * b == b * a; }

Functionals::Functionals(const IntMatrix& L) : L_(L) {
  if (!L.is_square()) throw PreconditionError("matrix is not square");
  spec_ = classify(L);
  irreducible_ = is_irreducible_q(spec_.char_poly);
  proj_ = projectors(L, spec_);
  dropped_ = class_count() - 1;
  for (std::size_t c = 0; c < class_count(); ++c)
    if (spec_.lyapunov[c].center) dropped_ = c;
  if (irreducible_) {
    RatMatrix p = RatMatrix::identity(L.dim());
    const RatMatrix Lq = to_rational(L);
    for (std::size_t k = 0; k < L.dim(); ++k) {
      powers_.push_back(p);
      p = p * Lq;
    }
  }
}

std::vector<Rational> Functionals::polynomial_of(const IntMatrix& M) const {
  if (!irreducible_) throw PreconditionError("L is not irreducible");
  if (!commutes(M, L_)) throw PreconditionError("element does not commute with L");
  const std::size_t d = L_.dim();
  RatMatrix A(d * d, d);
  std::vector<Rational> b(d * d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) {
      for (std::size_t k = 0; k < d; ++k) A(i * d + j, k) = powers_[k](i, j);
      b[i * d + j] = M(i, j);
    }
  auto x = solve_rational(A, b);
  if (!x) throw NumericalError("commuting element is not a polynomial in L");
  return *x;
}

namespace {

// p(z) and a bound on |p(z + delta) - p(z)| for |delta| <= r
std::pair<HPC, HP> eval_with_bound(const std::vector<Rational>& c, const HPC& z, const HP& r) {
  HPC acc(0);
  HP dacc = 0;
  const HP m = abs(z) + r;
  for (std::size_t k = c.size(); k-- > 0;) {
    acc = acc * z + HPC(to_hp(c[k]));
    if (k > 0) dacc = dacc * m + abs(to_hp(c[k])) * HP(k);
  }
  return {acc, dacc * r};
}

}  // namespace

std::vector<HP> Functionals::eigen_log_moduli(const IntMatrix& M) const {
  const auto p = polynomial_of(M);
  std::vector<HP> out;
  for (const auto& e : spec_.eigenvalues) out.push_back(log(abs(eval_with_bound(p, e.value, e.radius).first)));
  return out;
}

Functionals::Values Functionals::evaluate(const IntMatrix& M) const {
  if (!commutes(M, L_)) throw PreconditionError("element does not commute with L");
  if (!irreducible_) return evaluate_by_projectors(M);
  const auto p = polynomial_of(M);
  Values v;
  HP worst = 0;
  std::vector<HP> logs(spec_.eigenvalues.size());
  for (std::size_t i = 0; i < spec_.eigenvalues.size(); ++i) {
    const auto& e = spec_.eigenvalues[i];
    const auto [val, bound] = eval_with_bound(p, e.value, e.radius);
    const HP m = abs(val);
    if (m <= 2 * bound) throw NumericalError("eigenvalue of element not separated from zero");
    logs[i] = log(m);
    const HP err = 2 * bound / m;
    if (err > worst) worst = err;
  }
  double maxabs = 0;
  for (const auto& c : spec_.lyapunov) {
    HP sum = 0;
    for (std::size_t m : c.members) sum += logs[m] * spec_.eigenvalues[m].multiplicity;
    const double x = static_cast<double>(sum / c.multiplicity);
    v.per_class.push_back(x);
    maxabs = std::max(maxabs, std::abs(x));
  }
  v.error = static_cast<double>(worst) + 2 * std::numeric_limits<double>::epsilon() * maxabs + 1e-300;
  return v;
}

Functionals::Values Functionals::evaluate_by_projectors(const IntMatrix& M) const {
  if (!commutes(M, L_)) throw PreconditionError("element does not commute with L");
  const Eigen::MatrixXd Md = to_double(M);
  Values v;
  double err = 0;
  for (std::size_t c = 0; c < class_count(); ++c) {
    const auto m = static_cast<Eigen::Index>(class_dim(c));
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(proj_.per_class[c]);
    const Eigen::MatrixXd Q = qr.householderQ();
    const Eigen::MatrixXd B = Q.leftCols(m);
    const Eigen::MatrixXd R = B.transpose() * Md * B;
    const double resid = (Md * B - B * R).norm();
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(R);
    const double smin = svd.singularValues()(m - 1);
    if (!(smin > 0)) throw NumericalError("restricted block is singular");
    v.per_class.push_back(std::log(std::abs(R.determinant())) / static_cast<double>(m));
    err = std::max(err, 10 * (resid + 1e-15 * Md.norm()) / smin);
  }
  v.error = err;
  return v;
}

std::vector<double> Functionals::embed(const std::vector<double>& full) const {
  std::vector<double> out;
  for (std::size_t c = 0; c < full.size(); ++c)
    if (c != dropped_) out.push_back(full[c]);
  return out;
}

Functionals::Values functional_of_element(const IntMatrix& L, const IntMatrix& M) {
  if (!L.is_square() || !M.is_square() || L.dim() != M.dim()) throw PreconditionError("shape mismatch");
  if (!commutes(L, M)) throw PreconditionError("element does not commute with L");
  const Functionals F(L);
  if (!F.polynomial_mode()) throw PreconditionError("hypothesis failed: L is not irreducible");
  if (F.spectrum().center_dim != 2) throw PreconditionError("hypothesis failed: center is not 2-dimensional");
  if (!no_three_same_modulus(F.spectrum())) throw PreconditionError("hypothesis failed: three eigenvalues share a modulus");
  return F.evaluate(M);
}

IntMatrix evaluate_word(const std::vector<IntMatrix>& gens, const std::vector<long>& exps) {
  if (gens.empty()) throw PreconditionError("empty generator list");
  if (gens.size() != exps.size()) throw PreconditionError("word length mismatch");
  IntMatrix out = IntMatrix::identity(gens.front().dim());
  for (std::size_t i = 0; i < gens.size(); ++i)
    if (exps[i] != 0) out = out * power(gens[i], exps[i]);
  return out;
}

std::string word_to_string(const std::vector<std::string>& names, const std::vector<long>& exps) {
  std::string out;
  std::size_t factors = 0;
  for (long e : exps) factors += e != 0;
  for (std::size_t i = 0; i < exps.size(); ++i) {
    if (exps[i] == 0) continue;
    if (!out.empty()) out += " * ";
    const std::string& n = names[i];
    const bool atom = n.find_first_of(" +-*") == std::string::npos;
    std::string base = atom || (factors == 1 && exps[i] == 1) ? n : "(" + n + ")";
    out += base;
    if (exps[i] != 1) out += "^" + std::to_string(exps[i]);
  }
  return out.empty() ? "I" : out;
}

std::string polynomial_name(const std::vector<Integer>& coeffs) {
  std::string out;
  for (std::size_t k = coeffs.size(); k-- > 0;) {
    const Integer& c = coeffs[k];
    if (c == 0) continue;
    const Integer a = abs(c);
    if (out.empty())
      out += c < 0 ? "-" : "";
    else
      out += c < 0 ? " - " : " + ";
    const std::string var = k == 0 ? "I" : k == 1 ? "L" : "L^" + std::to_string(k);
    if (a != 1) out += a.get_str() + "*";
    out += var;
  }
  return out.empty() ? "0" : out;
}

int multiplicative_rank(const std::vector<std::vector<double>>& images, double tol) {
  if (images.empty() || images.front().empty()) return 0;
  Eigen::MatrixXd A(static_cast<Eigen::Index>(images.size()), static_cast<Eigen::Index>(images.front().size()));
  for (std::size_t i = 0; i < images.size(); ++i)
    for (std::size_t j = 0; j < images[i].size(); ++j) A(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = images[i][j];
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(A);
  int r = 0;
  for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i)
    if (svd.singularValues()(i) > tol) ++r;
  return r;
}

}  // namespace toral
