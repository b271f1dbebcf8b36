#include <Eigen/QR>
#include <algorithm>
#include <cmath>
#include <complex>

#include "toral/centralizer/centralizer.hpp"
#include "toral/exact/linalg.hpp"

namespace toral {

std::vector<const Unit*> CommutantLattice::generators() const {
  std::vector<const Unit*> out;
  for (const auto& u : units)
    if (u.generator) out.push_back(&u);
  return out;
}

CommutantLattice commutant_basis(const IntMatrix& L) {
  if (!L.is_square()) throw PreconditionError("matrix is not square");
  const std::size_t d = L.dim();
  // (XL - LX)_{ij} = sum_k X_{ik} L_{kj} - L_{ik} X_{kj}
  RatMatrix A(d * d, d * d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j)
      for (std::size_t k = 0; k < d; ++k) {
        A(i * d + j, i * d + k) += L(k, j);
        A(i * d + j, k * d + j) -= L(i, k);
      }
  CommutantLattice cl;
  cl.ambient = L;
  cl.lattice = integer_kernel(A);
  auto to_matrix = [d](const IntVector& v) {
    IntMatrix m(d, d);
    for (std::size_t k = 0; k < d * d; ++k) m(k / d, k % d) = v[k];
    return m;
  };
  for (const auto& v : cl.lattice.basis) {
    IntMatrix m = to_matrix(v);
    if (!commutes(m, L)) throw NumericalError("commutant basis element does not commute");
    cl.basis.push_back(std::move(m));
  }

  // the power basis when it spans the whole lattice, otherwise an LLL-reduced basis
  if (cl.lattice.rank() == d) {
    IntMatrix coords(d, d);
    IntMatrix p = IntMatrix::identity(d);
    std::vector<IntMatrix> powers;
    bool ok = true;
    for (std::size_t k = 0; k < d && ok; ++k) {
      auto c = cl.lattice.coordinates(IntVector(p.data().begin(), p.data().end()));
      if (!c) {
        ok = false;
        break;
      }
      for (std::size_t j = 0; j < d; ++j) coords(k, j) = (*c)[j];
      powers.push_back(p);
      p = p * L;
    }
    if (ok && abs(det_exact(coords)) == 1) {
      cl.enumeration_basis = powers;
      cl.power_basis = true;
    }
  }
  if (!cl.power_basis && cl.lattice.rank() > 0) {
    for (const auto& v : lll_reduce(cl.lattice.basis)) cl.enumeration_basis.push_back(to_matrix(v));
  }
  return cl;
}

namespace {

bool has_finite_order(const IntMatrix& m, int max_order = 60) {
  const IntMatrix id = IntMatrix::identity(m.dim());
  IntMatrix p = m;
  for (int k = 1; k <= max_order; ++k) {
    if (p == id) return true;
    p = p * m;
  }
  return false;
}

struct Candidate {
  IntMatrix matrix;
  std::vector<long> coords;
  long sup = 0;
  int nonzero = 0;
  std::size_t degree = 0;  // last nonzero coordinate
  bool positive_lead = false;
  std::size_t order = 0;
  bool is_L = false;
};

double residual_against(const std::vector<std::vector<double>>& basis, const std::vector<double>& v,
                        std::vector<double>* coeffs) {
  const auto m = static_cast<Eigen::Index>(v.size());
  const auto n = static_cast<Eigen::Index>(basis.size());
  Eigen::VectorXd b(m);
  for (Eigen::Index i = 0; i < m; ++i) b(i) = v[static_cast<std::size_t>(i)];
  if (n == 0) {
    if (coeffs) coeffs->clear();
    return b.norm();
  }
  Eigen::MatrixXd A(m, n);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < m; ++i) A(i, j) = basis[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)];
  const Eigen::VectorXd x = A.colPivHouseholderQr().solve(b);
  if (coeffs) coeffs->assign(x.data(), x.data() + n);
  return (A * x - b).norm();
}

}  // namespace

void unit_search(CommutantLattice& cl, const Functionals& F, long radius, UnitSearchStats* stats) {
  if (radius < 0) throw PreconditionError("radius must be nonnegative");
  if (!(cl.ambient == F.matrix())) throw PreconditionError("functionals belong to a different matrix");
  const IntMatrix& L = cl.ambient;
  const std::size_t d = L.dim();
  const std::size_t m = cl.enumeration_basis.size();
  UnitSearchStats st;
  cl.units.clear();
  cl.finite_order = {};
  cl.achieved_rank = 0;
  cl.rank_bound = F.rank_bound();
  for (int s : {1, -1}) {
    Unit u;
    u.matrix = Integer(s) * IntMatrix::identity(d);
    u.name = s > 0 ? "I" : "-I";
    u.functionals.assign(F.class_count(), 0.0);
    u.lambda = F.embed(u.functionals);
    cl.finite_order.push_back(std::move(u));
  }

  // eigenvalues of each enumeration basis element, for the determinant prefilter
  const auto& eig = F.spectrum().eigenvalues;
  const bool prefilter = F.polynomial_mode() && m == d;
  std::vector<std::vector<std::complex<long double>>> beta;
  if (prefilter) {
    for (const auto& B : cl.enumeration_basis) {
      const auto p = F.polynomial_of(B);
      std::vector<std::complex<long double>> row;
      for (const auto& e : eig) {
        const std::complex<long double> z(static_cast<long double>(e.value.real()), static_cast<long double>(e.value.imag()));
        std::complex<long double> acc = 0;
        for (std::size_t k = p.size(); k-- > 0;) acc = acc * z + static_cast<long double>(p[k].get_d());
        row.push_back(acc);
      }
      beta.push_back(std::move(row));
    }
  }

  std::vector<Candidate> found;
  std::vector<long> c(m);
  std::size_t order = 0;
  for (long s = 1; s <= radius && m > 0; ++s) {
    std::fill(c.begin(), c.end(), -s);
    while (true) {
      long sup = 0;
      for (long x : c) sup = std::max(sup, std::labs(x));
      if (sup == s) {
        ++st.candidates;
        bool pass = true;
        if (prefilter) {
          long double total = 0;
          for (std::size_t i = 0; i < eig.size() && pass; ++i) {
            std::complex<long double> z = 0;
            for (std::size_t j = 0; j < m; ++j) z += static_cast<long double>(c[j]) * beta[j][i];
            const long double a = std::abs(z);
            if (!(a > 1e-300L)) pass = false;
            total += eig[i].multiplicity * std::log(a);
          }
          pass = pass && std::abs(total) < 1e-6L;
        }
        if (pass) {
          ++st.passed_prefilter;
          IntMatrix M(d, d);
          for (std::size_t j = 0; j < m; ++j)
            if (c[j] != 0) M += Integer(c[j]) * cl.enumeration_basis[j];
          if (abs(det_exact(M)) == 1) {
            Candidate cand;
            cand.coords = c;
            cand.sup = s;
            for (std::size_t j = 0; j < m; ++j)
              if (c[j] != 0) {
                ++cand.nonzero;
                cand.degree = j;
                cand.positive_lead = c[j] > 0;
              }
            cand.order = order;
            cand.is_L = M == L;
            cand.matrix = std::move(M);
            found.push_back(std::move(cand));
          }
        }
        ++order;
      }
      std::size_t k = m;
      while (k > 0 && c[k - 1] == s) c[--k] = -s;
      if (k == 0) break;
      ++c[k - 1];
    }
  }
  st.units_found = found.size();
  std::stable_sort(found.begin(), found.end(), [](const Candidate& a, const Candidate& b) {
    if (a.is_L != b.is_L) return a.is_L;
    if (a.sup != b.sup) return a.sup < b.sup;
    if (a.nonzero != b.nonzero) return a.nonzero < b.nonzero;
    if (a.degree != b.degree) return a.degree < b.degree;
    if (a.positive_lead != b.positive_lead) return a.positive_lead;
    return a.order < b.order;
  });

  std::vector<Unit> gens, extra;
  std::vector<std::vector<double>> images;
  std::vector<IntMatrix> gen_matrices;
  auto name_of = [&](const Candidate& cand) {
    if (cl.power_basis) {
      std::vector<Integer> co;
      for (long x : cand.coords) co.emplace_back(x);
      return polynomial_name(co);
    }
    std::string n = "u(";
    for (std::size_t j = 0; j < cand.coords.size(); ++j) n += (j ? "," : "") + std::to_string(cand.coords[j]);
    return n + ")";
  };
  for (auto& cand : found) {
    Unit u;
    u.functionals = F.evaluate(cand.matrix).per_class;
    u.lambda = F.embed(u.functionals);
    double norm = 0;
    for (double x : u.lambda) norm = std::max(norm, std::abs(x));
    u.name = name_of(cand);
    if (norm < 1e-6) {
      if (!has_finite_order(cand.matrix)) throw NumericalError("unit with zero embedding has infinite order");
      bool seen = false;
      for (const auto& t : cl.finite_order) seen = seen || t.matrix == cand.matrix;
      u.matrix = cand.matrix;
      if (!seen) cl.finite_order.push_back(std::move(u));
      continue;
    }
    std::vector<double> coeff;
    const double res = residual_against(images, u.lambda, &coeff);
    u.matrix = std::move(cand.matrix);
    u.hyperbolic = is_hyperbolic_element(F, u.matrix);
    if (res >= 1e-6) {
      u.generator = true;
      images.push_back(u.lambda);
      gen_matrices.push_back(u.matrix);
      gens.push_back(std::move(u));
      continue;
    }
    // numerically dependent: confirm with an exact word identity
    std::vector<long> n(coeff.size());
    long len = 0;
    std::vector<double> recon(u.lambda.size(), 0.0);
    for (std::size_t k = 0; k < coeff.size(); ++k) {
      n[k] = std::lround(coeff[k]);
      len += std::labs(n[k]);
      for (std::size_t i = 0; i < recon.size(); ++i) recon[i] += static_cast<double>(n[k]) * images[k][i];
    }
    double err = 0;
    for (std::size_t i = 0; i < recon.size(); ++i) err = std::max(err, std::abs(recon[i] - u.lambda[i]));
    bool confirmed = false;
    if (len <= kIdentityWordLength && err < 1e-6) {
      std::vector<long> neg(n.size());
      for (std::size_t k = 0; k < n.size(); ++k) neg[k] = -n[k];
      confirmed = has_finite_order(u.matrix * evaluate_word(gen_matrices, neg));
    }
    if (confirmed) {
      ++st.confirmed_dependent;
    } else {
      ++st.unconfirmed_dependent;
      extra.push_back(std::move(u));
    }
  }
  cl.achieved_rank = static_cast<int>(gens.size());
  cl.units = std::move(gens);
  for (auto& u : extra) cl.units.push_back(std::move(u));
  for (const auto& u : cl.units)
    if (!commutes(u.matrix, L) || abs(det_exact(u.matrix)) != 1) throw NumericalError("unit search produced a non-unit");
  if (stats) *stats = st;
}

bool is_hyperbolic_element(const Functionals& F, const IntMatrix& gamma) {
  if (!commutes(gamma, F.matrix())) throw PreconditionError("element does not commute with L");
  if (F.polynomial_mode()) {
    bool clear = true;
    for (const HP& x : F.eigen_log_moduli(gamma))
      if (abs(x) <= HP("1e-12")) clear = false;
    if (clear) return true;
  }
  const IntPoly sf = squarefree_part(char_poly(gamma));
  if (sf.sign_at(Rational(1)) == 0 || sf.sign_at(Rational(-1)) == 0) return false;
  return unit_circle_pairs(sf) == 0;
}

bool is_hyperbolic_element(const IntMatrix& L, const IntMatrix& gamma) {
  return is_hyperbolic_element(Functionals(L), gamma);
}

}  // namespace toral
