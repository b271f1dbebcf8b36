#include "toral/exact/lattice.hpp"

#include <utility>

namespace toral {

namespace {

void axpy(IntVector& y, const Integer& a, const IntVector& x) {
  for (std::size_t j = 0; j < y.size(); ++j) y[j] -= a * x[j];
}

struct Echelon {
  std::vector<IntVector> rows;  // nonzero rows first
  std::vector<IntVector> u;     // unimodular transform, rows * generators
  std::vector<std::size_t> pivots;
};

// Row Hermite normal form by Euclidean elimination on the smallest pivot.
Echelon row_hnf(std::vector<IntVector> a, std::size_t n) {
  const std::size_t k = a.size();
  std::vector<IntVector> u(k, IntVector(k));
  for (std::size_t i = 0; i < k; ++i) u[i][i] = 1;
  std::vector<std::size_t> pivots;
  std::size_t r = 0;
  Integer q;
  for (std::size_t col = 0; col < n && r < k; ++col) {
    for (;;) {
      std::size_t best = k;
      for (std::size_t i = r; i < k; ++i)
        if (a[i][col] != 0 && (best == k || abs(a[i][col]) < abs(a[best][col]))) best = i;
      if (best == k) break;
      std::swap(a[r], a[best]);
      std::swap(u[r], u[best]);
      bool others = false;
      for (std::size_t i = r + 1; i < k; ++i) {
        if (a[i][col] == 0) continue;
        mpz_fdiv_q(q.get_mpz_t(), a[i][col].get_mpz_t(), a[r][col].get_mpz_t());
        axpy(a[i], q, a[r]);
        axpy(u[i], q, u[r]);
        if (a[i][col] != 0) others = true;
      }
      if (!others) break;
    }
    if (r == k || a[r][col] == 0) continue;
    if (a[r][col] < 0) {
      for (auto& x : a[r]) x = -x;
      for (auto& x : u[r]) x = -x;
    }
    for (std::size_t i = 0; i < r; ++i) {
      if (a[i][col] == 0) continue;
      mpz_fdiv_q(q.get_mpz_t(), a[i][col].get_mpz_t(), a[r][col].get_mpz_t());
      axpy(a[i], q, a[r]);
      axpy(u[i], q, u[r]);
    }
    pivots.push_back(col);
    ++r;
  }
  return {std::move(a), std::move(u), std::move(pivots)};
}

}  // namespace

std::optional<IntVector> LatticeBasis::coordinates(const IntVector& v) const {
  if (v.size() != ambient_dim) throw PreconditionError("lattice membership: wrong vector length");
  IntVector rest = v;
  IntVector c(rank());
  for (std::size_t i = 0; i < rank(); ++i) {
    const std::size_t p = pivots[i];
    for (std::size_t j = (i ? pivots[i - 1] + 1 : 0); j < p; ++j)
      if (rest[j] != 0) return std::nullopt;
    if (!mpz_divisible_p(rest[p].get_mpz_t(), basis[i][p].get_mpz_t())) return std::nullopt;
    mpz_divexact(c[i].get_mpz_t(), rest[p].get_mpz_t(), basis[i][p].get_mpz_t());
    axpy(rest, c[i], basis[i]);
  }
  for (const auto& x : rest)
    if (x != 0) return std::nullopt;
  return c;
}

IntVector LatticeBasis::combine(const IntVector& coords) const {
  if (coords.size() != rank()) throw PreconditionError("lattice combine: wrong coordinate count");
  IntVector v(ambient_dim);
  for (std::size_t i = 0; i < rank(); ++i)
    for (std::size_t j = 0; j < ambient_dim; ++j) v[j] += coords[i] * basis[i][j];
  return v;
}

LatticeBasis hnf_basis(const std::vector<IntVector>& vectors, std::size_t n) {
  for (const auto& v : vectors)
    if (v.size() != n) throw PreconditionError("hnf_basis: vectors of unequal length");
  LatticeBasis out;
  out.ambient_dim = n;
  Echelon e = row_hnf(vectors, n);
  const std::size_t r = e.pivots.size();
  out.basis.assign(e.rows.begin(), e.rows.begin() + static_cast<std::ptrdiff_t>(r));
  out.pivots = std::move(e.pivots);
  out.transform = IntMatrix(r, vectors.size());
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < vectors.size(); ++j) out.transform(i, j) = e.u[i][j];
  return out;
}

LatticeBasis integer_kernel(const RatMatrix& a) {
  const std::size_t n = a.rows();
  const std::size_t m = a.cols();
  IntMatrix b(n, m);
  for (std::size_t i = 0; i < n; ++i) {
    Integer l = 1;
    for (std::size_t j = 0; j < m; ++j) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), a(i, j).get_den().get_mpz_t());
    for (std::size_t j = 0; j < m; ++j) {
      Rational s = a(i, j) * Rational(l);
      b(i, j) = s.get_num();
    }
  }
  // Rows [b^T | I]: rows of the echelon form with vanishing left block span the kernel.
  std::vector<IntVector> rows(m, IntVector(n + m));
  for (std::size_t j = 0; j < m; ++j) {
    for (std::size_t i = 0; i < n; ++i) rows[j][i] = b(i, j);
    rows[j][n + j] = 1;
  }
  Echelon e = row_hnf(std::move(rows), n);
  std::vector<IntVector> kernel;
  for (std::size_t i = e.pivots.size(); i < m; ++i)
    kernel.emplace_back(e.rows[i].begin() + static_cast<std::ptrdiff_t>(n), e.rows[i].end());
  return hnf_basis(kernel, m);
}

std::vector<IntVector> lll_reduce(std::vector<IntVector> b) {
  const std::size_t k = b.size();
  if (k <= 1) return b;
  const std::size_t n = b.front().size();
  auto dot = [n](const auto& x, const auto& y) {
    Rational s = 0;
    for (std::size_t j = 0; j < n; ++j) s += Rational(x[j]) * Rational(y[j]);
    return s;
  };
  std::vector<std::vector<Rational>> bs(k, std::vector<Rational>(n));
  std::vector<std::vector<Rational>> mu(k, std::vector<Rational>(k));
  std::vector<Rational> norm(k);
  auto gram_schmidt = [&]() {
    for (std::size_t i = 0; i < k; ++i) {
      for (std::size_t j = 0; j < n; ++j) bs[i][j] = b[i][j];
      for (std::size_t l = 0; l < i; ++l) {
        mu[i][l] = dot(b[i], bs[l]) / norm[l];
        for (std::size_t j = 0; j < n; ++j) bs[i][j] -= mu[i][l] * bs[l][j];
      }
      norm[i] = dot(bs[i], bs[i]);
      if (norm[i] == 0) throw PreconditionError("lll_reduce: vectors are linearly dependent");
    }
  };
  gram_schmidt();
  const Rational delta(3, 4);
  std::size_t i = 1;
  while (i < k) {
    for (std::size_t l = i; l-- > 0;) {
      Rational m = mu[i][l];
      // round to nearest integer
      Integer q;
      Rational half = m + Rational(1, 2);
      mpz_fdiv_q(q.get_mpz_t(), half.get_num().get_mpz_t(), half.get_den().get_mpz_t());
      if (q == 0) continue;
      axpy(b[i], q, b[l]);
      for (std::size_t j = 0; j < l; ++j) mu[i][j] -= Rational(q) * mu[l][j];
      mu[i][l] -= Rational(q);
    }
    if (norm[i] >= (delta - mu[i][i - 1] * mu[i][i - 1]) * norm[i - 1]) {
      ++i;
    } else {
      std::swap(b[i], b[i - 1]);
      gram_schmidt();
      i = i > 1 ? i - 1 : 1;
    }
  }
  return b;
}

IntMatrix column_hnf(const IntMatrix& m) {
  if (!m.is_square()) throw PreconditionError("column_hnf: matrix must be square");
  const std::size_t d = m.rows();
  std::vector<IntVector> rows(d);
  for (std::size_t j = 0; j < d; ++j) rows[j] = m.col(j);
  Echelon e = row_hnf(std::move(rows), d);
  if (e.pivots.size() != d) throw PreconditionError("column_hnf: matrix is singular");
  IntMatrix h(d, d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) h(j, i) = e.rows[i][j];
  return h;
}

}  // namespace toral
