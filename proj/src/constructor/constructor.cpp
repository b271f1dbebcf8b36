#include "toral/constructor/constructor.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <optional>
#include <sstream>

#include "toral/exact/lattice.hpp"
#include "toral/exact/linalg.hpp"

namespace toral {

namespace {

// First failed seed clause, or empty.
std::string seed_clause(const IntPoly& p) {
  if (p.degree() < 2) return "property (P) requires d >= 4";
  if (!p.is_monic()) return "seed is not monic";
  if (abs(p.coeff(0)) != 1) return "constant term is not +-1";
  if (p.sign_at(Rational(2)) == 0 || p.sign_at(Rational(-2)) == 0) return "seed has a root at +-2";
  if (gcd(p, p.derivative()).degree() > 0) return "seed is reducible";
  const SturmSequence s(p);
  if (s.count_real() != p.degree()) return "seed is not totally real";
  if (!is_irreducible_q(p)) return "seed is reducible";
  const int inside = s.count_open(Rational(-2), Rational(2));
  if (inside == 0) return "no root in (-2,2)";
  if (inside == 2) return "two roots in (-2,2)";
  if (inside > 2) return std::to_string(inside) + " roots in (-2,2)";
  return {};
}

std::vector<double> log_roots_outside(const IntPoly& p) {
  std::vector<double> out;
  for (const auto& iv : sturm_isolate(p)) {
    const auto r = refine_root(p, iv, Rational(1, 1000000000));
    const double x = std::abs(r.midpoint().get_d());
    if (x > 2) out.push_back(std::log(x));
  }
  std::sort(out.rbegin(), out.rend());
  return out;
}

// chi = acosh(|mu|/2) computed from x = log|mu|
double exponent_from_log_root(double x) { return std::acosh(std::exp(x) / 2); }

bool numeric_spread(const std::vector<double>& x, long r, double N) {
  for (std::size_t j = 0; j + 1 < x.size(); ++j)
    if (!(exponent_from_log_root(N * x[j]) > static_cast<double>(r) * exponent_from_log_root(N * x[j + 1]) * (1 + 1e-12)))
      return false;
  return true;
}

bool ratios_exceed(const std::vector<double>& x, long r) {
  for (std::size_t j = 0; j + 1 < x.size(); ++j)
    if (!(x[j] > static_cast<double>(r) * x[j + 1])) return false;
  return true;
}

int sgn_first_upper(const IntMatrix& J) {
  for (std::size_t i = 0; i < J.dim(); ++i)
    for (std::size_t j = i + 1; j < J.dim(); ++j)
      if (J(i, j) != 0) return sgn(J(i, j));
  return 0;
}

class Clock {
 public:
  explicit Clock(double seconds) : limit_(seconds), start_(std::chrono::steady_clock::now()) {}
  bool expired() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count() > limit_;
  }

 private:
  double limit_;
  std::chrono::steady_clock::time_point start_;
};

}  // namespace

SeedReport build_from_seed(const IntPoly& p) {
  const std::string clause = seed_clause(p);
  if (!clause.empty()) throw PreconditionError(clause);
  SeedReport rep;
  rep.seed = p;
  rep.q = trace_poly_expand(p);
  rep.L = companion(rep.q);
  rep.det = det_exact(rep.L);
  rep.q_irreducible = is_irreducible_q(rep.q);
  const auto P = has_property_p(rep.L);
  rep.property_p = P.holds;
  rep.seed_log_roots = log_roots_outside(p);
  if (abs(rep.det) != 1) throw NumericalError("expanded matrix is not unimodular");
  if (!rep.q_irreducible) throw NumericalError("expanded polynomial is reducible");
  if (!rep.property_p) throw NumericalError("expanded matrix fails property (P): " + P.failed_clause);
  return rep;
}

ConstructResult construct_spread(int d, long r, const ConstructBudget& budget) {
  if (d < 4 || d % 2 != 0) throw PreconditionError("d must be even and at least 4");
  if (r < 1) throw PreconditionError("r must be positive");
  const int n = d / 2;
  const Clock clock(budget.seconds);
  ConstructResult res;
  std::string best;

  // Tries the base seed and its powers; fills res on success.
  auto attempt = [&](const IntPoly& base, int phase) -> bool {
    ++res.candidates;
    if (!seed_clause(base).empty()) return false;
    const auto x = log_roots_outside(base);
    if (!ratios_exceed(x, r) && !numeric_spread(x, r, 1)) {
      if (best.empty()) best = base.to_string("z") + ": log-root ratios do not exceed r";
      return false;
    }
    const IntMatrix C = companion(base);
    for (int N = 1; N <= budget.max_power && !clock.expired(); ++N) {
      if (!numeric_spread(x, r, N)) continue;
      const IntPoly seed = N == 1 ? base : char_poly(power(C, N));
      if (!seed_clause(seed).empty()) continue;
      SeedReport rep;
      try {
        rep = build_from_seed(seed);
      } catch (const Error& e) {
        best = seed.to_string("z") + ": " + e.what();
        continue;
      }
      const auto s = classify(rep.L);
      if (!spread_spectrum(s, r)) {
        best = seed.to_string("z") + ": spread fails on certified intervals";
        continue;
      }
      res.L = rep.L;
      res.base_seed = base;
      res.seed = seed;
      res.power = N;
      res.phase = phase;
      res.report = std::move(rep);
      res.spread = true;
      res.ergodic = is_ergodic(res.L);
      res.poly_in_tn = poly_in_tn(res.report.q).n;
      for (const auto& c : s.lyapunov)
        if (!c.center && c.value > 0) res.exponents.push_back(c.value);
      return true;
    }
    return false;
  };

  // phase 1: coefficient vectors (c_{n-1}, ..., c_1) in shells of growing sup-norm,
  // lexicographic, constant term +1 before -1
  long box = budget.max_coeff;
  if (box <= 0) {
    box = 1;
    while (true) {
      const double next = 2.0 * std::pow(2.0 * static_cast<double>(box + 1) + 1, n - 1);
      if (next > static_cast<double>(budget.max_candidates)) break;
      ++box;
    }
  }
  std::vector<long> c(static_cast<std::size_t>(n - 1));
  for (long s = n == 1 ? 0 : 1; s <= box && !clock.expired(); ++s) {
    std::fill(c.begin(), c.end(), -s);
    while (true) {
      long sup = 0;
      for (long v : c) sup = std::max(sup, std::labs(v));
      if (sup == s) {
        for (long c0 : {1L, -1L}) {
          std::vector<Integer> co(static_cast<std::size_t>(n + 1));
          co[0] = c0;
          for (int k = 1; k < n; ++k) co[static_cast<std::size_t>(k)] = c[static_cast<std::size_t>(n - 1 - k)];
          co[static_cast<std::size_t>(n)] = 1;
          if (attempt(IntPoly(co), 1)) return res;
        }
      }
      std::size_t k = c.size();
      while (k > 0 && c[k - 1] == s) c[--k] = -s;
      if (k == 0) break;
      ++c[k - 1];
    }
  }

  // phase 2: t * prod (t - a_i) +- 1 with a_{n-1} = anchor and each a_j the smallest
  // integer whose trace exponent exceeds r times the next one
  for (long anchor = 3; anchor <= budget.max_anchor && !clock.expired(); ++anchor) {
    std::vector<double> a{static_cast<double>(anchor)};
    bool ok = true;
    for (int j = 1; j < n - 1 && ok; ++j) {
      const double target = static_cast<double>(r) * std::acosh(a.back() / 2);
      double next = std::floor(2 * std::cosh(target)) + 1;
      if (next <= a.back()) next = a.back() + 1;
      if (next > 1e15) ok = false;
      a.push_back(next);
    }
    if (!ok) break;
    IntPoly prod{0, 1};
    for (double v : a) prod = prod * IntPoly(std::vector<Integer>{Integer(-static_cast<long>(v)), Integer(1)});
    for (long sgn : {1L, -1L})
      if (attempt(prod + IntPoly{sgn}, 2)) return res;
  }

  std::ostringstream msg;
  msg << "construction budget exhausted after " << res.candidates << " candidates";
  if (!best.empty()) msg << "; best candidate " << best;
  throw NumericalError(msg.str());
}

IntMatrix symplectic_form(const IntMatrix& L) {
  if (!L.is_square()) throw PreconditionError("matrix is not square");
  const std::size_t d = L.dim();
  if (d % 2 != 0 || d == 0) throw PreconditionError("dimension must be even");
  // unknowns J_ab, a < b
  std::vector<std::pair<std::size_t, std::size_t>> idx;
  for (std::size_t a = 0; a < d; ++a)
    for (std::size_t b = a + 1; b < d; ++b) idx.emplace_back(a, b);
  const std::size_t m = idx.size();
  auto basis_J = [&](std::size_t k) {
    IntMatrix J(d, d);
    J(idx[k].first, idx[k].second) = 1;
    J(idx[k].second, idx[k].first) = -1;
    return J;
  };
  // column k: the upper triangle of L^T E_k L - E_k
  RatMatrix A(m, m);
  const IntMatrix Lt = L.transpose();
  for (std::size_t k = 0; k < m; ++k) {
    const IntMatrix E = basis_J(k);
    const IntMatrix R = Lt * E * L - E;
    for (std::size_t e = 0; e < m; ++e) A(e, k) = R(idx[e].first, idx[e].second);
  }
  const LatticeBasis ker = integer_kernel(A);
  if (ker.rank() == 0) throw PreconditionError("no nonzero invariant antisymmetric form");
  std::vector<IntMatrix> sols;
  for (const auto& v : ker.basis) {
    IntMatrix J(d, d);
    for (std::size_t k = 0; k < m; ++k) {
      J(idx[k].first, idx[k].second) = v[k];
      J(idx[k].second, idx[k].first) = -v[k];
    }
    sols.push_back(std::move(J));
  }
  // combinations in shells of growing sup-norm, lexicographic within a shell
  const std::size_t nb = sols.size();
  std::vector<long> c(nb);
  for (long s = 1; s <= 3; ++s) {
    std::fill(c.begin(), c.end(), -s);
    while (true) {
      long sup = 0;
      for (long v : c) sup = std::max(sup, std::labs(v));
      if (sup == s) {
        IntMatrix J(d, d);
        for (std::size_t i = 0; i < nb; ++i)
          if (c[i] != 0) J += Integer(c[i]) * sols[i];
        if (det_exact(J) != 0) {
          Integer g = 0;
          for (const auto& x : J.data()) g = gcd(g, x);
          if (sgn_first_upper(J) < 0) g = -g;
          for (std::size_t i = 0; i < d; ++i)
            for (std::size_t j = 0; j < d; ++j) J(i, j) /= g;
          if (!(J.transpose() == -J) || !(Lt * J * L == J) || det_exact(J) == 0)
            throw NumericalError("symplectic form failed exact verification");
          return J;
        }
      }
      std::size_t k = nb;
      while (k > 0 && c[k - 1] == s) c[--k] = -s;
      if (k == 0) break;
      ++c[k - 1];
    }
  }
  throw PreconditionError("no nondegenerate invariant antisymmetric form");
}

}  // namespace toral
