#include <map>
#include <mutex>
#include <numeric>

#include "toral/polyalg/polyalg.hpp"

namespace toral {

namespace {

// t^a (t^2 + 1)^k
IntPoly shifted_power(int a, int k) {
  IntPoly s = IntPoly::monomial(a);
  const IntPoly q{1, 0, 1};
  for (int i = 0; i < k; ++i) s = s * q;
  return s;
}

}  // namespace

bool self_reciprocal_test(const IntPoly& p) { return !p.is_zero() && p.reversed() == p; }

IntPoly trace_poly_decompose(const IntPoly& q) {
  if (q.degree() < 0 || q.degree() % 2) throw PreconditionError("trace polynomial needs even degree");
  if (!self_reciprocal_test(q)) throw PreconditionError("trace polynomial needs a self-reciprocal polynomial");
  const int n = q.degree() / 2;
  IntPoly rest = q;
  std::vector<Integer> c(static_cast<std::size_t>(n) + 1);
  for (int k = n; k >= 0; --k) {
    const Integer lead = rest.coeff(n + k);
    c[static_cast<std::size_t>(k)] = lead;
    if (lead != 0) rest -= lead * shifted_power(n - k, k);
  }
  if (!rest.is_zero()) throw NumericalError("trace polynomial re-expansion failed");
  IntPoly P(std::move(c));
  if (trace_poly_expand(P) != q) throw NumericalError("trace polynomial re-expansion failed");
  return P;
}

IntPoly trace_poly_expand(const IntPoly& P) {
  const int n = P.degree();
  IntPoly q;
  for (int k = 0; k <= n; ++k)
    if (P.coeff(k) != 0) q += P.coeff(k) * shifted_power(n - k, k);
  return q;
}

int unit_circle_pairs(const IntPoly& q) {
  if (q.degree() < 1) return 0;
  require_squarefree(q);
  // roots on S^1 are shared by q and its reversal
  IntPoly g = gcd(q, q.reversed());
  const IntPoly tm1{-1, 1}, tp1{1, 1};
  while (g.degree() > 0 && g.sign_at(Rational(1)) == 0) g = divide_exact(g, tm1);
  while (g.degree() > 0 && g.sign_at(Rational(-1)) == 0) g = divide_exact(g, tp1);
  g = g.primitive_part();
  if (g.degree() <= 0) return 0;
  if (!self_reciprocal_test(g)) throw NumericalError("reciprocal part is not palindromic");
  const IntPoly P = squarefree_part(trace_poly_decompose(g));
  return SturmSequence(P).count_open(Rational(-2), Rational(2));
}

PowerStructure poly_in_tn(const IntPoly& p) {
  if (p.is_zero()) throw PreconditionError("poly_in_tn of the zero polynomial");
  int n = 0;
  for (int e = 0; e <= p.degree(); ++e)
    if (p.coeff(e) != 0) n = std::gcd(n, e);
  if (n == 0) n = 1;
  std::vector<Integer> c(static_cast<std::size_t>(p.degree() / n) + 1);
  for (int e = 0; e <= p.degree(); e += n) c[static_cast<std::size_t>(e / n)] = p.coeff(e);
  return {n, IntPoly(std::move(c))};
}

int euler_phi(int m) {
  int result = m;
  for (int p = 2; p * p <= m; ++p) {
    if (m % p) continue;
    while (m % p == 0) m /= p;
    result -= result / p;
  }
  if (m > 1) result -= result / m;
  return result;
}

IntPoly cyclotomic(int m) {
  if (m < 1) throw PreconditionError("cyclotomic index must be positive");
  static std::mutex mu;
  static std::map<int, IntPoly> cache;
  {
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(m);
    if (it != cache.end()) return it->second;
  }
  IntPoly num = IntPoly::monomial(m) - IntPoly{1};
  for (int d = 1; d < m; ++d)
    if (m % d == 0) num = divide_exact(num, cyclotomic(d));
  std::lock_guard<std::mutex> lock(mu);
  cache.emplace(m, num);
  return num;
}

std::vector<int> cyclotomic_factors(const IntPoly& p) {
  std::vector<int> out;
  const int d = p.degree();
  if (d < 1) return out;
  // phi(m) >= sqrt(m/2), so every m with phi(m) <= d satisfies m <= 2d^2
  const int cap = 3 * d * d;
  for (int m = 1; m <= cap; ++m) {
    if (euler_phi(m) > d) continue;
    if (divides(cyclotomic(m), p)) out.push_back(m);
  }
  return out;
}

bool has_root_of_unity_factor(const IntPoly& p) { return !cyclotomic_factors(p).empty(); }

Integer mignotte_bound(const IntPoly& p, int k) {
  Integer norm2 = 0;
  for (const auto& c : p.coeffs()) norm2 += c * c;
  Integer norm;
  mpz_sqrt(norm.get_mpz_t(), norm2.get_mpz_t());
  norm += 1;
  Integer binom;
  mpz_bin_uiui(binom.get_mpz_t(), static_cast<unsigned long>(k), static_cast<unsigned long>(k / 2));
  return binom * norm;
}

}  // namespace toral
