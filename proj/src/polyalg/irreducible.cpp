#include <algorithm>
#include <cmath>
#include <cstdint>
#include <set>

#include "toral/exact/linalg.hpp"
#include "toral/polyalg/polyalg.hpp"

namespace toral {

namespace {

// ---- polynomials over F_p, coefficients low to high ----

using u64 = std::uint64_t;
using ModPoly = std::vector<u64>;

struct Field {
  u64 p;
  u64 mul(u64 a, u64 b) const { return a * b % p; }
  u64 add(u64 a, u64 b) const { return (a + b) % p; }
  u64 sub(u64 a, u64 b) const { return (a + p - b) % p; }
  u64 pow(u64 a, u64 e) const {
    u64 r = 1;
    a %= p;
    while (e) {
      if (e & 1) r = mul(r, a);
      a = mul(a, a);
      e >>= 1;
    }
    return r;
  }
  u64 inv(u64 a) const { return pow(a, p - 2); }
};

void trim(ModPoly& a) {
  while (!a.empty() && a.back() == 0) a.pop_back();
}

int deg(const ModPoly& a) { return static_cast<int>(a.size()) - 1; }

ModPoly reduce_mod_p(const IntPoly& f, const Field& F) {
  ModPoly r(f.coeffs().size());
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = mpz_fdiv_ui(f.coeffs()[i].get_mpz_t(), F.p);
  trim(r);
  return r;
}

ModPoly rem(ModPoly a, const ModPoly& b, const Field& F) {
  const u64 ib = F.inv(b.back());
  while (deg(a) >= deg(b)) {
    const u64 c = F.mul(a.back(), ib);
    const std::size_t shift = a.size() - b.size();
    for (std::size_t i = 0; i < b.size(); ++i) a[shift + i] = F.sub(a[shift + i], F.mul(c, b[i]));
    trim(a);
  }
  return a;
}

ModPoly quot(ModPoly a, const ModPoly& b, const Field& F) {
  if (deg(a) < deg(b)) return {};
  const u64 ib = F.inv(b.back());
  ModPoly q(a.size() - b.size() + 1);
  while (deg(a) >= deg(b)) {
    const u64 c = F.mul(a.back(), ib);
    const std::size_t shift = a.size() - b.size();
    q[shift] = c;
    for (std::size_t i = 0; i < b.size(); ++i) a[shift + i] = F.sub(a[shift + i], F.mul(c, b[i]));
    trim(a);
  }
  return q;
}

ModPoly mulmod(const ModPoly& a, const ModPoly& b, const ModPoly& m, const Field& F) {
  if (a.empty() || b.empty()) return {};
  ModPoly c(a.size() + b.size() - 1);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) c[i + j] = F.add(c[i + j], F.mul(a[i], b[j]));
  trim(c);
  return rem(std::move(c), m, F);
}

ModPoly powmod(ModPoly base, u64 e, const ModPoly& m, const Field& F) {
  ModPoly r{1};
  base = rem(std::move(base), m, F);
  while (e) {
    if (e & 1) r = mulmod(r, base, m, F);
    base = mulmod(base, base, m, F);
    e >>= 1;
  }
  return r;
}

ModPoly gcd(ModPoly a, ModPoly b, const Field& F) {
  while (!b.empty()) {
    ModPoly r = rem(a, b, F);
    a = std::move(b);
    b = std::move(r);
  }
  if (!a.empty()) {
    const u64 i = F.inv(a.back());
    for (auto& x : a) x = F.mul(x, i);
  }
  return a;
}

ModPoly derivative(const ModPoly& a, const Field& F) {
  ModPoly d;
  for (std::size_t i = 1; i < a.size(); ++i) d.push_back(F.mul(a[i], i % F.p));
  trim(d);
  return d;
}

// Degrees of the irreducible factors of a squarefree f, by distinct-degree factorization.
std::vector<int> factor_degrees(ModPoly f, const Field& F) {
  std::vector<int> degs;
  const ModPoly x{0, 1};
  ModPoly h = x;
  for (int i = 1; 2 * i <= deg(f); ++i) {
    h = powmod(h, F.p, f, F);
    ModPoly hx = h;
    if (hx.size() < 2) hx.resize(2);
    hx[1] = F.sub(hx[1], 1);
    trim(hx);
    const ModPoly g = gcd(f, hx, F);
    if (deg(g) > 0) {
      for (int k = 0; k < deg(g) / i; ++k) degs.push_back(i);
      f = quot(f, g, F);
      h = rem(h, f, F);
    }
  }
  if (deg(f) > 0) degs.push_back(deg(f));
  return degs;
}

std::vector<u64> small_primes(std::size_t count, const Integer& avoid) {
  std::vector<u64> out;
  for (u64 p = 2; out.size() < count; ++p) {
    bool prime = true;
    for (u64 q = 2; q * q <= p; ++q)
      if (p % q == 0) {
        prime = false;
        break;
      }
    if (prime && mpz_fdiv_ui(avoid.get_mpz_t(), p) != 0) out.push_back(p);
  }
  return out;
}

// Mod-p certificate: the set of degrees a rational factor could have, intersected
// across primes, is empty. Irreducible mod a single prime is the special case.
bool modular_certificate(const IntPoly& f) {
  const int n = f.degree();
  std::vector<bool> possible(static_cast<std::size_t>(n) + 1, true);
  for (u64 p : small_primes(25, f.leading())) {
    const Field F{p};
    const ModPoly fp = reduce_mod_p(f, F);
    if (deg(gcd(fp, derivative(fp, F), F)) > 0) continue;
    const auto degs = factor_degrees(fp, F);
    std::vector<bool> sums(static_cast<std::size_t>(n) + 1, false);
    sums[0] = true;
    for (int d : degs)
      for (int s = n; s >= d; --s)
        if (sums[static_cast<std::size_t>(s - d)]) sums[static_cast<std::size_t>(s)] = true;
    bool any = false;
    for (int k = 1; k < n; ++k) {
      possible[static_cast<std::size_t>(k)] = possible[static_cast<std::size_t>(k)] && sums[static_cast<std::size_t>(k)];
      any = any || possible[static_cast<std::size_t>(k)];
    }
    if (!any) return true;
  }
  return false;
}

std::vector<Integer> positive_divisors(Integer n) {
  n = abs(n);
  std::vector<Integer> out;
  if (n == 0) return out;
  // trial division; inputs here are small
  std::vector<std::pair<Integer, int>> fac;
  Integer m = n;
  for (Integer p = 2; p * p <= m; ++p) {
    int e = 0;
    while (mpz_divisible_p(m.get_mpz_t(), p.get_mpz_t())) {
      m /= p;
      ++e;
    }
    if (e) fac.emplace_back(p, e);
  }
  if (m > 1) fac.emplace_back(m, 1);
  out.push_back(1);
  for (const auto& [p, e] : fac) {
    const std::size_t sz = out.size();
    Integer pk = 1;
    for (int k = 1; k <= e; ++k) {
      pk *= p;
      for (std::size_t i = 0; i < sz; ++i) out.push_back(out[i] * pk);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::optional<IntPoly> try_candidate(const IntPoly& f, const IntPoly& g) {
  if (g.degree() < 1 || g.degree() >= f.degree()) return std::nullopt;
  const IntPoly pg = g.primitive_part();
  if (divides(pg, f)) return pg;
  return std::nullopt;
}

using cld = std::complex<long double>;

// Factor search over subsets of approximate roots. Returns {factor, certified}:
// certified means every candidate's coefficients were known to within 1/2, so a
// missing factor proves irreducibility.
std::pair<std::optional<IntPoly>, bool> numeric_factor_search(const IntPoly& f) {
  const int n = f.degree();
  std::vector<ApproxRoot> roots;
  try {
    roots = approximate_roots(f);
  } catch (const Error&) {
    return {std::nullopt, false};
  }
  bool certified = true;
  for (std::size_t i = 0; i < roots.size(); ++i) {
    if (!std::isfinite(static_cast<double>(roots[i].radius))) certified = false;
    for (std::size_t j = 0; j < i; ++j)
      if (std::abs(roots[i].z - roots[j].z) <= roots[i].radius + roots[j].radius) certified = false;
  }
  // group: real roots and conjugate pairs (upper half plane representative)
  std::vector<std::size_t> real, upper;
  for (std::size_t i = 0; i < roots.size(); ++i) {
    const long double im = roots[i].z.imag();
    if (std::abs(im) <= roots[i].radius)
      real.push_back(i);
    else if (im > 0)
      upper.push_back(i);
  }
  if (real.size() + 2 * upper.size() != static_cast<std::size_t>(n)) return {std::nullopt, false};
  const auto lcdivs = positive_divisors(f.leading());
  const std::size_t nr = real.size(), nu = upper.size();
  // enumerate bitmasks over the groups
  const std::size_t total = nr + nu;
  if (total > 24) return {std::nullopt, false};
  for (unsigned long mask = 1; mask + 1 < (1UL << total); ++mask) {
    int k = 0;
    for (std::size_t b = 0; b < total; ++b)
      if (mask >> b & 1UL) k += b < nr ? 1 : 2;
    if (2 * k > n) continue;
    std::vector<cld> coef{cld(1)};
    std::vector<long double> hi{1.0L}, lo{1.0L};
    auto mult = [&](cld z, long double r) {
      coef.push_back(cld(0));
      hi.push_back(0);
      lo.push_back(0);
      for (std::size_t j = coef.size() - 1; j > 0; --j) {
        coef[j] = coef[j - 1] - z * coef[j];
        hi[j] = hi[j - 1] + (std::abs(z) + r) * hi[j];
        lo[j] = lo[j - 1] + std::abs(z) * lo[j];
      }
      coef[0] = -z * coef[0];
      hi[0] = (std::abs(z) + r) * hi[0];
      lo[0] = std::abs(z) * lo[0];
    };
    for (std::size_t b = 0; b < total; ++b) {
      if (!(mask >> b & 1UL)) continue;
      const auto& r = roots[b < nr ? real[b] : upper[b - nr]];
      if (b < nr) {
        mult(cld(r.z.real()), r.radius);
      } else {
        mult(r.z, r.radius);
        mult(std::conj(r.z), r.radius);
      }
    }
    // coef holds the monic product, index = degree
    for (const auto& c : lcdivs) {
      const long double cd = static_cast<long double>(c.get_d());
      std::vector<Integer> g(static_cast<std::size_t>(k) + 1);
      bool ok = true;
      for (int j = 0; j <= k; ++j) {
        const long double val = cd * coef[static_cast<std::size_t>(j)].real();
        const long double err = cd * ((hi[static_cast<std::size_t>(j)] - lo[static_cast<std::size_t>(j)]) +
                                      hi[static_cast<std::size_t>(j)] * 64 * n * 1.1e-19L);
        if (!(err < 0.5L)) certified = false;
        if (!std::isfinite(static_cast<double>(val)) || std::abs(val) > 1e18L) {
          ok = false;
          certified = false;
          break;
        }
        g[static_cast<std::size_t>(j)] = Integer(static_cast<long>(std::llround(static_cast<double>(val))));
        if (std::abs(val) >= 9e15L) certified = false;
      }
      if (!ok) continue;
      if (auto h = try_candidate(f, IntPoly(std::move(g)))) return {h, true};
    }
  }
  return {std::nullopt, certified};
}

// Kronecker: a factor of degree k is fixed by its values at k+1 integer points,
// each of which divides the value of f there.
std::optional<IntPoly> kronecker_factor(const IntPoly& f) {
  const int n = f.degree();
  std::vector<std::pair<Integer, Integer>> pts;  // (x, f(x)) with f(x) != 0
  for (long s = 0; static_cast<int>(pts.size()) < 3 * n + 3; ++s) {
    for (long x : {s, -s}) {
      if (s == 0 && x != 0) continue;
      if (s != 0 && x == 0) continue;
      const Integer v = f.eval(Integer(x));
      if (v == 0) return try_candidate(f, IntPoly{-x, 1});
      pts.emplace_back(Integer(x), v);
      if (s == 0) break;
    }
  }
  // prefer points whose values have few divisors
  std::vector<std::pair<std::size_t, std::size_t>> order;
  std::vector<std::vector<Integer>> divs(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    divs[i] = positive_divisors(pts[i].second);
    order.emplace_back(divs[i].size(), i);
  }
  std::sort(order.begin(), order.end());
  const Integer bound = mignotte_bound(f, n / 2) * abs(f.leading());
  for (int k = 1; 2 * k <= n; ++k) {
    std::vector<std::size_t> use;
    for (int j = 0; j <= k; ++j) use.push_back(order[static_cast<std::size_t>(j)].second);
    std::vector<std::size_t> idx(use.size(), 0);
    std::vector<int> sgn(use.size(), 1);
    const std::size_t m = use.size();
    // odometer over divisor choices and signs; first sign fixed positive
    for (;;) {
      // Lagrange interpolation over Q
      RatMatrix vand(m, m);
      std::vector<Rational> rhs(m);
      for (std::size_t i = 0; i < m; ++i) {
        Rational p = 1;
        for (std::size_t j = 0; j < m; ++j) {
          vand(i, j) = p;
          p *= Rational(pts[use[i]].first);
        }
        rhs[i] = Rational(sgn[i] * divs[use[i]][idx[i]]);
      }
      auto sol = solve_rational(vand, rhs);
      bool integral = sol.has_value();
      if (integral) {
        std::vector<Integer> g(m);
        for (std::size_t j = 0; j < m && integral; ++j) {
          if ((*sol)[j].get_den() != 1 || abs((*sol)[j].get_num()) > bound) integral = false;
          else g[j] = (*sol)[j].get_num();
        }
        if (integral)
          if (auto h = try_candidate(f, IntPoly(std::move(g)))) return h;
      }
      std::size_t pos = 0;
      for (; pos < m; ++pos) {
        if (pos > 0 && sgn[pos] == 1) {
          sgn[pos] = -1;
          break;
        }
        sgn[pos] = 1;
        if (++idx[pos] < divs[use[pos]].size()) break;
        idx[pos] = 0;
      }
      if (pos == m) break;
    }
  }
  return std::nullopt;
}

}  // namespace

std::optional<IntPoly> find_factor(const IntPoly& p) {
  const IntPoly f = p.primitive_part();
  const int n = f.degree();
  if (n <= 1) return std::nullopt;
  if (f.coeff(0) == 0) return IntPoly{0, 1};
  const IntPoly g = gcd(f, f.derivative());
  if (g.degree() > 0) {
    const IntPoly h = divide_exact(f, g).primitive_part();
    return g.degree() <= h.degree() ? g : h;
  }
  auto [factor, certified] = numeric_factor_search(f);
  if (factor) return factor;
  if (certified) return std::nullopt;
  return kronecker_factor(f);
}

bool is_irreducible_q(const IntPoly& p) {
  if (p.degree() < 1) throw PreconditionError("irreducibility is undefined in degree 0");
  const IntPoly f = p.primitive_part();
  if (f.degree() == 1) return true;
  if (f.coeff(0) == 0) return false;
  if (gcd(f, f.derivative()).degree() > 0) return false;
  if (modular_certificate(f)) return true;
  return !find_factor(f).has_value();
}

}  // namespace toral
