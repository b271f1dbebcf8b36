#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <cmath>

#include "gen.hpp"
#include "toral/polyalg/polyalg.hpp"

using namespace toral;

namespace {

const IntPoly kQuartic{1, -3, 3, -3, 1};

using i128 = __int128;

// Exact division check of f by g over Z with 128-bit arithmetic.
bool divides_small(std::vector<long> f, const std::vector<long>& g) {
  const std::size_t dg = g.size() - 1;
  for (std::size_t k = f.size() - 1; k + 1 >= g.size() && k < f.size(); --k) {
    if (f[k] == 0) {
      if (k == dg) break;
      continue;
    }
    if (f[k] % g[dg] != 0) return false;
    const long c = f[k] / g[dg];
    for (std::size_t i = 0; i <= dg; ++i) {
      const i128 v = static_cast<i128>(f[k - dg + i]) - static_cast<i128>(c) * g[i];
      if (v > (i128(1) << 62) || v < -(i128(1) << 62)) return false;
      f[k - dg + i] = static_cast<long>(v);
    }
    if (k == dg) break;
  }
  for (long x : f)
    if (x != 0) return false;
  return true;
}

std::vector<long> small_divisors(long n) {
  std::vector<long> d;
  n = std::labs(n);
  for (long k = 1; k <= n; ++k)
    if (n % k == 0) d.push_back(k);
  return d;
}

long eval_small(const std::vector<long>& g, long x) {
  long acc = 0;
  for (std::size_t k = g.size(); k-- > 0;) acc = acc * x + g[k];
  return acc;
}

// Oracle: every integer factor candidate inside the Mignotte box.
bool brute_force_reducible(const IntPoly& p) {
  std::vector<long> f;
  for (const auto& c : p.coeffs()) f.push_back(c.get_si());
  const int n = p.degree();
  if (n <= 1) return false;
  if (f[0] == 0) return true;
  double norm = 0;
  for (long c : f) norm += static_cast<double>(c) * static_cast<double>(c);
  norm = std::sqrt(norm);
  const long f1 = eval_small(f, 1), fm1 = eval_small(f, -1);
  for (int k = 1; 2 * k <= n; ++k) {
    std::vector<long> bound(static_cast<std::size_t>(k) + 1);
    for (int j = 0; j <= k; ++j) bound[static_cast<std::size_t>(j)] = static_cast<long>(std::ceil(std::tgamma(k + 1.0) / (std::tgamma(j + 1.0) * std::tgamma(k - j + 1.0)) * norm));
    for (long lc : small_divisors(f.back())) {
      for (long c0abs : small_divisors(f[0])) {
        for (long c0 : {c0abs, -c0abs}) {
          std::vector<long> g(static_cast<std::size_t>(k) + 1);
          g[0] = c0;
          g[static_cast<std::size_t>(k)] = lc;
          if (k == 1) {
            if (divides_small(f, g)) return true;
            continue;
          }
          // odometer over the middle coefficients
          for (int j = 1; j < k; ++j) g[static_cast<std::size_t>(j)] = -bound[static_cast<std::size_t>(j)];
          for (;;) {
            const long g1 = eval_small(g, 1), gm1 = eval_small(g, -1);
            if ((f1 == 0 || (g1 != 0 && f1 % g1 == 0)) && (fm1 == 0 || (gm1 != 0 && fm1 % gm1 == 0)) &&
                divides_small(f, g))
              return true;
            int j = 1;
            for (; j < k; ++j) {
              if (++g[static_cast<std::size_t>(j)] <= bound[static_cast<std::size_t>(j)]) break;
              g[static_cast<std::size_t>(j)] = -bound[static_cast<std::size_t>(j)];
            }
            if (j == k) break;
          }
        }
      }
    }
  }
  return false;
}

IntPoly random_poly(std::mt19937_64& rng, int deg, long bound) {
  std::vector<Integer> c(static_cast<std::size_t>(deg) + 1);
  for (auto& x : c) x = testgen::uniform(rng, -bound, bound);
  while (c.back() == 0) c.back() = testgen::uniform(rng, -bound, bound);
  return IntPoly(std::move(c));
}

long max_abs(const IntPoly& p) {
  long m = 0;
  for (const auto& c : p.coeffs()) m = std::max(m, std::labs(c.get_si()));
  return m;
}

}  // namespace

TEST_CASE("sturm_isolate examples") {
  const RationalInterval open22{Rational(-2), Rational(2)};
  auto a = sturm_isolate(IntPoly{1, -3, 1}, open22);
  REQUIRE(a.size() == 1);
  const double root = (3 - std::sqrt(5.0)) / 2;
  CHECK(a[0].lo.get_d() < root);
  CHECK(a[0].hi.get_d() > root);
  CHECK(sturm_isolate(IntPoly{-1, -1, 1}, open22).size() == 2);
  CHECK(sturm_isolate(IntPoly{1, 0, 1}).empty());
  CHECK_THROWS_AS(sturm_isolate(IntPoly{1, 2, 1}), PreconditionError);
  try {
    sturm_isolate(IntPoly{1, 2, 1});
  } catch (const PreconditionError& e) {
    CHECK(std::string(e.what()).find("t + 1") != std::string::npos);
  }
}

TEST_CASE("isolation intervals are disjoint, non-root endpoints, one sign change each") {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 150; ++trial) {
    IntPoly p = random_poly(rng, static_cast<int>(testgen::uniform(rng, 1, 9)), 12);
    p = squarefree_part(p);
    if (p.degree() < 1) continue;
    const auto iv = sturm_isolate(p);
    const SturmSequence s(p);
    CHECK(static_cast<int>(iv.size()) == s.count_real());
    for (std::size_t i = 0; i < iv.size(); ++i) {
      CHECK(p.sign_at(iv[i].lo) != 0);
      CHECK(p.sign_at(iv[i].hi) != 0);
      CHECK(p.sign_at(iv[i].lo) != p.sign_at(iv[i].hi));
      CHECK(s.count_open(iv[i].lo, iv[i].hi) == 1);
      if (i) CHECK(iv[i - 1].hi <= iv[i].lo);
    }
  }
}

TEST_CASE("Sturm counts are additive over a partition") {
  std::mt19937_64 rng(22);
  for (int trial = 0; trial < 150; ++trial) {
    IntPoly p = squarefree_part(random_poly(rng, static_cast<int>(testgen::uniform(rng, 1, 8)), 9));
    if (p.degree() < 1) continue;
    const SturmSequence s(p);
    std::vector<Rational> cuts{Rational(-20)};
    for (int i = 0; i < 5; ++i) cuts.push_back(cuts.back() + Rational(testgen::uniform(rng, 1, 40), 5));
    int sum = 0;
    for (std::size_t i = 1; i < cuts.size(); ++i) sum += s.count_half_open(cuts[i - 1], cuts[i]);
    CHECK(sum == s.count_half_open(cuts.front(), cuts.back()));
  }
}

TEST_CASE("refine_root reaches the requested width") {
  const IntPoly p{-2, 0, 1};
  auto iv = sturm_isolate(p);
  REQUIRE(iv.size() == 2);
  const auto r = refine_root(p, iv[1], Rational(1, 1000000000000L));
  CHECK(r.width() <= Rational(1, 1000000000000L));
  CHECK(r.lo.get_d() <= std::sqrt(2.0));
  CHECK(r.hi.get_d() >= std::sqrt(2.0) - 1e-15);
  const auto exact = refine_root(IntPoly{-1, 1}, {Rational(0), Rational(2)}, Rational(1, 100));
  CHECK(exact.lo == 1);
  CHECK(exact.hi == 1);
}

TEST_CASE("is_irreducible_q examples") {
  CHECK(is_irreducible_q(kQuartic));
  CHECK_FALSE(is_irreducible_q(IntPoly{-1, 0, 1}));
  CHECK(is_irreducible_q(IntPoly{1, -3, 1}));
  CHECK(is_irreducible_q(IntPoly{1, 0, 0, 0, 1}));  // reducible mod every prime
  CHECK_FALSE(is_irreducible_q(IntPoly{4, 0, 0, 0, 1}));  // (t^2+2t+2)(t^2-2t+2)
  CHECK_THROWS_AS(is_irreducible_q(IntPoly{5}), PreconditionError);
}

TEST_CASE("is_irreducible_q agrees with a brute-force Mignotte-box oracle") {
  std::mt19937_64 rng(23);
  int reducible = 0, tested = 0;
  for (int trial = 0; trial < 240; ++trial) {
    IntPoly p;
    if (trial % 2 == 0) {
      p = random_poly(rng, static_cast<int>(testgen::uniform(rng, 2, 6)), 10);
    } else {
      const int da = static_cast<int>(testgen::uniform(rng, 1, 3));
      const int db = static_cast<int>(testgen::uniform(rng, 1, 6 - da));
      p = random_poly(rng, da, 3) * random_poly(rng, db, 3);
    }
    p = p.primitive_part();
    if (p.degree() < 2 || max_abs(p) > 10) continue;
    ++tested;
    const bool oracle_reducible = brute_force_reducible(p);
    reducible += oracle_reducible;
    INFO(p.to_string());
    CHECK(is_irreducible_q(p) == !oracle_reducible);
  }
  CHECK(tested > 150);
  CHECK(reducible > 30);
}

TEST_CASE("self_reciprocal_test examples") {
  CHECK(self_reciprocal_test(kQuartic));
  CHECK(self_reciprocal_test(IntPoly{1, -3, 1}));
  CHECK_FALSE(self_reciprocal_test(IntPoly{-1, -1, 1}));
}

TEST_CASE("trace_poly_decompose examples and round trip") {
  CHECK(trace_poly_decompose(kQuartic) == IntPoly({1, -3, 1}));
  CHECK(trace_poly_decompose(IntPoly{1, -3, 1}) == IntPoly({-3, 1}));
  CHECK(trace_poly_decompose(IntPoly{1, 2, 1}) == IntPoly({2, 1}));
  CHECK_THROWS_AS(trace_poly_decompose(IntPoly{1, 1, 1, 1}), PreconditionError);
  CHECK_THROWS_AS(trace_poly_decompose(IntPoly{-1, -1, 1}), PreconditionError);
  std::mt19937_64 rng(24);
  for (int trial = 0; trial < 100; ++trial) {
    const IntPoly P = testgen::random_monic(rng, static_cast<int>(testgen::uniform(rng, 0, 6)), 15);
    const IntPoly q = trace_poly_expand(P);
    CHECK(self_reciprocal_test(q));
    CHECK(trace_poly_decompose(q) == P);
  }
}

TEST_CASE("unit_circle_pairs examples") {
  CHECK(unit_circle_pairs(kQuartic) == 1);
  CHECK(unit_circle_pairs(IntPoly{1, -3, 1}) == 0);
  CHECK(unit_circle_pairs(IntPoly{1, -1, 1}) == 1);
  CHECK(unit_circle_pairs(IntPoly{1, 0, 1} * IntPoly{-2, 1}) == 1);  // not self-reciprocal
  CHECK(unit_circle_pairs(IntPoly{-1, 1} * IntPoly{1, 1}) == 0);
  CHECK_THROWS_AS(unit_circle_pairs(IntPoly{1, 0, 1} * IntPoly{1, 0, 1}), PreconditionError);
}

TEST_CASE("unit_circle_pairs matches floating root moduli on random palindromes") {
  std::mt19937_64 rng(25);
  int done = 0;
  while (done < 100) {
    const int n = static_cast<int>(testgen::uniform(rng, 1, 4));
    const IntPoly P = testgen::random_monic(rng, n, 6);
    const IntPoly q = trace_poly_expand(P);
    if (gcd(q, q.derivative()).degree() > 0) continue;
    ++done;
    const int d = q.degree();
    Eigen::MatrixXd comp = Eigen::MatrixXd::Zero(d, d);
    for (int i = 1; i < d; ++i) comp(i, i - 1) = 1;
    for (int i = 0; i < d; ++i) comp(i, d - 1) = -q.coeff(i).get_d();
    Eigen::EigenSolver<Eigen::MatrixXd> es(comp, false);
    int on_circle = 0;
    for (int i = 0; i < d; ++i) {
      const auto z = es.eigenvalues()(i);
      if (std::abs(std::abs(z) - 1.0) < 1e-9 && std::abs(z.imag()) > 1e-9) ++on_circle;
    }
    INFO(q.to_string());
    CHECK(2 * unit_circle_pairs(q) == on_circle);
  }
}

TEST_CASE("poly_in_tn examples") {
  CHECK(poly_in_tn(kQuartic).n == 1);
  const auto s = poly_in_tn(IntPoly{1, 0, 3, 0, 1});
  CHECK(s.n == 2);
  CHECK(s.q == IntPoly({1, 3, 1}));
  CHECK(poly_in_tn(IntPoly{-2, 0, 0, 0, 0, 0, 1}).n == 6);
}

TEST_CASE("cyclotomic polynomials and root-of-unity factors") {
  CHECK(cyclotomic(1) == IntPoly({-1, 1}));
  CHECK(cyclotomic(6) == IntPoly({1, -1, 1}));
  CHECK(cyclotomic(12) == IntPoly({1, 0, -1, 0, 1}));
  for (int m = 1; m <= 60; ++m) CHECK(cyclotomic(m).degree() == euler_phi(m));
  CHECK(has_root_of_unity_factor(IntPoly{1, -1, 1}));
  CHECK_FALSE(has_root_of_unity_factor(kQuartic));
  CHECK(has_root_of_unity_factor(IntPoly{-1, 1}));
  CHECK(cyclotomic_factors(IntPoly{1, -3, 1} * cyclotomic(7)) == std::vector<int>{7});
}

TEST_CASE("approximate_roots inclusion radii contain the exact roots") {
  const auto roots = approximate_roots(IntPoly{-2, 0, 1});
  REQUIRE(roots.size() == 2);
  for (const auto& r : roots) {
    const long double target = r.z.real() > 0 ? std::sqrt(2.0L) : -std::sqrt(2.0L);
    CHECK(std::abs(r.z - std::complex<long double>(target)) <= r.radius + 1e-18L);
    CHECK(r.radius < 1e-15L);
  }
}
