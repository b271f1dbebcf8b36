#include <doctest.h>

#include "gen.hpp"
#include "toral/exact/lattice.hpp"
#include "toral/exact/linalg.hpp"

using namespace toral;

namespace {

const IntPoly kQuartic{1, -3, 3, -3, 1};

IntMatrix cat_map() { return IntMatrix::from_ints({{2, 1}, {1, 1}}); }

IntVector iv(std::initializer_list<long> xs) {
  IntVector v;
  for (long x : xs) v.emplace_back(x);
  return v;
}

}  // namespace

TEST_CASE("char_poly examples") {
  CHECK(char_poly(companion(kQuartic)) == kQuartic);
  CHECK(char_poly(IntMatrix::identity(2)) == IntPoly({1, -2, 1}));
  CHECK(char_poly(cat_map()) == IntPoly({1, -3, 1}));
}

TEST_CASE("det_exact examples") {
  CHECK(det_exact(IntMatrix::identity(4)) == 1);
  CHECK(det_exact(companion(kQuartic)) == 1);
  CHECK(det_exact(cat_map()) == 1);
  CHECK(det_exact(IntMatrix::from_ints({{0, 1}, {1, 0}})) == -1);
  CHECK(det_exact(IntMatrix::from_ints({{1, 2}, {2, 4}})) == 0);
}

TEST_CASE("char_poly of a companion matrix round-trips") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const int deg = static_cast<int>(testgen::uniform(rng, 1, 8));
    const IntPoly p = testgen::random_monic(rng, deg, 20);
    CHECK(char_poly(companion(p)) == p);
  }
}

TEST_CASE("det equals signed constant coefficient") {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 200; ++trial) {
    const auto d = static_cast<std::size_t>(testgen::uniform(rng, 1, 7));
    const IntMatrix m = testgen::random_matrix(rng, d, 9);
    Integer c0 = char_poly(m).coeff(0);
    if (d % 2) c0 = -c0;
    CHECK(det_exact(m) == c0);
  }
}

TEST_CASE("hnf_basis examples") {
  auto b = hnf_basis({iv({2, 0}), iv({0, 2}), iv({1, 1})}, 2);
  REQUIRE(b.rank() == 2);
  CHECK(b.basis[0] == iv({1, 1}));
  CHECK(b.basis[1] == iv({0, 2}));
  CHECK(b.contains(iv({2, 0})));
  CHECK_FALSE(b.contains(iv({1, 0})));

  auto s = hnf_basis({iv({1, 0}), iv({0, 1})}, 2);
  CHECK(s.basis == std::vector<IntVector>{iv({1, 0}), iv({0, 1})});

  CHECK(hnf_basis({}, 3).rank() == 0);
}

TEST_CASE("hnf_basis generates the same lattice, with a valid transform") {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 100; ++trial) {
    const auto n = static_cast<std::size_t>(testgen::uniform(rng, 1, 5));
    const auto k = static_cast<std::size_t>(testgen::uniform(rng, 1, 6));
    std::vector<IntVector> gens(k, IntVector(n));
    for (auto& g : gens)
      for (auto& x : g) x = testgen::uniform(rng, -6, 6);
    const auto b = hnf_basis(gens, n);
    for (const auto& g : gens) CHECK(b.contains(g));
    // every basis vector is transform * generators
    for (std::size_t i = 0; i < b.rank(); ++i) {
      IntVector v(n);
      for (std::size_t j = 0; j < k; ++j)
        for (std::size_t c = 0; c < n; ++c) v[c] += b.transform(i, j) * gens[j][c];
      CHECK(v == b.basis[i]);
    }
    // rank over Q agrees
    RatMatrix g(k, n);
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t c = 0; c < n; ++c) g(i, c) = gens[i][c];
    CHECK(b.rank() == rank(g));
  }
}

TEST_CASE("integer_kernel examples") {
  auto k1 = integer_kernel(RatMatrix::from_ints({{1, -1}}));
  REQUIRE(k1.rank() == 1);
  CHECK(k1.basis[0] == iv({1, 1}));

  auto k2 = integer_kernel(RatMatrix(2, 2));
  CHECK(k2.basis == std::vector<IntVector>{iv({1, 0}), iv({0, 1})});

  auto k3 = integer_kernel(RatMatrix::from_ints({{2, -1}, {0, 0}}));
  REQUIRE(k3.rank() == 1);
  CHECK(k3.basis[0] == iv({1, 2}));

  RatMatrix half(1, 2);
  half(0, 0) = Rational(1, 2);
  half(0, 1) = Rational(-1, 3);
  auto k4 = integer_kernel(half);
  REQUIRE(k4.rank() == 1);
  CHECK(k4.basis[0] == iv({2, 3}));
}

TEST_CASE("integer_kernel is exact and saturated") {
  std::mt19937_64 rng(14);
  for (int trial = 0; trial < 60; ++trial) {
    const auto rows = static_cast<std::size_t>(testgen::uniform(rng, 1, 2));
    const std::size_t cols = 3;
    RatMatrix a(rows, cols);
    for (std::size_t i = 0; i < rows; ++i)
      for (std::size_t j = 0; j < cols; ++j) a(i, j) = testgen::uniform(rng, -3, 3);
    const auto k = integer_kernel(a);
    CHECK(k.rank() == cols - rank(a));
    for (const auto& v : k.basis) {
      std::vector<Rational> vq(v.begin(), v.end());
      for (const auto& x : a * vq) CHECK(x == 0);
    }
    // brute force over a box: every kernel vector lies in the returned lattice
    for (long x = -4; x <= 4; ++x)
      for (long y = -4; y <= 4; ++y)
        for (long z = -4; z <= 4; ++z) {
          std::vector<Rational> v{x, y, z};
          bool zero = true;
          for (const auto& e : a * v) zero = zero && e == 0;
          if (zero) CHECK(k.contains(iv({x, y, z})));
        }
  }
}

TEST_CASE("lll_reduce keeps the lattice and shortens") {
  std::vector<IntVector> b{iv({1, 1, 1}), iv({-1, 0, 2}), iv({3, 5, 6})};
  const auto r = lll_reduce(b);
  const auto before = hnf_basis(b, 3);
  const auto after = hnf_basis(r, 3);
  CHECK(before.basis == after.basis);
  auto total = [](const std::vector<IntVector>& vs) {
    Integer n2 = 0;
    for (const auto& v : vs)
      for (const auto& x : v) n2 += x * x;
    return n2;
  };
  CHECK(total(r) < total(b));
}

TEST_CASE("column_hnf gives coset representatives") {
  const IntMatrix m = IntMatrix::from_ints({{3, 1}, {1, 2}});  // det 5
  const IntMatrix h = column_hnf(m);
  CHECK(h(0, 1) == 0);
  CHECK(h(0, 0) * h(1, 1) == 5);
  // columns of h generate the same lattice as columns of m
  const auto lm = hnf_basis({m.col(0), m.col(1)}, 2);
  const auto lh = hnf_basis({h.col(0), h.col(1)}, 2);
  CHECK(lm.basis == lh.basis);
}

TEST_CASE("power and inverse") {
  const IntMatrix l = cat_map();
  CHECK(power(l, 2) == IntMatrix::from_ints({{5, 3}, {3, 2}}));
  CHECK(power(l, -1) * l == IntMatrix::identity(2));
  CHECK(char_poly(power(l, 2)) == IntPoly({1, -7, 1}));
}

TEST_CASE("polynomial gcd and squarefree decomposition") {
  const IntPoly a = IntPoly({-1, 1}) * IntPoly({-1, 1}) * IntPoly({1, 0, 1});
  CHECK(gcd(a, a.derivative()) == IntPoly({-1, 1}));
  const auto sf = squarefree_decomposition(a);
  REQUIRE(sf.size() == 2);
  CHECK(sf[0].factor == IntPoly({1, 0, 1}));
  CHECK(sf[0].multiplicity == 1);
  CHECK(sf[1].factor == IntPoly({-1, 1}));
  CHECK(sf[1].multiplicity == 2);
  CHECK(kQuartic.eval(Rational(1)) == -1);
  CHECK(kQuartic.sign_at(Rational(0)) > 0);
  CHECK(kQuartic.sign_at(Rational(1, 2)) < 0);
}
