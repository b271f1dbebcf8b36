#include <doctest.h>

#include <cmath>

#include "gen.hpp"
#include "toral/centralizer/centralizer.hpp"
#include "toral/exact/linalg.hpp"

using namespace toral;

namespace {

const IntPoly kQuartic{1, -3, 3, -3, 1};
IntMatrix quartic() { return companion(kQuartic); }
IntMatrix cat_map() { return IntMatrix::from_ints({{2, 1}, {1, 1}}); }

// s = t + 1/t solves s^2 - 3s + 1 = 0
struct QuarticOracle {
  long double s1 = (3 + std::sqrt(5.0L)) / 2;
  long double s2 = (3 - std::sqrt(5.0L)) / 2;
  long double lambda = (s1 + std::sqrt(s1 * s1 - 4)) / 2;
  long double theta = std::acos(s2 / 2);
};

const Functionals& quartic_functionals() {
  static const Functionals F(quartic());
  return F;
}

const CommutantLattice& quartic_units() {
  static const CommutantLattice cl = [] {
    CommutantLattice c = commutant_basis(quartic());
    unit_search(c, quartic_functionals(), 3);
    return c;
  }();
  return cl;
}

IntVector flat(const IntMatrix& m) { return IntVector(m.data().begin(), m.data().end()); }

}  // namespace

TEST_CASE("commutant lattices") {
  const IntMatrix L = quartic();
  const auto cl = commutant_basis(L);
  CHECK(cl.lattice.rank() == 4);
  IntMatrix p = IntMatrix::identity(4);
  for (int k = 0; k < 4; ++k, p = p * L) CHECK(cl.lattice.contains(flat(p)));
  for (const auto& b : cl.basis) CHECK(commutes(b, L));
  CHECK(cl.power_basis);

  const auto id = commutant_basis(IntMatrix::identity(2));
  CHECK(id.lattice.rank() == 4);
  CHECK_FALSE(id.power_basis);
  CHECK(id.enumeration_basis.size() == 4);

  const auto cat = commutant_basis(cat_map());
  CHECK(cat.lattice.rank() == 2);
  CHECK(cat.lattice.contains(flat(IntMatrix::identity(2))));
  CHECK(cat.lattice.contains(flat(cat_map())));
}

TEST_CASE("commutant of random companion matrices is the polynomial order") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const int d = testgen::uniform(rng, 2, 6);
    const IntMatrix L = companion(testgen::random_monic(rng, d, 4));
    const auto cl = commutant_basis(L);
    CHECK(cl.lattice.rank() >= static_cast<std::size_t>(d));
    // a random polynomial in L lies in the lattice
    IntMatrix M(static_cast<std::size_t>(d), static_cast<std::size_t>(d));
    IntMatrix p = IntMatrix::identity(static_cast<std::size_t>(d));
    for (int k = 0; k < d; ++k, p = p * L) M += Integer(testgen::uniform(rng, -5, 5)) * p;
    CHECK(cl.lattice.contains(flat(M)));
    if (is_irreducible_q(char_poly(L))) {
      CHECK(cl.lattice.rank() == static_cast<std::size_t>(d));
      CHECK(cl.power_basis);
    }
  }
}

TEST_CASE("functionals of L - I on the quartic example") {
  const QuarticOracle o;
  const IntMatrix L = quartic();
  const auto v = functional_of_element(L, L - IntMatrix::identity(4));
  REQUIRE(v.per_class.size() == 3);
  const long double real_hi = std::log(o.lambda - 1);
  const long double real_lo = std::log(std::abs(1 / o.lambda - 1));
  const long double center = std::log(2 * std::sin(o.theta / 2));
  CHECK(std::abs(v.per_class[0] - static_cast<double>(real_hi)) < 1e-12);
  CHECK(std::abs(v.per_class[1] - static_cast<double>(center)) < 1e-12);
  CHECK(std::abs(v.per_class[2] - static_cast<double>(real_lo)) < 1e-12);
  CHECK(std::abs(v.per_class[0] - 0.142992696595858) < 1e-12);
  CHECK(std::abs(v.per_class[1] - 0.240605912529802) < 1e-12);
  CHECK(std::abs(v.per_class[2] + 0.624204521655461) < 1e-12);
  CHECK(v.error < 1e-14);

  const auto vl = functional_of_element(L, L);
  const auto s = classify(L);
  for (std::size_t c = 0; c < 3; ++c) CHECK(std::abs(vl.per_class[c] - s.lyapunov[c].value) < 1e-15);
  for (double x : functional_of_element(L, -IntMatrix::identity(4)).per_class) CHECK(x == 0.0);

  CHECK_THROWS_AS(functional_of_element(L, companion(IntPoly{1, 0, 0, 0, 1})), PreconditionError);
  CHECK_THROWS_AS(functional_of_element(cat_map(), cat_map()), PreconditionError);
}

TEST_CASE("projector route agrees with the polynomial route") {
  const auto& F = quartic_functionals();
  for (const auto& u : quartic_units().units) {
    const auto a = F.evaluate(u.matrix);
    const auto b = F.evaluate_by_projectors(u.matrix);
    for (std::size_t c = 0; c < a.per_class.size(); ++c) CHECK(std::abs(a.per_class[c] - b.per_class[c]) < 1e-8);
  }
}

TEST_CASE("class functionals sum to log|det| on random commutant elements") {
  std::mt19937_64 rng(17);
  int checked = 0;
  for (int trial = 0; trial < 40 && checked < 15; ++trial) {
    const int d = testgen::uniform(rng, 2, 6);
    auto q = testgen::random_monic(rng, d, 4);
    auto c = q.coeffs();
    c[0] = testgen::uniform(rng, 0, 1) ? 1 : -1;
    q = IntPoly(c);
    if (!is_irreducible_q(q)) continue;
    const IntMatrix L = companion(q);
    std::optional<Functionals> F;
    try {
      F.emplace(L);
    } catch (const NumericalError&) {
      continue;  // coincident moduli that cannot be separated
    }
    IntMatrix M(static_cast<std::size_t>(d), static_cast<std::size_t>(d));
    IntMatrix p = IntMatrix::identity(static_cast<std::size_t>(d));
    for (int k = 0; k < d; ++k, p = p * L) M += Integer(testgen::uniform(rng, -3, 3)) * p;
    const Integer det = det_exact(M);
    if (det == 0) continue;
    const auto v = F->evaluate(M);
    double total = 0;
    for (std::size_t k = 0; k < v.per_class.size(); ++k) total += F->class_dim(k) * v.per_class[k];
    CHECK(std::abs(total - std::log(std::abs(det.get_d()))) < 1e-9);
    ++checked;
  }
  CHECK(checked >= 10);
}

TEST_CASE("unit search on the quartic example") {
  const auto& cl = quartic_units();
  const IntMatrix L = quartic();
  CHECK(cl.achieved_rank == 2);
  CHECK(cl.rank_bound == 2);
  const auto gens = cl.generators();
  REQUIRE(gens.size() == 2);
  CHECK(gens[0]->matrix == L);
  CHECK(gens[0]->name == "L");
  CHECK(gens[1]->matrix == L - IntMatrix::identity(4));
  CHECK(gens[1]->name == "L - I");
  CHECK(det_exact(gens[1]->matrix) == -1);
  CHECK_FALSE(gens[0]->hyperbolic);
  CHECK(gens[1]->hyperbolic);
  for (const auto& u : cl.units) {
    CHECK(commutes(u.matrix, L));
    CHECK(abs(det_exact(u.matrix)) == 1);
    double total = 0;
    for (std::size_t c = 0; c < u.functionals.size(); ++c)
      total += quartic_functionals().class_dim(c) * u.functionals[c];
    CHECK(std::abs(total) <= 1e-9);
  }
  CHECK(cl.finite_order.size() == 2);
}

TEST_CASE("unit search edge cases") {
  const IntMatrix L = quartic();
  auto cl = commutant_basis(L);
  unit_search(cl, quartic_functionals(), 0);
  CHECK(cl.achieved_rank == 0);
  CHECK(cl.units.empty());
  REQUIRE(cl.finite_order.size() == 2);
  CHECK(cl.finite_order[0].matrix == IntMatrix::identity(4));
  CHECK(cl.finite_order[1].matrix == -IntMatrix::identity(4));
  CHECK_THROWS_AS(unit_search(cl, quartic_functionals(), -1), PreconditionError);

  const Functionals Fc(cat_map());
  auto cat = commutant_basis(cat_map());
  unit_search(cat, Fc, 2);
  CHECK(cat.achieved_rank == 1);
  CHECK(cat.rank_bound == 1);
  bool has_L = false;
  for (const auto& u : cat.units) has_L = has_L || u.matrix == cat_map();
  CHECK(has_L);
}

TEST_CASE("hyperbolic elements") {
  const auto& F = quartic_functionals();
  const IntMatrix L = quartic();
  const IntMatrix I = IntMatrix::identity(4);
  CHECK_FALSE(is_hyperbolic_element(F, L));
  CHECK(is_hyperbolic_element(F, L - I));
  CHECK_FALSE(is_hyperbolic_element(F, -I));
  CHECK_FALSE(is_hyperbolic_element(F, power(L, -3)));
  CHECK_THROWS_AS(is_hyperbolic_element(F, companion(IntPoly{1, 0, 0, 0, 1})), PreconditionError);
  CHECK(is_hyperbolic_element(cat_map(), cat_map()));
}

TEST_CASE("center-dominating cone element") {
  const auto& cl = quartic_units();
  const auto& F = quartic_functionals();
  const IntMatrix L = quartic();
  const auto hit = cone_search_center_dominating(cl, F);
  REQUIRE(hit.has_value());
  CHECK(hit->word == "L^-1 * (L - I)^2");
  CHECK(hit->matrix == L + unimodular_inverse(L) - Integer(2) * IntMatrix::identity(4));
  const double phi = (1 + std::sqrt(5.0)) / 2;
  CHECK(std::abs(hit->center_log_det - 2 * std::log(phi)) < 1e-8);
  CHECK(std::abs(hit->domination_ratio - 1) < 1e-12);
  CHECK(hit->unstable_is_center);
  CHECK(std::abs(hit->functionals[0] + std::log(phi)) < 1e-12);
  CHECK(std::abs(hit->functionals[2] + std::log(phi)) < 1e-12);

  auto trivial = commutant_basis(L);
  unit_search(trivial, F, 0);
  CHECK_FALSE(cone_search_center_dominating(trivial, F).has_value());

  const Functionals Fc(cat_map());
  auto cat = commutant_basis(cat_map());
  unit_search(cat, Fc, 2);
  CHECK_THROWS_AS(cone_search_center_dominating(cat, Fc), PreconditionError);
}

TEST_CASE("subgroups without hyperbolic elements") {
  const auto& F = quartic_functionals();
  const IntMatrix L = quartic();
  const IntMatrix I = IntMatrix::identity(4);

  const auto one = no_hyperbolic_analysis(F, {L}, {"L"});
  CHECK_FALSE(one.witness.has_value());
  CHECK(one.words_sampled == 12);
  CHECK(one.pairing_holds);
  CHECK(one.max_pairing_error <= 1e-8);
  CHECK(one.rank == 1);
  CHECK(one.rank_limit == 1);
  CHECK(one.rank_ok);

  const auto two = no_hyperbolic_analysis(F, {L, L - I}, {"L", "L - I"});
  REQUIRE(two.witness.has_value());
  CHECK(two.witness_word == "L - I");

  const auto tor = no_hyperbolic_analysis(F, {-I}, {"-I"});
  CHECK_FALSE(tor.witness.has_value());
  CHECK(tor.rank == 0);
  CHECK(tor.rank_ok);

  CHECK_THROWS_AS(no_hyperbolic_analysis(F, {companion(IntPoly{1, 0, 0, 0, 1})}, {"X"}), PreconditionError);
}

TEST_CASE("bounded centralizer subgroup on the quartic example") {
  const auto& cl = quartic_units();
  const auto& F = quartic_functionals();
  const auto b = bounded_centralizer_subgroup(cl, F, 1, 10);
  REQUIRE(b.generators.size() == 1);
  CHECK(b.words[0] == "L");
  CHECK(b.generators[0] == quartic());
  CHECK(b.certificate);
  CHECK(b.omega_bound == doctest::Approx(10.0 / 44));
  CHECK_THROWS_AS(bounded_centralizer_subgroup(cl, F, 2, 10), PreconditionError);
  auto trivial = commutant_basis(quartic());
  unit_search(trivial, F, 0);
  CHECK_THROWS_AS(bounded_centralizer_subgroup(trivial, F, 1, 10), PreconditionError);
}

TEST_CASE("higher rank check") {
  const auto& F = quartic_functionals();
  const IntMatrix L = quartic();
  const IntMatrix I = IntMatrix::identity(4);
  CHECK(higher_rank_check(F, {L, L - I}));
  CHECK_FALSE(higher_rank_check(F, {L}));
  CHECK_FALSE(higher_rank_check(F, {-I}));
}

TEST_CASE("logarithmic embedding is a homomorphism") {
  const auto& F = quartic_functionals();
  std::vector<IntMatrix> gens;
  for (const Unit* u : quartic_units().generators()) gens.push_back(u->matrix);
  std::mt19937_64 rng(23);
  auto random_unit = [&] {
    std::vector<long> k;
    for (std::size_t i = 0; i < gens.size(); ++i) k.push_back(testgen::uniform(rng, -4, 4));
    IntMatrix m = evaluate_word(gens, k);
    return testgen::uniform(rng, 0, 1) ? m : IntMatrix(-m);
  };
  const auto zero = F.evaluate(IntMatrix::identity(4)).per_class;
  for (double x : zero) CHECK(x == 0.0);
  for (int trial = 0; trial < 50; ++trial) {
    const IntMatrix g = random_unit(), h = random_unit();
    const auto a = F.evaluate(g).per_class;
    const auto b = F.evaluate(h).per_class;
    const auto ab = F.evaluate(g * h).per_class;
    const auto ai = F.evaluate(unimodular_inverse(g)).per_class;
    double total = 0;
    for (std::size_t c = 0; c < a.size(); ++c) {
      CHECK(std::abs(ab[c] - a[c] - b[c]) <= 1e-9);
      CHECK(std::abs(ai[c] + a[c]) <= 1e-9);
      total += F.class_dim(c) * ab[c];
    }
    CHECK(std::abs(total) <= 1e-9);
  }
}

TEST_CASE("word and polynomial names") {
  CHECK(polynomial_name({Integer(-1), Integer(1)}) == "L - I");
  CHECK(polynomial_name({Integer(1), Integer(-2), Integer(1)}) == "L^2 - 2*L + I");
  CHECK(polynomial_name({Integer(0), Integer(-1)}) == "-L");
  CHECK(word_to_string({"L", "L - I"}, {-1, 2}) == "L^-1 * (L - I)^2");
  CHECK(word_to_string({"L"}, {0}) == "I");
}
