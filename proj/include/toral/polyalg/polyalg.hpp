#pragma once

#include <complex>
#include <optional>
#include <vector>

#include "toral/exact/poly.hpp"

namespace toral {

struct RationalInterval {
  Rational lo;
  Rational hi;
  Rational width() const { return hi - lo; }
  Rational midpoint() const { return (lo + hi) / 2; }
};

/// Real roots of a squarefree polynomial, one per interval, plus pair counts.
struct RootIsolation {
  std::vector<RationalInterval> real_intervals;
  int complex_pair_count = 0;
  int unit_circle_pair_count = 0;
};

/// Sturm chain of a squarefree polynomial.
class SturmSequence {
 public:
  explicit SturmSequence(const IntPoly& p);

  /// Sign variations at x (zeros dropped).
  int variations(const Rational& x) const;
  /// Distinct roots in (a, b].
  int count_half_open(const Rational& a, const Rational& b) const;
  /// Distinct roots in the open interval (a, b).
  int count_open(const Rational& a, const Rational& b) const;
  /// Distinct real roots.
  int count_real() const;

  const IntPoly& poly() const { return chain_.front(); }

 private:
  std::vector<IntPoly> chain_;
};

/// Throws PreconditionError naming gcd(p, p') if p has a repeated factor.
void require_squarefree(const IntPoly& p);

/// Strict bound: every complex root z has |z| < cauchy_bound(p).
Rational cauchy_bound(const IntPoly& p);

/// Isolating intervals for the real roots of squarefree p, sorted ascending.
/// Endpoints are never roots. With `range`, only roots in the open range are kept
/// and the intervals lie inside it.
std::vector<RationalInterval> sturm_isolate(const IntPoly& p,
                                            const std::optional<RationalInterval>& range = std::nullopt);

/// Full isolation: real intervals, complex pair count and unit-circle pair count.
RootIsolation isolate_roots(const IntPoly& p);

/// Shrinks an isolating interval of a simple root by bisection until its width is
/// at most `width`. A degenerate result lo == hi means the root is exactly rational.
RationalInterval refine_root(const IntPoly& p, RationalInterval iv, const Rational& width);

/// Irreducibility over Q of a primitive polynomial of degree >= 1.
bool is_irreducible_q(const IntPoly& p);

/// A nontrivial factor (primitive, degree between 1 and deg/2) if p is reducible.
std::optional<IntPoly> find_factor(const IntPoly& p);

bool self_reciprocal_test(const IntPoly& p);

/// P with q(t) = t^(d/2) P(t + 1/t), for monic self-reciprocal q of even degree d.
IntPoly trace_poly_decompose(const IntPoly& q);

/// Inverse of trace_poly_decompose: t^n P(t + 1/t) for P of degree n.
IntPoly trace_poly_expand(const IntPoly& P);

/// Number of conjugate root pairs on the unit circle of a squarefree polynomial.
int unit_circle_pairs(const IntPoly& q);

struct PowerStructure {
  int n = 1;
  IntPoly q;  // p(t) = q(t^n)
};

/// Largest n with p(t) = Q(t^n).
PowerStructure poly_in_tn(const IntPoly& p);

/// m-th cyclotomic polynomial.
IntPoly cyclotomic(int m);

int euler_phi(int m);

/// The m of every cyclotomic factor Phi_m of p (empty if none).
std::vector<int> cyclotomic_factors(const IntPoly& p);
bool has_root_of_unity_factor(const IntPoly& p);

/// Mignotte bound on the coefficients of any degree-k factor of p.
Integer mignotte_bound(const IntPoly& p, int k);

struct ApproxRoot {
  std::complex<long double> z;
  long double radius;  // a true root lies within this distance
};

/// All complex roots of squarefree p: eigenvalues of the companion matrix
/// polished by Newton steps, each with an inclusion radius.
std::vector<ApproxRoot> approximate_roots(const IntPoly& p);

}  // namespace toral
