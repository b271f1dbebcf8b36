#pragma once

#include <initializer_list>
#include <string>
#include <vector>

#include "toral/exact/matrix.hpp"

namespace toral {

/// Univariate polynomial with arbitrary-precision integer coefficients.
/// Coefficient index equals degree; the leading coefficient is kept nonzero.
class IntPoly {
 public:
  IntPoly() = default;
  explicit IntPoly(std::vector<Integer> coeffs);
  IntPoly(std::initializer_list<long> coeffs);

  static IntPoly monomial(int degree, const Integer& c = 1);

  /// -1 for the zero polynomial.
  int degree() const noexcept { return static_cast<int>(c_.size()) - 1; }
  bool is_zero() const noexcept { return c_.empty(); }
  const std::vector<Integer>& coeffs() const noexcept { return c_; }
  Integer coeff(int i) const;
  const Integer& leading() const;
  bool is_monic() const { return !c_.empty() && c_.back() == 1; }

  Integer content() const;
  /// Divides by the content and makes the leading coefficient positive.
  IntPoly primitive_part() const;

  IntPoly derivative() const;
  /// t^deg * p(1/t)
  IntPoly reversed() const;
  /// p(-t)
  IntPoly negated_variable() const;

  Rational eval(const Rational& x) const;
  Integer eval(const Integer& x) const;
  int sign_at(const Rational& x) const;
  double eval_double(double x) const;

  IntPoly& operator+=(const IntPoly& o);
  IntPoly& operator-=(const IntPoly& o);
  IntPoly& operator*=(const Integer& s);
  friend IntPoly operator+(IntPoly a, const IntPoly& b) { return a += b; }
  friend IntPoly operator-(IntPoly a, const IntPoly& b) { return a -= b; }
  friend IntPoly operator-(IntPoly a) {
    a *= Integer(-1);
    return a;
  }
  friend IntPoly operator*(const IntPoly& a, const IntPoly& b);
  friend IntPoly operator*(const Integer& s, IntPoly a) { return a *= s; }
  friend bool operator==(const IntPoly& a, const IntPoly& b) { return a.c_ == b.c_; }

  /// Composition p(q(t)).
  IntPoly compose(const IntPoly& q) const;

  std::string to_string(const std::string& var = "t") const;

 private:
  void trim();
  std::vector<Integer> c_;
};

struct PseudoDivision {
  IntPoly quotient;
  IntPoly remainder;
};

/// lc(b)^(deg a - deg b + 1) * a = q*b + r.
PseudoDivision pseudo_divide(const IntPoly& a, const IntPoly& b);

/// Exact division a / b over Z[t]; throws PreconditionError if b does not divide a.
IntPoly divide_exact(const IntPoly& a, const IntPoly& b);

/// True if b divides a in Q[t].
bool divides(const IntPoly& b, const IntPoly& a);

/// Primitive gcd with positive leading coefficient (gcd(0,0) = 0).
IntPoly gcd(const IntPoly& a, const IntPoly& b);

/// p / gcd(p, p'), primitive.
IntPoly squarefree_part(const IntPoly& p);

struct SquarefreeFactor {
  IntPoly factor;
  int multiplicity;
};

/// Yun decomposition of a primitive polynomial: p = c * prod f_i^i.
std::vector<SquarefreeFactor> squarefree_decomposition(const IntPoly& p);

/// Standard companion matrix: ones on the subdiagonal, last column -c_0..-c_{d-1}.
IntMatrix companion(const IntPoly& monic);

/// p(M) for a square integer matrix.
IntMatrix evaluate_at_matrix(const IntPoly& p, const IntMatrix& m);

}  // namespace toral
