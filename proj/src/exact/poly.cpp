#include "toral/exact/poly.hpp"

#include <algorithm>
#include <sstream>

namespace toral {

IntPoly::IntPoly(std::vector<Integer> coeffs) : c_(std::move(coeffs)) { trim(); }

IntPoly::IntPoly(std::initializer_list<long> coeffs) {
  for (long c : coeffs) c_.emplace_back(c);
  trim();
}

IntPoly IntPoly::monomial(int degree, const Integer& c) {
  std::vector<Integer> v(static_cast<std::size_t>(degree) + 1);
  v.back() = c;
  return IntPoly(std::move(v));
}

void IntPoly::trim() {
  while (!c_.empty() && c_.back() == 0) c_.pop_back();
}

Integer IntPoly::coeff(int i) const {
  if (i < 0 || i > degree()) return 0;
  return c_[static_cast<std::size_t>(i)];
}

const Integer& IntPoly::leading() const {
  if (c_.empty()) throw PreconditionError("leading coefficient of the zero polynomial");
  return c_.back();
}

Integer IntPoly::content() const {
  Integer g = 0;
  for (const auto& c : c_) mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), c.get_mpz_t());
  return g;
}

IntPoly IntPoly::primitive_part() const {
  if (is_zero()) return *this;
  Integer g = content();
  if (c_.back() < 0) g = -g;
  std::vector<Integer> v(c_.size());
  for (std::size_t i = 0; i < c_.size(); ++i) mpz_divexact(v[i].get_mpz_t(), c_[i].get_mpz_t(), g.get_mpz_t());
  return IntPoly(std::move(v));
}

IntPoly IntPoly::derivative() const {
  if (c_.size() <= 1) return IntPoly();
  std::vector<Integer> v(c_.size() - 1);
  for (std::size_t i = 1; i < c_.size(); ++i) v[i - 1] = c_[i] * Integer(static_cast<unsigned long>(i));
  return IntPoly(std::move(v));
}

IntPoly IntPoly::reversed() const {
  std::vector<Integer> v(c_.rbegin(), c_.rend());
  return IntPoly(std::move(v));
}

IntPoly IntPoly::negated_variable() const {
  std::vector<Integer> v = c_;
  for (std::size_t i = 1; i < v.size(); i += 2) v[i] = -v[i];
  return IntPoly(std::move(v));
}

Rational IntPoly::eval(const Rational& x) const {
  // Horner on numerator/denominator to stay in integers.
  const Integer& p = x.get_num();
  const Integer& q = x.get_den();
  Integer acc = 0;
  Integer qpow = 1;
  for (std::size_t k = c_.size(); k-- > 0;) {
    acc = acc * p + c_[k] * qpow;
    qpow *= q;
  }
  // acc = sum c_k p^k q^(n-k) with n = degree
  Integer den = 1;
  mpz_pow_ui(den.get_mpz_t(), q.get_mpz_t(), c_.empty() ? 0 : c_.size() - 1);
  Rational r(acc, den);
  r.canonicalize();
  return r;
}

Integer IntPoly::eval(const Integer& x) const {
  Integer acc = 0;
  for (std::size_t k = c_.size(); k-- > 0;) acc = acc * x + c_[k];
  return acc;
}

int IntPoly::sign_at(const Rational& x) const {
  const Integer& p = x.get_num();
  const Integer& q = x.get_den();
  Integer acc = 0;
  Integer qpow = 1;
  for (std::size_t k = c_.size(); k-- > 0;) {
    acc = acc * p + c_[k] * qpow;
    qpow *= q;
  }
  return sgn(acc);  // q > 0 so the scaling preserves sign
}

double IntPoly::eval_double(double x) const {
  double acc = 0.0;
  for (std::size_t k = c_.size(); k-- > 0;) acc = acc * x + c_[k].get_d();
  return acc;
}

IntPoly& IntPoly::operator+=(const IntPoly& o) {
  if (o.c_.size() > c_.size()) c_.resize(o.c_.size());
  for (std::size_t i = 0; i < o.c_.size(); ++i) c_[i] += o.c_[i];
  trim();
  return *this;
}

IntPoly& IntPoly::operator-=(const IntPoly& o) {
  if (o.c_.size() > c_.size()) c_.resize(o.c_.size());
  for (std::size_t i = 0; i < o.c_.size(); ++i) c_[i] -= o.c_[i];
  trim();
  return *this;
}

IntPoly& IntPoly::operator*=(const Integer& s) {
  for (auto& c : c_) c *= s;
  trim();
  return *this;
}

IntPoly operator*(const IntPoly& a, const IntPoly& b) {
  if (a.is_zero() || b.is_zero()) return IntPoly();
  std::vector<Integer> v(a.c_.size() + b.c_.size() - 1);
  for (std::size_t i = 0; i < a.c_.size(); ++i)
    for (std::size_t j = 0; j < b.c_.size(); ++j) v[i + j] += a.c_[i] * b.c_[j];
  return IntPoly(std::move(v));
}

IntPoly IntPoly::compose(const IntPoly& q) const {
  IntPoly acc;
  for (std::size_t k = c_.size(); k-- > 0;) {
    acc = acc * q;
    acc += IntPoly({c_[k]});
  }
  return acc;
}

std::string IntPoly::to_string(const std::string& var) const {
  if (c_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (std::size_t k = c_.size(); k-- > 0;) {
    const Integer& c = c_[k];
    if (c == 0) continue;
    Integer mag = abs(c);
    if (first) {
      if (c < 0) os << "-";
    } else {
      os << (c < 0 ? " - " : " + ");
    }
    if (k == 0 || mag != 1) os << mag.get_str();
    if (k >= 1) os << var;
    if (k >= 2) os << '^' << k;
    first = false;
  }
  return os.str();
}

PseudoDivision pseudo_divide(const IntPoly& a, const IntPoly& b) {
  if (b.is_zero()) throw PreconditionError("division by the zero polynomial");
  if (a.degree() < b.degree()) return {IntPoly(), a};
  const int db = b.degree();
  const Integer lb = b.leading();
  std::vector<Integer> r = a.coeffs();
  std::vector<Integer> q(static_cast<std::size_t>(a.degree() - db + 1));
  for (int k = a.degree(); k >= db; --k) {
    const Integer lead = r[static_cast<std::size_t>(k)];
    // scale everything by lb, then subtract lead * t^(k-db) * b
    for (auto& x : r) x *= lb;
    for (auto& x : q) x *= lb;
    q[static_cast<std::size_t>(k - db)] += lead;
    for (int i = 0; i <= db; ++i) r[static_cast<std::size_t>(k - db + i)] -= lead * b.coeffs()[static_cast<std::size_t>(i)];
  }
  r.resize(static_cast<std::size_t>(db));
  return {IntPoly(std::move(q)), IntPoly(std::move(r))};
}

IntPoly divide_exact(const IntPoly& a, const IntPoly& b) {
  if (b.is_zero()) throw PreconditionError("division by the zero polynomial");
  if (a.is_zero()) return IntPoly();
  if (a.degree() < b.degree()) throw PreconditionError("inexact polynomial division");
  const int db = b.degree();
  const Integer& lb = b.leading();
  std::vector<Integer> r = a.coeffs();
  std::vector<Integer> q(static_cast<std::size_t>(a.degree() - db + 1));
  for (int k = a.degree(); k >= db; --k) {
    const Integer& lead = r[static_cast<std::size_t>(k)];
    if (lead == 0) continue;
    if (!mpz_divisible_p(lead.get_mpz_t(), lb.get_mpz_t()))
      throw PreconditionError("inexact polynomial division");
    Integer c;
    mpz_divexact(c.get_mpz_t(), lead.get_mpz_t(), lb.get_mpz_t());
    q[static_cast<std::size_t>(k - db)] = c;
    for (int i = 0; i <= db; ++i) r[static_cast<std::size_t>(k - db + i)] -= c * b.coeffs()[static_cast<std::size_t>(i)];
  }
  for (const auto& x : r)
    if (x != 0) throw PreconditionError("inexact polynomial division");
  return IntPoly(std::move(q));
}

bool divides(const IntPoly& b, const IntPoly& a) {
  if (b.is_zero()) return a.is_zero();
  return pseudo_divide(a, b).remainder.is_zero();
}

IntPoly gcd(const IntPoly& a, const IntPoly& b) {
  IntPoly x = a.primitive_part();
  IntPoly y = b.primitive_part();
  if (x.degree() < y.degree()) std::swap(x, y);
  while (!y.is_zero()) {
    IntPoly r = pseudo_divide(x, y).remainder.primitive_part();
    x = std::move(y);
    y = std::move(r);
  }
  return x.primitive_part();
}

IntPoly squarefree_part(const IntPoly& p) {
  if (p.degree() <= 0) return p.primitive_part();
  const IntPoly g = gcd(p, p.derivative());
  return divide_exact(p.primitive_part(), g).primitive_part();
}

std::vector<SquarefreeFactor> squarefree_decomposition(const IntPoly& p) {
  std::vector<SquarefreeFactor> out;
  IntPoly a = p.primitive_part();
  if (a.degree() <= 0) return out;
  IntPoly b = a.derivative();
  IntPoly c = gcd(a, b);
  IntPoly w = divide_exact(a, c).primitive_part();
  int i = 1;
  while (c.degree() > 0) {
    IntPoly y = gcd(w, c);
    IntPoly z = divide_exact(w, y).primitive_part();
    if (z.degree() > 0) out.push_back({z, i});
    ++i;
    w = y;
    c = divide_exact(c, y).primitive_part();
  }
  if (w.degree() > 0) out.push_back({w, i});
  return out;
}

IntMatrix companion(const IntPoly& monic) {
  if (!monic.is_monic() || monic.degree() < 1)
    throw PreconditionError("companion matrix needs a monic polynomial of degree >= 1");
  const auto d = static_cast<std::size_t>(monic.degree());
  IntMatrix c(d, d);
  for (std::size_t i = 1; i < d; ++i) c(i, i - 1) = 1;
  for (std::size_t i = 0; i < d; ++i) c(i, d - 1) = -monic.coeffs()[i];
  return c;
}

IntMatrix evaluate_at_matrix(const IntPoly& p, const IntMatrix& m) {
  IntMatrix acc(m.rows(), m.cols());
  for (std::size_t k = p.coeffs().size(); k-- > 0;) {
    acc = acc * m;
    for (std::size_t i = 0; i < m.rows(); ++i) acc(i, i) += p.coeffs()[k];
  }
  return acc;
}

}  // namespace toral
