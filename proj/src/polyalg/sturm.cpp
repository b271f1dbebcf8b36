#include <algorithm>

#include "toral/polyalg/polyalg.hpp"

namespace toral {

namespace {

// Divide by the absolute content, keeping signs.
IntPoly positive_reduce(const IntPoly& p) {
  if (p.is_zero()) return p;
  const Integer g = p.content();
  if (g == 1) return p;
  std::vector<Integer> c(p.coeffs().size());
  for (std::size_t i = 0; i < c.size(); ++i) mpz_divexact(c[i].get_mpz_t(), p.coeffs()[i].get_mpz_t(), g.get_mpz_t());
  return IntPoly(std::move(c));
}

int sign_at_infinity(const IntPoly& p, bool negative) {
  int s = sgn(p.leading());
  if (negative && p.degree() % 2) s = -s;
  return s;
}

int count_changes(const std::vector<int>& signs) {
  int changes = 0;
  int last = 0;
  for (int s : signs) {
    if (s == 0) continue;
    if (last != 0 && s != last) ++changes;
    last = s;
  }
  return changes;
}

}  // namespace

SturmSequence::SturmSequence(const IntPoly& p) {
  if (p.is_zero()) throw PreconditionError("Sturm sequence of the zero polynomial");
  chain_.push_back(positive_reduce(p));
  if (p.degree() == 0) return;
  chain_.push_back(positive_reduce(p.derivative()));
  while (chain_.back().degree() > 0) {
    const IntPoly& a = chain_[chain_.size() - 2];
    const IntPoly& b = chain_.back();
    IntPoly r = pseudo_divide(a, b).remainder;
    // lc(b)^e scaling must stay positive to keep the chain's signs
    const int e = a.degree() - b.degree() + 1;
    if (b.leading() < 0 && e % 2) r = -r;
    if (r.is_zero()) break;
    chain_.push_back(positive_reduce(-r));
  }
}

int SturmSequence::variations(const Rational& x) const {
  std::vector<int> s;
  s.reserve(chain_.size());
  for (const auto& q : chain_) s.push_back(q.sign_at(x));
  return count_changes(s);
}

int SturmSequence::count_half_open(const Rational& a, const Rational& b) const {
  if (b < a) throw PreconditionError("Sturm count on an empty interval");
  return variations(a) - variations(b);
}

int SturmSequence::count_open(const Rational& a, const Rational& b) const {
  if (b <= a) return 0;
  return count_half_open(a, b) - (chain_.front().sign_at(b) == 0 ? 1 : 0);
}

int SturmSequence::count_real() const {
  std::vector<int> lo, hi;
  for (const auto& q : chain_) {
    lo.push_back(sign_at_infinity(q, true));
    hi.push_back(sign_at_infinity(q, false));
  }
  return count_changes(lo) - count_changes(hi);
}

void require_squarefree(const IntPoly& p) {
  if (p.degree() <= 0) return;
  const IntPoly g = gcd(p, p.derivative());
  if (g.degree() > 0)
    throw PreconditionError("polynomial is not squarefree: repeated factor " + g.to_string());
}

Rational cauchy_bound(const IntPoly& p) {
  if (p.degree() < 1) return Rational(1);
  Rational m = 0;
  const Integer lc = abs(p.leading());
  for (int i = 0; i < p.degree(); ++i) {
    Rational r(abs(p.coeff(i)), lc);
    r.canonicalize();
    if (r > m) m = r;
  }
  return m + 1;
}

namespace {

void isolate_rec(const IntPoly& p, const SturmSequence& s, const Rational& lo, const Rational& hi, int count,
                 std::vector<RationalInterval>& out) {
  if (count == 0) return;
  if (count == 1 && p.sign_at(lo) != 0 && p.sign_at(hi) != 0) {
    out.push_back({lo, hi});
    return;
  }
  Rational m = (lo + hi) / 2;
  while (p.sign_at(m) == 0) m = (lo + m) / 2;
  const int left = s.count_open(lo, m);
  isolate_rec(p, s, lo, m, left, out);
  isolate_rec(p, s, m, hi, count - left, out);
}

}  // namespace

std::vector<RationalInterval> sturm_isolate(const IntPoly& p, const std::optional<RationalInterval>& range) {
  if (p.is_zero()) throw PreconditionError("root isolation of the zero polynomial");
  require_squarefree(p);
  std::vector<RationalInterval> out;
  if (p.degree() == 0) return out;
  const SturmSequence s(p);
  Rational lo, hi;
  if (range) {
    lo = range->lo;
    hi = range->hi;
  } else {
    hi = cauchy_bound(p);
    lo = -hi;
  }
  isolate_rec(p, s, lo, hi, s.count_open(lo, hi), out);
  return out;
}

RootIsolation isolate_roots(const IntPoly& p) {
  RootIsolation r;
  r.real_intervals = sturm_isolate(p);
  r.complex_pair_count = (p.degree() - static_cast<int>(r.real_intervals.size())) / 2;
  r.unit_circle_pair_count = unit_circle_pairs(p);
  return r;
}

RationalInterval refine_root(const IntPoly& p, RationalInterval iv, const Rational& width) {
  if (p.sign_at(iv.lo) == 0) return {iv.lo, iv.lo};
  if (p.sign_at(iv.hi) == 0) return {iv.hi, iv.hi};
  const int slo = p.sign_at(iv.lo);
  if (slo == p.sign_at(iv.hi)) throw PreconditionError("refine_root: interval does not bracket a simple root");
  while (iv.width() > width) {
    const Rational m = iv.midpoint();
    const int sm = p.sign_at(m);
    if (sm == 0) return {m, m};
    if (sm == slo)
      iv.lo = m;
    else
      iv.hi = m;
  }
  return iv;
}

}  // namespace toral
