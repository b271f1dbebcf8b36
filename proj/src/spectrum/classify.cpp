#include <algorithm>
#include <numeric>

#include "toral/exact/linalg.hpp"
#include "toral/spectrum/spectrum.hpp"

namespace toral {

namespace {

struct HpEval {
  HPC p, dp;
  HP scale;  // sum |c_i| |z|^i, for the rounding allowance
};

HpEval eval_hp(const IntPoly& f, const HPC& z) {
  HPC p(0), dp(0);
  HP s = 0;
  const HP az = abs(z);
  for (std::size_t k = f.coeffs().size(); k-- > 0;) {
    dp = dp * z + p;
    const HP c = to_hp(f.coeffs()[k]);
    p = p * z + HPC(c);
    s = s * az + abs(c);
  }
  return {p, dp, s};
}

// Newton polish plus inclusion radius n |f/f'|.
void polish(const IntPoly& f, HPC& z, HP& radius) {
  for (int it = 0; it < 60; ++it) {
    const HpEval e = eval_hp(f, z);
    if (abs(e.dp) == 0) break;
    const HPC step = e.p / e.dp;
    z -= step;
    if (abs(step) <= abs(z) * HP("1e-95")) break;
  }
  const HpEval e = eval_hp(f, z);
  const HP allowance = e.scale * HP("1e-97");
  const HP den = abs(e.dp) - allowance;
  if (den <= 0) throw NumericalError("root polishing failed: derivative vanishes numerically");
  radius = HP(f.degree()) * (abs(e.p) + allowance) / den;
}

RationalInterval abs_interval(const RationalInterval& iv) {
  if (iv.lo >= 0) return iv;
  if (iv.hi <= 0) return {-iv.hi, -iv.lo};
  throw NumericalError("isolating interval still contains zero");
}

// Refine until 0 is excluded and the log-width of |x| is at most w.
RationalInterval refine_for_log(const IntPoly& f, RationalInterval iv, const Rational& w) {
  while (iv.lo < 0 && iv.hi > 0) iv = refine_root(f, iv, iv.width() / 2);
  for (;;) {
    const RationalInterval a = abs_interval(iv);
    if (a.lo == a.hi) return iv;
    // log(hi/lo) <= (hi-lo)/lo
    if (a.width() <= w * a.lo) return iv;
    iv = refine_root(f, iv, iv.width() / 2);
  }
}

struct UnionFind {
  std::vector<std::size_t> parent;
  explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  std::size_t find(std::size_t x) { return parent[x] == x ? x : parent[x] = find(parent[x]); }
  void unite(std::size_t a, std::size_t b) { parent[find(a)] = find(b); }
};

bool is_unit_real(const Eigenvalue& e) {
  return e.kind == Eigenvalue::Kind::Real && e.interval.lo == e.interval.hi && abs(e.interval.lo) == 1;
}

// Exact test that the real roots a, b satisfy b = -a.
bool opposite_real_roots(const Eigenvalue& a, const Eigenvalue& b) {
  const IntPoly h = gcd(a.factor, b.factor.negated_variable());
  if (h.degree() < 1) return false;
  Rational lo = std::max<Rational>(a.interval.lo, -b.interval.hi);
  Rational hi = std::min<Rational>(a.interval.hi, -b.interval.lo);
  if (a.interval.lo == a.interval.hi || b.interval.lo == b.interval.hi) {
    // an exactly rational root: evaluate directly
    const Rational x = a.interval.lo == a.interval.hi ? a.interval.lo : -b.interval.lo;
    return a.factor.sign_at(x) == 0 && b.factor.sign_at(-x) == 0;
  }
  if (hi <= lo) return false;
  return SturmSequence(h).count_open(lo, hi) > 0;
}

}  // namespace

Eigen::MatrixXd to_double(const IntMatrix& m) {
  Eigen::MatrixXd d(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) d(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = m(i, j).get_d();
  return d;
}

void require_automorphism(const IntMatrix& L) {
  if (!L.is_square() || L.rows() == 0) throw PreconditionError("matrix must be square and nonempty");
  if (abs(det_exact(L)) != 1) throw PreconditionError("not an automorphism: |det| != 1");
}

CertifiedSpectrum classify(const IntMatrix& L, const SpectrumOptions& opts) {
  require_automorphism(L);
  CertifiedSpectrum s;
  s.dim = L.rows();
  s.det = det_exact(L);
  s.char_poly = char_poly(L);
  Rational w;
  w = opts.exponent_width;

  for (const auto& sf : squarefree_decomposition(s.char_poly)) {
    const IntPoly& f = sf.factor;
    const int n = f.degree();
    int real_count = 0;
    for (const auto& iv0 : sturm_isolate(f)) {
      Eigenvalue e;
      e.factor = f;
      e.multiplicity = sf.multiplicity;
      e.kind = Eigenvalue::Kind::Real;
      e.interval = iv0;
      for (int u : {1, -1})
        if (f.sign_at(Rational(u)) == 0 && iv0.lo < u && u < iv0.hi) e.interval = {Rational(u), Rational(u)};
      if (e.interval.lo != e.interval.hi) e.interval = refine_for_log(f, iv0, w);
      if (e.interval.lo == e.interval.hi) {
        e.value = HPC(to_hp(e.interval.lo));
        e.radius = 0;
      } else {
        e.value = HPC(to_hp(e.interval.midpoint()));
        polish(f, e.value, e.radius);
        e.value = HPC(e.value.real());
      }
      const RationalInterval a = abs_interval(e.interval);
      e.log_lo = log(to_hp(a.lo));
      e.log_hi = log(to_hp(a.hi));
      const HP x = abs(e.value.real());
      if (x > e.radius) {
        e.log_lo = std::max(e.log_lo, HP(log(x - e.radius)));
        e.log_hi = std::min(e.log_hi, HP(log(x + e.radius)));
      }
      if (abs(a.lo) == 1 && a.lo == a.hi) e.log_lo = e.log_hi = 0;
      s.eigenvalues.push_back(std::move(e));
      ++real_count;
    }

    // circle roots: exactly from the trace polynomial of the reciprocal part
    const int k = unit_circle_pairs(f);
    std::vector<HP> circle_cos;
    if (k > 0) {
      IntPoly g = gcd(f, f.reversed());
      const IntPoly tm1{-1, 1}, tp1{1, 1};
      while (g.degree() > 0 && g.sign_at(Rational(1)) == 0) g = divide_exact(g, tm1);
      while (g.degree() > 0 && g.sign_at(Rational(-1)) == 0) g = divide_exact(g, tp1);
      const IntPoly P = squarefree_part(trace_poly_decompose(g.primitive_part()));
      for (const auto& iv : sturm_isolate(P, RationalInterval{Rational(-2), Rational(2)})) {
        HPC z(to_hp(refine_root(P, iv, Rational(1, 1000000)).midpoint()));
        HP rad;
        polish(P, z, rad);
        const HP c = z.real() / 2;
        circle_cos.push_back(c);
        const HP sn = sqrt(HP(1) - c * c);
        for (int sign : {1, -1}) {
          Eigenvalue e;
          e.factor = f;
          e.multiplicity = sf.multiplicity;
          e.kind = Eigenvalue::Kind::Circle;
          e.value = HPC(c, sign * sn);
          e.radius = rad * 10 / (sn > HP("1e-30") ? sn : HP("1e-30"));
          e.log_lo = e.log_hi = 0;
          s.eigenvalues.push_back(std::move(e));
        }
      }
      if (static_cast<int>(circle_cos.size()) != k) throw NumericalError("circle root count mismatch");
    }

    // the remaining complex pairs
    const int pairs = (n - real_count - 2 * k) / 2;
    if (pairs > 0) {
      auto approx = approximate_roots(f);
      std::sort(approx.begin(), approx.end(), [](const ApproxRoot& a, const ApproxRoot& b) {
        return std::abs(a.z.imag()) > std::abs(b.z.imag());
      });
      std::vector<std::complex<long double>> upper;
      for (const auto& r : approx) {
        if (static_cast<int>(upper.size()) == 2 * (pairs + k)) break;
        upper.push_back(r.z);
      }
      // keep one of each conjugate pair
      std::vector<std::complex<long double>> reps;
      for (const auto& z : upper)
        if (z.imag() > 0) reps.push_back(z);
      if (static_cast<int>(reps.size()) != pairs + k) throw NumericalError("complex root count mismatch");
      // drop the k representatives closest to the circle roots
      for (const HP& c : circle_cos) {
        const std::complex<long double> target(static_cast<long double>(c),
                                               std::sqrt(1.0L - static_cast<long double>(c) * static_cast<long double>(c)));
        auto it = std::min_element(reps.begin(), reps.end(), [&](const auto& a, const auto& b) {
          return std::abs(a - target) < std::abs(b - target);
        });
        reps.erase(it);
      }
      for (const auto& z0 : reps) {
        HPC z(HP(static_cast<double>(z0.real())), HP(static_cast<double>(z0.imag())));
        HP rad;
        polish(f, z, rad);
        if (z.imag() <= rad) throw NumericalError("complex root not separated from the real axis");
        const HP m = abs(z);
        for (int sign : {1, -1}) {
          Eigenvalue e;
          e.factor = f;
          e.multiplicity = sf.multiplicity;
          e.kind = Eigenvalue::Kind::Complex;
          e.value = sign > 0 ? z : conj(z);
          e.radius = rad;
          e.log_lo = log(m - rad);
          e.log_hi = log(m + rad);
          s.eigenvalues.push_back(std::move(e));
        }
      }
    }
  }

  // group by modulus
  const std::size_t N = s.eigenvalues.size();
  UnionFind uf(N);
  std::vector<bool> exact(N, true);
  std::vector<bool> center(N, false);
  for (std::size_t i = 0; i < N; ++i) {
    const auto& e = s.eigenvalues[i];
    center[i] = e.kind == Eigenvalue::Kind::Circle || is_unit_real(e);
  }
  for (std::size_t i = 0; i < N; ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      const auto& a = s.eigenvalues[i];
      const auto& b = s.eigenvalues[j];
      if (center[i] || center[j]) {
        if (center[i] && center[j]) uf.unite(i, j);
        continue;
      }
      using K = Eigenvalue::Kind;
      if (a.kind == K::Real && b.kind == K::Real) {
        if (opposite_real_roots(a, b)) uf.unite(i, j);
        continue;
      }
      if (a.kind == K::Complex && b.kind == K::Complex && a.factor == b.factor &&
          abs(a.value - conj(b.value)) <= a.radius + b.radius) {
        uf.unite(i, j);  // conjugates
        continue;
      }
      if (a.log_hi >= b.log_lo && b.log_hi >= a.log_lo) {
        uf.unite(i, j);
        exact[i] = exact[j] = false;
      }
    }
  }

  std::vector<std::size_t> roots_of_class;
  for (std::size_t i = 0; i < N; ++i) {
    const std::size_t r = uf.find(i);
    if (std::find(roots_of_class.begin(), roots_of_class.end(), r) == roots_of_class.end()) roots_of_class.push_back(r);
  }
  for (std::size_t r : roots_of_class) {
    ExponentClass c;
    HP lo = 0, hi = 0, sum = 0;
    bool first = true;
    for (std::size_t i = 0; i < N; ++i) {
      if (uf.find(i) != r) continue;
      const auto& e = s.eigenvalues[i];
      c.members.push_back(i);
      c.multiplicity += e.multiplicity;
      c.center = center[i];
      c.exact_grouping = c.exact_grouping && exact[i];
      if (first || e.log_lo < lo) lo = e.log_lo;
      if (first || e.log_hi > hi) hi = e.log_hi;
      sum += (e.log_lo + e.log_hi) / 2;
      first = false;
    }
    if (c.center) {
      c.lo = c.hi = c.value = 0;
    } else {
      c.lo = lower_double(lo);
      c.hi = upper_double(hi);
      c.value = static_cast<double>(sum / HP(c.members.size()));
    }
    s.lyapunov.push_back(std::move(c));
  }
  std::sort(s.lyapunov.begin(), s.lyapunov.end(),
            [](const ExponentClass& a, const ExponentClass& b) { return a.value > b.value; });
  for (std::size_t i = 1; i < s.lyapunov.size(); ++i)
    if (!(s.lyapunov[i].hi < s.lyapunov[i - 1].lo))
      throw NumericalError("exponent intervals could not be separated");

  for (const auto& e : s.eigenvalues) {
    if (e.kind == Eigenvalue::Kind::Real) s.r1 += e.multiplicity;
    if (e.kind == Eigenvalue::Kind::Circle && e.value.imag() > 0) s.circle_pairs += e.multiplicity;
  }
  s.r2 = (static_cast<int>(s.dim) - s.r1) / 2;
  for (const auto& c : s.lyapunov)
    if (c.center) s.center_dim = c.multiplicity;
  return s;
}

bool is_ergodic(const IntMatrix& L) {
  require_automorphism(L);
  return !has_root_of_unity_factor(char_poly(L));
}

PropertyPReport has_property_p(const IntMatrix& L) {
  require_automorphism(L);
  PropertyPReport r;
  const std::size_t d = L.rows();
  const IntPoly p = char_poly(L);
  r.dimension_ok = d >= 4 && d % 2 == 0;
  r.irreducible = is_irreducible_q(p);
  if (r.irreducible) {
    r.circle_pairs = unit_circle_pairs(p);
    const int real = static_cast<int>(sturm_isolate(p).size());
    r.r2 = (static_cast<int>(d) - real) / 2;
  } else {
    const IntPoly q = squarefree_part(p);
    r.circle_pairs = unit_circle_pairs(q);
    r.r2 = (q.degree() - static_cast<int>(sturm_isolate(q).size())) / 2;
  }
  if (!r.dimension_ok)
    r.failed_clause = "dimension must be even and at least 4";
  else if (!r.irreducible)
    r.failed_clause = "characteristic polynomial is reducible over Q";
  else if (r.circle_pairs != 1)
    r.failed_clause = "expected exactly one pair of eigenvalues on the unit circle, found " + std::to_string(r.circle_pairs);
  else if (r.r2 != 1)
    r.failed_clause = "eigenvalues off the unit circle are not all real";
  r.holds = r.failed_clause.empty();
  return r;
}

bool spread_spectrum(const CertifiedSpectrum& s, long r) {
  if (r < 1) throw PreconditionError("spread parameter must be positive");
  // positive exponents in decreasing order; under (P) each is a single real root
  std::vector<const Eigenvalue*> pos;
  for (const auto& c : s.lyapunov) {
    if (c.center || c.value <= 0) continue;
    if (c.members.size() != 1 || s.eigenvalues[c.members[0]].kind != Eigenvalue::Kind::Real)
      throw PreconditionError("spread test needs simple real positive-exponent eigenvalues");
    pos.push_back(&s.eigenvalues[c.members[0]]);
  }
  for (std::size_t j = 0; j + 1 < pos.size(); ++j) {
    RationalInterval a = pos[j]->interval, b = pos[j + 1]->interval;
    for (int it = 0;; ++it) {
      const RationalInterval aa = abs_interval(a), bb = abs_interval(b);
      Rational blo = 1, bhi = 1;
      for (long k = 0; k < r; ++k) {
        blo *= bb.lo;
        bhi *= bb.hi;
      }
      if (aa.lo > bhi) break;
      if (aa.hi < blo) return false;
      if (it > 400) throw NumericalError("spread comparison undecided");
      a = refine_root(pos[j]->factor, a, a.width() / 2);
      b = refine_root(pos[j + 1]->factor, b, b.width() / 2);
    }
  }
  return true;
}

bool spread_spectrum(const IntMatrix& L, long r) {
  const auto rep = has_property_p(L);
  if (!rep.holds) throw PreconditionError("spread spectrum needs property (P): " + rep.failed_clause);
  return spread_spectrum(classify(L), r);
}

bool no_three_same_modulus(const CertifiedSpectrum& s) {
  for (const auto& c : s.lyapunov)
    if (c.multiplicity > 2) return false;
  return true;
}

bool no_three_same_modulus(const IntMatrix& L) { return no_three_same_modulus(classify(L)); }

}  // namespace toral
