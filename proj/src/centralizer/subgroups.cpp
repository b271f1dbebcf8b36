#include <Eigen/SVD>
#include <algorithm>
#include <cmath>

#include "toral/centralizer/centralizer.hpp"
#include "toral/exact/linalg.hpp"

namespace toral {

namespace {

std::size_t center_class(const Functionals& F) {
  for (std::size_t c = 0; c < F.class_count(); ++c)
    if (F.spectrum().lyapunov[c].center && F.class_dim(c) == 2) return c;
  throw PreconditionError("hypothesis failed: center is not 2-dimensional");
}

// Calls f(k) for every k in [-s, s]^n with max |k_i| = s, lexicographically; stops when f returns true.
template <class Fn>
bool for_shell(std::size_t n, long s, Fn&& f) {
  std::vector<long> k(n, -s);
  while (true) {
    long sup = 0;
    for (long x : k) sup = std::max(sup, std::labs(x));
    if (sup == s && f(k)) return true;
    std::size_t i = n;
    while (i > 0 && k[i - 1] == s) k[--i] = -s;
    if (i == 0) return false;
    ++k[i - 1];
  }
}

// Exponent vectors with 1 <= |k|_1 <= len, shortest first; within a length, entries
// compare in the order 0, 1, -1, 2, -2, ...
std::vector<std::vector<long>> words_up_to(std::size_t n, int len) {
  std::vector<std::vector<long>> out;
  std::vector<long> k(n, 0);
  auto rec = [&](auto&& self, std::size_t i, int left) -> void {
    if (i == n) {
      if (left < len) out.push_back(k);
      return;
    }
    for (long v = -left; v <= left; ++v) {
      k[i] = v;
      self(self, i + 1, left - static_cast<int>(std::labs(v)));
    }
    k[i] = 0;
  };
  rec(rec, 0, len);
  auto key = [](long v) { return v > 0 ? 2 * v - 1 : -2 * v; };
  std::sort(out.begin(), out.end(), [&](const auto& a, const auto& b) {
    long la = 0, lb = 0;
    for (long x : a) la += std::labs(x);
    for (long x : b) lb += std::labs(x);
    if (la != lb) return la < lb;
    for (std::size_t i = 0; i < a.size(); ++i)
      if (a[i] != b[i]) return key(a[i]) < key(b[i]);
    return false;
  });
  return out;
}

std::vector<double> combine(const std::vector<std::vector<double>>& images, const std::vector<long>& k) {
  std::vector<double> v(images.empty() ? 0 : images.front().size(), 0.0);
  for (std::size_t i = 0; i < k.size(); ++i)
    for (std::size_t c = 0; c < v.size(); ++c) v[c] += static_cast<double>(k[i]) * images[i][c];
  return v;
}

void require_commuting(const IntMatrix& L, const std::vector<IntMatrix>& gens) {
  for (std::size_t i = 0; i < gens.size(); ++i) {
    if (!gens[i].is_square() || gens[i].dim() != L.dim()) throw PreconditionError("generator shape mismatch");
    if (!commutes(gens[i], L)) throw PreconditionError("generator does not commute with L");
    for (std::size_t j = 0; j < i; ++j)
      if (!commutes(gens[i], gens[j])) throw PreconditionError("generators do not commute pairwise");
  }
}

}  // namespace

std::optional<ConeElement> cone_search_center_dominating(const CommutantLattice& cl, const Functionals& F,
                                                         long max_box) {
  const std::size_t c0 = center_class(F);
  const auto gens = cl.generators();
  if (gens.empty()) return std::nullopt;
  std::vector<std::vector<double>> images;
  std::vector<IntMatrix> mats;
  std::vector<std::string> names;
  for (const Unit* u : gens) {
    images.push_back(u->functionals);
    mats.push_back(u->matrix);
    names.push_back(u->name);
  }
  const double margin = 1e-9;
  std::vector<long> hit;
  for (long s = 1; s <= max_box && hit.empty(); ++s) {
    for_shell(gens.size(), s, [&](const std::vector<long>& k) {
      const auto v = combine(images, k);
      for (std::size_t c = 0; c < v.size(); ++c)
        if (c != c0 && !(v[c] < -margin)) return false;
      hit = k;
      return true;
    });
  }
  if (hit.empty()) return std::nullopt;

  ConeElement out;
  out.exponents = hit;
  out.word = word_to_string(names, hit);
  out.matrix = evaluate_word(mats, hit);
  if (!commutes(out.matrix, cl.ambient)) throw NumericalError("cone element does not commute with L");
  out.functionals = F.evaluate(out.matrix).per_class;
  out.center_log_det = F.class_dim(c0) * out.functionals[c0];
  double unstable = 0;
  bool only_center = out.functionals[c0] > 0;
  for (std::size_t c = 0; c < out.functionals.size(); ++c) {
    if (out.functionals[c] > 0) unstable += F.class_dim(c) * out.functionals[c];
    if (c != c0 && out.functionals[c] >= 0) only_center = false;
  }
  out.unstable_is_center = only_center;
  out.domination_ratio = std::exp(unstable - out.center_log_det);
  return out;
}

NoHyperbolicReport no_hyperbolic_analysis(const Functionals& F, const std::vector<IntMatrix>& generators,
                                          const std::vector<std::string>& names) {
  require_commuting(F.matrix(), generators);
  if (names.size() != generators.size()) throw PreconditionError("one name per generator required");
  NoHyperbolicReport rep;
  const std::size_t d = F.matrix().dim();
  rep.rank_limit = static_cast<int>(d >= 2 ? (d - 2) / 2 : 0);
  std::vector<std::vector<double>> images;
  for (const auto& g : generators) images.push_back(F.evaluate(g).per_class);
  std::vector<std::vector<double>> emb;
  for (const auto& v : images) emb.push_back(F.embed(v));
  rep.rank = multiplicative_rank(emb);
  rep.rank_ok = rep.rank <= rep.rank_limit;

  // each non-center class is paired with the class of the reciprocal eigenvalues
  const auto& cls = F.spectrum().lyapunov;
  std::vector<std::size_t> partner(cls.size());
  for (std::size_t c = 0; c < cls.size(); ++c) {
    std::size_t best = c;
    double bd = INFINITY;
    for (std::size_t e = 0; e < cls.size(); ++e) {
      const double dist = std::abs(cls[c].value + cls[e].value);
      if (dist < bd) {
        bd = dist;
        best = e;
      }
    }
    partner[c] = best;
  }

  if (generators.empty()) {
    rep.pairing_holds = true;
    return rep;
  }
  double worst = 0;
  for (const auto& k : words_up_to(generators.size(), kSampleWordLength)) {
    ++rep.words_sampled;
    const IntMatrix g = evaluate_word(generators, k);
    if (is_hyperbolic_element(F, g)) {
      rep.witness = k;
      rep.witness_word = word_to_string(names, k);
      return rep;
    }
    const auto v = F.evaluate(g).per_class;
    for (std::size_t c = 0; c < v.size(); ++c)
      if (!cls[c].center) worst = std::max(worst, std::abs(v[c] + v[partner[c]]));
  }
  rep.max_pairing_error = worst;
  rep.pairing_holds = worst <= 1e-8;
  return rep;
}

BoundedSubgroup bounded_centralizer_subgroup(const CommutantLattice& cl, const Functionals& F, int r, double Q) {
  const int full = F.rank_bound();
  if (cl.achieved_rank < full) throw PreconditionError("unit rank is deficient");
  if (r < 1 || r >= full) throw PreconditionError("requested rank must lie in [1, r1 + r2 - 1)");
  if (!(Q > 0)) throw PreconditionError("Q must be positive");
  const std::size_t c0 = center_class(F);
  const auto gens = cl.generators();
  const std::size_t n = gens.size();

  Eigen::MatrixXd A(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(gens.front()->lambda.size()));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < gens[i]->lambda.size(); ++j)
      A(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = gens[i]->lambda[j];
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(A);
  const double smin = svd.singularValues()(static_cast<Eigen::Index>(n) - 1);
  if (!(smin > 1e-9)) throw NumericalError("unit embedding is degenerate");

  BoundedSubgroup out;
  out.omega_bound = Q / (4 * (Q + 1));
  // |(c - c~) . k| <= sqrt(n)/(2D) |k| <= omega |Lambda(gamma)|
  const double D = std::ceil(std::sqrt(static_cast<double>(n)) / (2 * out.omega_bound * smin));
  if (D > 1e12) throw NumericalError("rational approximation denominator too large");
  out.denominator = static_cast<long>(D);
  RatMatrix row(1, n);
  for (std::size_t i = 0; i < n; ++i)
    row(0, i) = Rational(Integer(std::lround(gens[i]->functionals[c0] * D)), Integer(out.denominator));
  const LatticeBasis ker = integer_kernel(row);
  std::vector<IntVector> basis = ker.basis;
  if (basis.size() != n - 1) throw NumericalError("kernel has unexpected rank");
  if (!basis.empty()) basis = lll_reduce(basis);

  std::vector<IntMatrix> mats;
  std::vector<std::string> names;
  for (const Unit* u : gens) {
    mats.push_back(u->matrix);
    names.push_back(u->name);
  }
  for (int j = 0; j < r; ++j) {
    std::vector<long> k;
    for (const auto& x : basis[static_cast<std::size_t>(j)]) {
      if (!x.fits_slong_p()) throw NumericalError("kernel exponent too large");
      k.push_back(x.get_si());
    }
    IntMatrix g = evaluate_word(mats, k);
    if (!commutes(g, cl.ambient)) throw NumericalError("subgroup generator does not commute with L");
    out.generators.push_back(std::move(g));
    out.words.push_back(word_to_string(names, k));
    out.exponents.push_back(std::move(k));
  }

  std::vector<std::vector<double>> images;
  for (const auto& g : out.generators) images.push_back(F.evaluate(g).per_class);
  out.worst_slack = INFINITY;
  for (const auto& k : words_up_to(images.size(), kCertificateWordLength)) {
    ++out.words_checked;
    const auto v = combine(images, k);
    double total = 0;
    for (std::size_t c = 0; c < v.size(); ++c) total += F.class_dim(c) * std::abs(v[c]);
    out.worst_slack = std::min(out.worst_slack, out.omega_bound * total - v[c0]);
  }
  out.certificate = out.worst_slack >= -1e-8;
  return out;
}

bool higher_rank_check(const Functionals& F, const std::vector<IntMatrix>& generators) {
  if (!F.polynomial_mode()) throw PreconditionError("L is not irreducible");
  require_commuting(F.matrix(), generators);
  std::vector<std::vector<double>> emb;
  for (const auto& g : generators) emb.push_back(F.embed(F.evaluate(g).per_class));
  const int rank = multiplicative_rank(emb);
  if (rank < 2) return false;
  auto with_L = emb;
  with_L.push_back(F.embed(F.evaluate(F.matrix()).per_class));
  return multiplicative_rank(with_L) == rank;
}

}  // namespace toral
