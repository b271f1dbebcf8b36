// One PASS/FAIL line per acceptance criterion, with wall-clock runtimes.
//
//   acceptance [--known-failures FILE] [--only N]
//
// Exit status is 0 when every FAIL is listed in the known-failures file and every
// listed criterion does fail; otherwise 1.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <string>

#include "toral/centralizer/centralizer.hpp"
#include "toral/constructor/constructor.hpp"
#include "toral/dynamics/dynamics.hpp"
#include "toral/exact/linalg.hpp"
#include "toral/polyalg/polyalg.hpp"
#include "toral/spectrum/spectrum.hpp"

using namespace toral;

namespace {

using Clock = std::chrono::steady_clock;

const double kPhi = (1 + std::sqrt(5.0)) / 2;
// t^4 - 3t^3 + 3t^2 - 3t + 1 = t^2 (s^2 - 3s + 1) with s = t + 1/t, so the
// real roots are e^{+-chi1} with 2 cosh(chi1) = phi^2.
const double kChi1 = std::acosh(kPhi * kPhi / 2);
const double kCat = std::log(kPhi * kPhi);

IntMatrix quartic() { return companion(IntPoly{1, -3, 3, -3, 1}); }
IntMatrix cat_map() { return IntMatrix::from_ints({{2, 1}, {1, 1}}); }

FourierMode unit_mode(std::vector<long> k, std::vector<double> dir) {
  double kn = 0, dn = 0;
  for (long v : k) kn += static_cast<double>(v * v);
  for (double v : dir) dn += v * v;
  const double s = 1 / (2 * std::numbers::pi * std::sqrt(kn) * std::sqrt(dn));
  for (double& v : dir) v *= s;
  return FourierMode{std::move(k), {}, std::move(dir)};
}

TorusMap quartic_map(double eps) {
  const Eigen::VectorXd b = to_double(quartic()) * Eigen::Vector4d(0, 1, -0.5, 0.25);
  return TorusMap(quartic(), {unit_mode({1, 0, 0, 0}, {b[0], b[1], b[2], b[3]})}, eps);
}

TorusMap cat_perturbed(double eps) { return TorusMap(cat_map(), {unit_mode({1, 0}, {1, 1})}, eps); }

/// Collects the sub-checks of one criterion.
class Check {
 public:
  void require(bool ok, const std::string& what) {
    lines_.push_back(std::string(ok ? "    ok    " : "    FAIL  ") + what);
    all_ &= ok;
  }
  void note(const std::string& what) { lines_.push_back("    note  " + what); }
  bool ok() const { return all_; }
  const std::vector<std::string>& lines() const { return lines_; }

 private:
  bool all_ = true;
  std::vector<std::string> lines_;
};

std::string fmt(const char* f, double x) {
  char buf[96];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

std::string g17(double x) { return fmt("%.17g", x); }

// Shared between criteria 3 and 9.
std::vector<ConstructResult> g_constructed;
// Shared between criteria 2 and 10.
std::optional<CommutantLattice> g_lattice;

void criterion1(Check& c) {
  const IntMatrix L = quartic();
  const CertifiedSpectrum s = classify(L);
  const PropertyPReport P = has_property_p(L);
  c.require(is_irreducible_q(s.char_poly), "irreducible");
  c.require(is_ergodic(L), "ergodic");
  c.require(P.holds, "property (P)");
  c.require(s.r1 == 2 && s.r2 == 1, "r1 = 2, r2 = 1 (got " + std::to_string(s.r1) + ", " + std::to_string(s.r2) + ")");
  c.require(poly_in_tn(s.char_poly).n == 1, "pseudo-Anosov: poly_in_tn = 1");
  c.require(s.lyapunov.size() == 3, "three exponent classes");
  if (s.lyapunov.size() != 3) return;
  const auto& top = s.lyapunov[0];
  const auto& mid = s.lyapunov[1];
  const auto& bot = s.lyapunov[2];
  c.require(std::abs(top.value - kChi1) <= 1e-9 && std::abs(bot.value + kChi1) <= 1e-9,
            "exponents +-" + g17(top.value) + " vs acosh(phi^2/2) = " + g17(kChi1) + " within 1e-9");
  c.require(top.lo <= kChi1 && kChi1 <= top.hi, "certified interval [" + g17(top.lo) + ", " + g17(top.hi) + "] contains it");
  c.require(mid.center && mid.multiplicity == 2 && mid.value == 0 && top.multiplicity == 1 && bot.multiplicity == 1,
            "center exponent 0 with multiplicity 2");
  c.note("the quoted 0.76725 differs from the certified value by " + fmt("%.2e", 0.76725 - kChi1) +
         "; exp(chi1) = " + g17(std::exp(kChi1)) + " matches the quoted ln 2.15372");
}

void criterion2(Check& c) {
  const IntMatrix L = quartic();
  const IntMatrix I = IntMatrix::identity(4);
  const Functionals F(L);
  CommutantLattice cl = commutant_basis(L);
  unit_search(cl, F, 3);
  c.require(cl.achieved_rank == 2 && cl.rank_bound == 2,
            "achieved rank " + std::to_string(cl.achieved_rank) + " = r1 + r2 - 1 = " + std::to_string(cl.rank_bound));
  const Unit* lmi = nullptr;
  for (const auto& u : cl.units)
    if (u.matrix == L - I) lmi = &u;
  c.require(lmi != nullptr, "L - I among the units");
  const Integer q1 = 1 - 3 + 3 - 3 + 1;
  c.require(det_exact(L - I) == q1 && q1 == -1, "det(L - I) = q(1) = -1");
  c.require(lmi && lmi->hyperbolic && is_hyperbolic_element(L, L - I), "L - I flagged hyperbolic");
  const auto hit = cone_search_center_dominating(cl, F);
  c.require(hit.has_value(), "cone search returns an element");
  if (hit) {
    // gamma = L + L^-1 - 2I  <=>  L gamma = L^2 + I - 2L
    c.require(L * hit->matrix == L * L + I - 2 * L, "gamma = L + L^-1 - 2I (word " + hit->word + ")");
    const double want = 2 * std::log(kPhi);
    c.require(std::abs(hit->center_log_det - want) <= 1e-8,
              "center log-det " + g17(hit->center_log_det) + " vs 2 ln phi = " + g17(want) + " within 1e-8");
    c.require(std::abs(hit->domination_ratio - 1) <= 1e-8, "domination ratio " + g17(hit->domination_ratio));
    c.note("2 ln 1.618034 = " + g17(2 * std::log(1.618034)) + " is 2 ln phi with phi rounded to 6 places");
  }
  g_lattice = std::move(cl);
}

void criterion3(Check& c) {
  for (auto [d, r] : {std::pair{4, 1L}, {6, 3L}, {8, 3L}}) {
    const auto t0 = Clock::now();
    ConstructBudget budget;
    budget.seconds = 60;
    const ConstructResult res = construct_spread(d, r, budget);
    const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
    const IntPoly q = char_poly(res.L);
    const PropertyPReport P = has_property_p(res.L);
    const std::string tag = "(d, r) = (" + std::to_string(d) + ", " + std::to_string(r) + "): ";
    c.require(secs < 60, tag + "produced in " + fmt("%.2f s", secs));
    c.require(res.L.dim() == static_cast<std::size_t>(d) && abs(det_exact(res.L)) == 1, tag + "unimodular d x d");
    c.require(is_irreducible_q(q) && P.holds && P.circle_pairs >= 1 && unit_circle_pairs(q) == P.circle_pairs,
              tag + "irreducible, property (P), circle pairs " + std::to_string(P.circle_pairs));
    c.require(spread_spectrum(res.L, r), tag + "r-spread on certified intervals");
    c.require(poly_in_tn(q).n == 1, tag + "poly_in_tn = 1");
    g_constructed.push_back(res);
  }
}

void criterion4(Check& c) {
  const TorusMap f = quartic_map(0.01);
  const auto sol = solve_twisted_cocycle(f, 0, {1e-10, 64});
  const auto fresh = stratified_sample(4, 24, 0x51ed27a3c0ffee11ULL);
  const double res = cocycle_residual(sol, fresh);
  c.require(res <= 1e-8, "fresh-sample residual " + g17(res) + " <= 1e-8 (" + std::to_string(fresh.size() / 4) + " points)");
  c.require(res <= sol.bound, "fresh-sample residual <= a-priori bound " + g17(sol.bound));
  c.note("solver-sample residual " + g17(sol.residual_sup) + ", N = " + std::to_string(sol.truncation_N) +
         ", rho = " + g17(sol.rho));

  const auto zero = solve_twisted_cocycle(TorusMap::linear(quartic()), 0, {1e-10, 16});
  const auto pts = stratified_sample(4, 8, 7);
  const auto phi0 = zero.phi_batch(pts, pts.size() / 4);
  c.require(std::all_of(phi0.begin(), phi0.end(), [](double v) { return v == 0.0; }) && zero.residual_sup == 0.0,
            "epsilon = 0 gives phi identically zero");

  const std::vector<double> cst{0.3, -0.2, 0.1, 0.05};
  const TorusMap fc(quartic(), {FourierMode{{0, 0, 0, 0}, cst, {}}}, 0.01, false);
  double worst = 0;
  for (std::size_t cls : {0u, 2u}) {
    const auto s = solve_twisted_cocycle(fc, cls, {1e-14, 8});
    Eigen::VectorXd u(4);
    for (int i = 0; i < 4; ++i) u[i] = 0.01 * cst[static_cast<std::size_t>(i)];
    const auto m = s.A.rows();
    const Eigen::VectorXd want = (s.A - Eigen::MatrixXd::Identity(m, m)).inverse() * s.T * u;
    const auto phis = s.phi_batch(pts, pts.size() / 4);
    const std::size_t n = pts.size() / 4;
    for (std::size_t j = 0; j < n; ++j)
      for (Eigen::Index i = 0; i < m; ++i) worst = std::max(worst, std::abs(phis[static_cast<std::size_t>(i) * n + j] - want[i]));
  }
  c.require(worst <= 1e-13, "constant mode closed form, max deviation " + g17(worst));
}

void criterion5(Check& c) {
  const LyapunovOptions opts;  // 16 orbits x 100000 steps
  c.note("orbits " + std::to_string(opts.n_orbits) + " x steps " + std::to_string(opts.n_steps));
  const CertifiedSpectrum sq = classify(quartic());
  std::vector<double> certified;
  for (const auto& k : sq.lyapunov)
    for (int i = 0; i < k.multiplicity; ++i) certified.push_back(k.value);

  const auto lin = lyapunov_spectrum(TorusMap::linear(quartic()), opts);
  double dev = 0;
  for (std::size_t i = 0; i < 4; ++i) dev = std::max(dev, std::abs(lin.exponents[i] - certified[i]));
  c.require(dev <= 1e-9, "d=4, epsilon = 0: max deviation from certified log-moduli " + g17(dev));
  const auto cat = lyapunov_spectrum(TorusMap::linear(cat_map()), opts);
  const double dc = std::max(std::abs(cat.exponents[0] - kCat), std::abs(cat.exponents[1] + kCat));
  c.require(dc <= 1e-9, "cat map, epsilon = 0: +-" + g17(cat.exponents[0]) + ", deviation " + g17(dc));

  const TorusMap f = quartic_map(0.05);
  const auto per = lyapunov_spectrum(f, opts);
  for (std::size_t i = 0; i < 4; ++i) {
    if (certified[i] == 0) continue;
    const double band = 0.05 * std::abs(certified[i]) + 3 * per.stderr_[i];
    c.require(std::abs(per.exponents[i] - certified[i]) <= band,
              "epsilon = 0.05, exponent " + std::to_string(i) + ": " + g17(per.exponents[i]) + " within " + g17(band));
  }
  c.note("epsilon = 0.05 center exponents " + g17(per.exponents[1]) + ", " + g17(per.exponents[2]));
  const auto sq2 = lyapunov_spectrum(f.power(2), opts);
  double rel = 0;
  for (std::size_t i : {0u, 3u}) rel = std::max(rel, std::abs(sq2.exponents[i] - 2 * per.exponents[i]) / std::abs(2 * per.exponents[i]));
  c.require(rel <= 0.01, "f^2 exponents are 2x those of f, max relative error " + g17(rel));
}

void criterion6(Check& c) {
  for (double eps : {0.0, 0.01}) {
    const std::string e = "epsilon = " + fmt("%g", eps) + ": ";
    const auto cat = fixed_points(cat_perturbed(eps));
    c.require(cat.algebraic_count == 1 && cat.points.size() == 1, e + "cat map has " + std::to_string(cat.points.size()) + " = |det(L - I)| = 1");
    const TorusMap g2 = cat_perturbed(eps).power(2);
    const auto cat2 = fixed_points(g2);
    double off = 0;
    for (const auto& x : cat2.points) off = std::max(off, torus_distance(g2.lift(x), x));
    c.require(cat2.algebraic_count == 5 && cat2.points.size() == 5 && off <= 1e-12,
              e + "cat map squared has " + std::to_string(cat2.points.size()) + " = 5, max |f(x) - x| " + g17(off));
    const auto q = fixed_points(quartic_map(eps));
    c.require(q.algebraic_count == 1 && q.points.size() == 1, e + "d=4 example has " + std::to_string(q.points.size()) + " = 1");
  }
  const TorusMap g = cat_perturbed(0.01);
  const auto p = fixed_point_permutation(g.power(2), g);
  std::string sigma;
  for (auto s : p.sigma) sigma += std::to_string(s) + " ";
  std::vector<std::size_t> composed(p.sigma.size());
  for (std::size_t j = 0; j < p.sigma.size(); ++j) composed[j] = p.sigma[p.sigma[j]];
  c.require(p.sigma.size() == 5 && p.sigma_sq == composed && p.homomorphism,
            "Pi(g^2) = Pi(g)^2 on the 5-point set (sigma = " + sigma + ")");
}

void criterion7(Check& c) {
  const TorusMap g = cat_perturbed(0.03);
  const auto H = franks_manning(g);
  c.require(H.residual_sup <= 1e-6, "epsilon = 0.03 residual of H g - M H: " + g17(H.residual_sup));
  const auto zero = franks_manning(TorusMap::linear(cat_map()));
  const auto pts = stratified_sample(2, 64, 11);
  const auto h = zero.h_batch(pts, pts.size() / 2);
  c.require(std::all_of(h.begin(), h.end(), [](double v) { return v == 0.0; }), "epsilon = 0 gives h identically zero");
  const double self = commuting_pair_check(g, H);
  c.note("f = g: pair deviation " + g17(self) + " (" + fmt("%.3f", self / H.residual_sup) + " x residual)");
  const double sq = commuting_pair_check(g.power(2), H);
  c.require(sq <= 3 * H.residual_sup,
            "f = g^2: pair deviation " + g17(sq) + " = " + fmt("%.3f", sq / H.residual_sup) + " x residual, need <= 3");
  const double norm = to_double(cat_map()).operatorNorm();
  c.note("H g^2 - M^2 H = r(g x) + M r(x) with r the solver residual; the attainable bound is (1 + |M|) = " +
         fmt("%.3f", 1 + norm) + " x residual");
}

void criterion8(Check& c) {
  const IntMatrix L = quartic();
  const Functionals F(L);
  const auto one = no_hyperbolic_analysis(F, {L}, {"L"});
  c.require(!one.witness.has_value(), "<L>: no hyperbolic element in " + std::to_string(one.words_sampled) + " sampled words");
  c.require(one.pairing_holds && one.max_pairing_error <= 1e-8, "<L>: pairing mu = -chi, max error " + g17(one.max_pairing_error));
  c.require(one.rank == 1 && one.rank_limit == 1 && one.rank_ok, "<L>: rank " + std::to_string(one.rank) + " = (d - 2)/2");
  const auto two = no_hyperbolic_analysis(F, {L, L - IntMatrix::identity(4)}, {"L", "L - I"});
  c.require(two.witness.has_value() && !two.witness_word.empty(), "<L, L - I>: hyperbolic witness " + two.witness_word);
}

void criterion9(Check& c) {
  std::vector<std::pair<std::string, IntMatrix>> mats{{"d=4 example", quartic()}};
  for (const auto& r : g_constructed) mats.emplace_back("constructed d=" + std::to_string(r.L.dim()), r.L);
  c.require(g_constructed.size() == 3, "constructor outputs available (" + std::to_string(g_constructed.size()) + ")");
  for (const auto& [name, L] : mats) {
    const IntMatrix J = symplectic_form(L);
    const bool anti = (J + J.transpose()).is_zero();
    const bool inv = (L.transpose() * J * L - J).is_zero();
    const Integer dj = det_exact(J);
    c.require(anti && inv && dj != 0, name + ": J antisymmetric, L^T J L - J = 0 exactly, det J = " + dj.get_str());
  }
}

void criterion10(Check& c) {
  if (!g_lattice) {
    c.require(false, "unit lattice from criterion 2 unavailable");
    return;
  }
  const IntMatrix L = quartic();
  const Functionals F(L);
  const auto& units = g_lattice->units;
  double worst = 0;
  for (const auto& u : units) {
    double s = 0;
    for (std::size_t k = 0; k < F.class_count(); ++k) s += F.class_dim(k) * u.functionals[k];
    worst = std::max(worst, std::abs(s));
  }
  c.require(!units.empty() && worst <= 1e-9,
            std::to_string(units.size()) + " units, max |sum d_j chi_j| = " + g17(worst));
  std::mt19937_64 rng(20240601);
  std::uniform_int_distribution<std::size_t> pick(0, units.size() - 1);
  double add = 0;
  for (int t = 0; t < 50; ++t) {
    const Unit& a = units[pick(rng)];
    const Unit& b = units[pick(rng)];
    const auto ab = F.embed(F.evaluate(a.matrix * b.matrix).per_class);
    for (std::size_t i = 0; i < ab.size(); ++i) add = std::max(add, std::abs(ab[i] - a.lambda[i] - b.lambda[i]));
  }
  c.require(add <= 1e-9, "Lambda additivity on 50 random pairs, max error " + g17(add));
}

}  // namespace

int main(int argc, char** argv) {
  std::set<int> known;
  int only = 0;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--known-failures" && i + 1 < argc) {
      std::ifstream in(argv[++i]);
      if (!in) {
        std::fprintf(stderr, "cannot read %s\n", argv[i]);
        return 2;
      }
      std::string line;
      while (std::getline(in, line)) {
        std::istringstream ss(line);
        int n;
        if (line.empty() || line[0] == '#' || !(ss >> n)) continue;
        known.insert(n);
      }
    } else if (a == "--only" && i + 1 < argc) {
      only = std::atoi(argv[++i]);
    } else {
      std::fprintf(stderr, "usage: acceptance [--known-failures FILE] [--only N]\n");
      return 2;
    }
  }

  const std::vector<std::pair<std::string, std::function<void(Check&)>>> criteria{
      {"d=4 worked example (analyze)", criterion1},
      {"centralizer discovery", criterion2},
      {"constructor", criterion3},
      {"twisted cocycle solver", criterion4},
      {"exponent band", criterion5},
      {"fixed points", criterion6},
      {"Franks-Manning solver", criterion7},
      {"no-hyperbolic suite", criterion8},
      {"symplectic structure", criterion9},
      {"unit-lattice hyperplane", criterion10},
  };
  const std::map<int, double> limits{{1, 10}, {2, 30}, {3, 180}, {5, 120}};

  int unexpected = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    const int n = static_cast<int>(k + 1);
    if (only && n != only && !(only == 10 && n == 2) && !(only == 9 && n == 3)) continue;
    Check c;
    const auto t0 = Clock::now();
    try {
      criteria[k].second(c);
    } catch (const std::exception& e) {
      c.require(false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
    if (const auto it = limits.find(n); it != limits.end())
      c.require(secs < it->second, "runtime " + fmt("%.2f s", secs) + " < " + fmt("%g s", it->second));
    const bool pass = c.ok();
    const bool listed = known.count(n) > 0;
    std::printf("%s %2d  %-32s %8.2f s%s\n", pass ? "PASS" : "FAIL", n, criteria[k].first.c_str(), secs,
                !pass && listed ? "  (known failure)" : pass && listed ? "  (listed as known failure but passed)" : "");
    for (const auto& line : c.lines()) std::printf("%s\n", line.c_str());
    std::fflush(stdout);
    if (pass == listed) ++unexpected;
  }
  return unexpected == 0 ? 0 : 1;
}
