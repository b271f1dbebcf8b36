#pragma once

#include <optional>
#include <string>
#include <vector>

#include "toral/exact/lattice.hpp"
#include "toral/spectrum/spectrum.hpp"

namespace toral {

// Word-length caps. The group-level claims below quantify over finite samples only.
inline constexpr int kSampleWordLength = 6;
inline constexpr int kIdentityWordLength = 8;
inline constexpr int kCertificateWordLength = 4;

/// Lyapunov functionals chi_c(M) of matrices commuting with L, one per exponent
/// class c of L: chi_c(M) = log|det(M restricted to E_c)| / dim E_c.
///
/// For irreducible L every such M is p(L) for a rational polynomial p, and the
/// values are log|p(lambda)| at the high-precision eigenvalues. Otherwise they
/// come from the restricted blocks of the spectral projectors.
class Functionals {
 public:
  explicit Functionals(const IntMatrix& L);

  const IntMatrix& matrix() const { return L_; }
  const CertifiedSpectrum& spectrum() const { return spec_; }
  bool polynomial_mode() const { return irreducible_; }
  std::size_t class_count() const { return spec_.lyapunov.size(); }
  int class_dim(std::size_t c) const { return spec_.lyapunov[c].multiplicity; }
  /// Index of the class left out of the embedding Lambda: the center if there is
  /// one, otherwise the last class.
  std::size_t dropped_class() const { return dropped_; }
  /// r1 + r2 - 1
  int rank_bound() const { return spec_.r1 + spec_.r2 - 1; }

  /// Coefficients (low to high) of the rational p with M = p(L); throws unless
  /// polynomial_mode() and M commutes with L.
  std::vector<Rational> polynomial_of(const IntMatrix& M) const;

  struct Values {
    std::vector<double> per_class;
    double error = 0;  // bound on the absolute error of every entry
  };
  Values evaluate(const IntMatrix& M) const;
  /// Projector route, regardless of mode.
  Values evaluate_by_projectors(const IntMatrix& M) const;

  /// log|eigenvalue of M| for every eigenvalue of L (polynomial mode), in high precision.
  std::vector<HP> eigen_log_moduli(const IntMatrix& M) const;

  std::vector<double> embed(const std::vector<double>& full) const;

 private:
  IntMatrix L_;
  CertifiedSpectrum spec_;
  SpectralProjectors proj_;
  bool irreducible_ = false;
  std::size_t dropped_ = 0;
  std::vector<RatMatrix> powers_;
};

bool commutes(const IntMatrix& a, const IntMatrix& b);

/// Exact word over generators: product of g_i^{exps_i}.
IntMatrix evaluate_word(const std::vector<IntMatrix>& gens, const std::vector<long>& exps);
std::string word_to_string(const std::vector<std::string>& names, const std::vector<long>& exps);
/// Symbolic name of sum c_k L^k, e.g. "L - I".
std::string polynomial_name(const std::vector<Integer>& coeffs);

struct Unit {
  IntMatrix matrix;
  std::string name;
  std::vector<double> functionals;  // all classes of L
  std::vector<double> lambda;       // embedding, dropped class removed
  bool hyperbolic = false;
  bool generator = false;  // independent: counted in the achieved rank
};

struct CommutantLattice {
  IntMatrix ambient;
  LatticeBasis lattice;            // coordinates in d^2 space (row-major entries)
  std::vector<IntMatrix> basis;    // the same basis as matrices
  std::vector<IntMatrix> enumeration_basis;
  bool power_basis = false;        // enumeration basis is I, L, ..., L^{d-1}
  std::vector<Unit> units;         // generators first, in priority order
  std::vector<Unit> finite_order;  // units with Lambda = 0
  int achieved_rank = 0;
  int rank_bound = 0;

  std::vector<const Unit*> generators() const;
};

CommutantLattice commutant_basis(const IntMatrix& L);

/// Per-class functional values of M, with the hypotheses of the functional lemma checked.
Functionals::Values functional_of_element(const IntMatrix& L, const IntMatrix& M);

struct UnitSearchStats {
  std::size_t candidates = 0;
  std::size_t passed_prefilter = 0;
  std::size_t units_found = 0;
  std::size_t confirmed_dependent = 0;
  std::size_t unconfirmed_dependent = 0;
};

void unit_search(CommutantLattice& cl, const Functionals& F, long radius, UnitSearchStats* stats = nullptr);

bool is_hyperbolic_element(const Functionals& F, const IntMatrix& gamma);
bool is_hyperbolic_element(const IntMatrix& L, const IntMatrix& gamma);

struct ConeElement {
  std::vector<long> exponents;  // over the generators
  std::string word;
  IntMatrix matrix;
  std::vector<double> functionals;
  double center_log_det = 0;        // log|det(gamma|E^c)|
  double domination_ratio = 0;      // det(gamma|E^u_gamma) / det(gamma|E^c)
  bool unstable_is_center = false;  // E^u_gamma = E^c_L
};

std::optional<ConeElement> cone_search_center_dominating(const CommutantLattice& cl, const Functionals& F,
                                                         long max_box = 8);

struct NoHyperbolicReport {
  std::size_t words_sampled = 0;
  std::optional<std::vector<long>> witness;
  std::string witness_word;
  bool pairing_holds = false;
  double max_pairing_error = 0;
  int rank = 0;
  int rank_limit = 0;  // (d-2)/2
  bool rank_ok = false;
};

NoHyperbolicReport no_hyperbolic_analysis(const Functionals& F, const std::vector<IntMatrix>& generators,
                                          const std::vector<std::string>& names);

struct BoundedSubgroup {
  std::vector<IntMatrix> generators;
  std::vector<std::vector<long>> exponents;  // over the input units
  std::vector<std::string> words;
  double omega_bound = 0;      // Q / (4(Q+1))
  long denominator = 0;        // D of the rational approximation
  std::size_t words_checked = 0;
  double worst_slack = 0;      // min over words of bound - chi_0
  bool certificate = false;
};

BoundedSubgroup bounded_centralizer_subgroup(const CommutantLattice& cl, const Functionals& F, int r, double Q);

bool higher_rank_check(const Functionals& F, const std::vector<IntMatrix>& generators);

/// Numerical rank of a set of embedding vectors (tolerance on singular values).
int multiplicative_rank(const std::vector<std::vector<double>>& images, double tol = 1e-6);

}  // namespace toral
