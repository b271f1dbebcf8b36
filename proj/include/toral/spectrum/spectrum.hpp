#pragma once

#include <Eigen/Dense>
#include <complex>
#include <string>
#include <vector>

#include "toral/polyalg/polyalg.hpp"
#include "toral/spectrum/highprec.hpp"

namespace toral {

struct SpectrumOptions {
  /// Target width of every exponent interval.
  double exponent_width = 1e-12;
};

/// One eigenvalue with its exact defining data.
struct Eigenvalue {
  IntPoly factor;        // squarefree factor of the char poly it is a root of
  int multiplicity = 1;  // multiplicity of that factor
  enum class Kind { Real, Circle, Complex } kind = Kind::Real;
  RationalInterval interval;  // real roots only: certified isolating interval
  HPC value;                  // high-precision approximation
  HP radius = 0;              // |true - value| <= radius
  HP log_lo = 0, log_hi = 0;  // certified bounds on log|lambda|
};

/// Eigenvalues sharing one modulus.
struct ExponentClass {
  double lo = 0, hi = 0;  // certified, outward rounded
  double value = 0;       // best estimate
  int multiplicity = 0;   // dimension of the class subspace
  bool center = false;    // modulus exactly 1
  bool exact_grouping = true;
  std::vector<std::size_t> members;  // indices into CertifiedSpectrum::eigenvalues
};

struct CertifiedSpectrum {
  std::size_t dim = 0;
  Integer det;
  IntPoly char_poly;
  int r1 = 0, r2 = 0;
  int circle_pairs = 0;
  int center_dim = 0;
  std::vector<Eigenvalue> eigenvalues;  // one per distinct root
  std::vector<ExponentClass> lyapunov;  // strictly decreasing
};

/// Throws PreconditionError("not an automorphism") unless |det| = 1.
void require_automorphism(const IntMatrix& L);

CertifiedSpectrum classify(const IntMatrix& L, const SpectrumOptions& opts = {});

bool is_ergodic(const IntMatrix& L);

struct PropertyPReport {
  bool holds = false;
  bool dimension_ok = false;  // d even and d >= 4
  bool irreducible = false;
  int circle_pairs = 0;
  int r2 = 0;
  std::string failed_clause;  // empty when holds
};

PropertyPReport has_property_p(const IntMatrix& L);

/// chi_j > r chi_{j+1} for the positive exponents; requires property (P).
bool spread_spectrum(const IntMatrix& L, long r);
bool spread_spectrum(const CertifiedSpectrum& s, long r);

bool no_three_same_modulus(const IntMatrix& L);
bool no_three_same_modulus(const CertifiedSpectrum& s);

struct SpectralProjectors {
  std::vector<Eigen::MatrixXd> per_class;  // aligned with CertifiedSpectrum::lyapunov
  Eigen::MatrixXd center, stable, unstable;
  double idempotence_residual = 0;   // max ||P^2 - P||
  double commutation_residual = 0;   // max ||LP - PL||
  double sum_residual = 0;           // ||sum P - I||
};

SpectralProjectors projectors(const IntMatrix& L, const CertifiedSpectrum& s);
SpectralProjectors projectors(const IntMatrix& L);

/// Real basis adapted to the exponent classes: columns grouped class by class in
/// the order of s.lyapunov, with (Re v, Im v) for complex pairs. `offsets[c]` is
/// the first column of class c.
struct AdaptedBasis {
  Eigen::MatrixXd S;
  std::vector<std::size_t> offsets;
};
AdaptedBasis adapted_basis(const IntMatrix& L, const CertifiedSpectrum& s);

Eigen::MatrixXd to_double(const IntMatrix& m);

}  // namespace toral
