#pragma once

#include <string>
#include <vector>

#include "toral/spectrum/spectrum.hpp"

namespace toral {

/// Verification record of a seed p and the companion matrix of t^n p(t + 1/t).
struct SeedReport {
  IntPoly seed;
  IntPoly q;
  IntMatrix L;
  Integer det;
  bool q_irreducible = false;
  bool property_p = false;
  /// log|mu| for the seed roots outside [-2, 2], decreasing
  std::vector<double> seed_log_roots;
};

/// Throws PreconditionError naming the first failed clause.
SeedReport build_from_seed(const IntPoly& p);

struct ConstructBudget {
  long max_coeff = 0;            // phase-1 coefficient box; 0 picks it from max_candidates
  std::size_t max_candidates = 200000;
  double seconds = 60;
  int max_power = 64;            // largest N in u -> u^N
  long max_anchor = 2000;        // phase-2 range of the smallest product root
};

struct ConstructResult {
  IntMatrix L;
  IntPoly base_seed;  // seed before powering
  IntPoly seed;       // char poly of the N-th power of the base seed's companion
  int power = 1;
  int phase = 1;      // 1: coefficient box, 2: product family t*prod(t - a_i) +- 1
  std::size_t candidates = 0;
  SeedReport report;
  bool spread = false;
  bool ergodic = false;
  int poly_in_tn = 0;
  std::vector<double> exponents;  // positive exponents, decreasing
};

/// First verified L in the deterministic search order with property (P) and
/// r-spread spectrum. Throws NumericalError when the budget runs out.
ConstructResult construct_spread(int d, long r, const ConstructBudget& budget = {});

/// Primitive integer antisymmetric J with L^T J L = J and det J != 0.
IntMatrix symplectic_form(const IntMatrix& L);

}  // namespace toral
