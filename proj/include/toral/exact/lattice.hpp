#pragma once

#include <optional>
#include <vector>

#include "toral/exact/matrix.hpp"

namespace toral {

/// An integer lattice given by a Hermite-normal-form basis.
///
/// `basis` holds one row per basis vector in row-echelon HNF: pivots strictly
/// increase, pivot entries are positive, and entries above each pivot are
/// reduced into [0, pivot). `transform` records how the basis was produced
/// from the generators, so basis = transform * generators exactly.
struct LatticeBasis {
  std::size_t ambient_dim = 0;
  std::vector<IntVector> basis;
  std::vector<std::size_t> pivots;
  IntMatrix transform;  // rank x (number of generators)

  std::size_t rank() const noexcept { return basis.size(); }

  /// Integer coordinates of v in the basis, or nullopt if v is not in the lattice.
  std::optional<IntVector> coordinates(const IntVector& v) const;
  bool contains(const IntVector& v) const { return coordinates(v).has_value(); }
  IntVector combine(const IntVector& coords) const;
};

/// HNF basis of the lattice spanned by `vectors` (all of length n).
LatticeBasis hnf_basis(const std::vector<IntVector>& vectors, std::size_t n);

/// HNF basis of {v in Z^m : a v = 0} for an n x m rational matrix.
LatticeBasis integer_kernel(const RatMatrix& a);

/// LLL-reduced basis (delta = 3/4) of a full-row-rank list of integer vectors.
std::vector<IntVector> lll_reduce(std::vector<IntVector> basis);

/// Hermite normal form of the column lattice of a square nonsingular matrix,
/// returned lower triangular; the diagonal gives coset representatives of Z^d / m Z^d.
IntMatrix column_hnf(const IntMatrix& m);

}  // namespace toral
