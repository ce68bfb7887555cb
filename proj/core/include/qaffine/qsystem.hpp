#pragma once

// Closed-form families of classical characters chi^{(a)}_j attached to an
// affine datum, one for each supported classical realization:
//
//   * the bilinear column recurrence
//       chi_j^2 = chi_{j+1} chi_{j-1} + prod_{(b,k)} chi^{E(b,k)}
//     with exponents E read off the affine datum (verify_qsystem),
//   * the infinite-level completeness identity expressing products of the
//     chi's as occupancy-multiplicity expansions (verify_completeness),
//   * graded decompositions of single-column modules, whose coefficients
//     refine the chi multiplicities by powers of q (graded_decomposition_W).

#include <map>

#include "qaffine/algebra.hpp"
#include "qaffine/characters.hpp"
#include "qaffine/fermionic.hpp"

namespace qaffine {

// The classical algebra carrying the solution family for (g, family).
// Supported: the ambient classical subalgebra of g (its own family letter);
// additionally 'B' for A^{(2)}_{2n}, and 'D' for A^{(2)}_{2n-1} and B^{(1)}_n
// (both n >= 3).  Untwisted data are supported for families A, B, C, D up to
// rank 4.  Throws std::invalid_argument for unsupported combinations.
ClassicalAlgebra qsystem_classical(const AlgebraDatum& g, char family);

// chi^{(a)}_j for node a in 1..n and column count j >= 0 (j = 0 gives the
// trivial character).  Coefficients are constant series: plain
// multiplicities.
CharacterCombo qsystem_chi(const AlgebraDatum& g, char family, int a, long j);

// Exact check of the bilinear column recurrence at (a, j), j >= 1.  Negative
// exponents E(b,k) are cleared by cross-multiplying both sides, so the
// comparison is an equality of nonnegative character combinations.
bool verify_qsystem(const AlgebraDatum& g, char family, int a, long j);

struct CompletenessReport {
  bool equal = false;
  CharacterCombo lhs;  // prod_{(a,j)} (chi^{(a)}_j)^{nu^{(a)}_j}
  CharacterCombo rhs;  // sum_lambda Mtilde_infinity(W, lambda)|_{q=1} V(lambda)
};

// Compares the product of solution characters over the ambient classical
// subalgebra of g with the infinite-level occupancy-multiplicity expansion
// of the same quantum space, both specialized at q = 1.
CompletenessReport verify_completeness(const AlgebraDatum& g,
                                       const QuantumSpace& W);

// Graded decomposition of the single-column module with node a and s >= 0
// columns: the coefficient of V(lambda) is the constrained occupancy
// polynomial at infinite level with q replaced by 1/q.  For A^{(2)}_{2n-1},
// A^{(2)}_{2n} and D^{(2)}_{n+1} every coefficient is additionally checked
// against its closed monomial form; a mismatch throws std::logic_error.
CharacterCombo graded_decomposition_W(const AlgebraDatum& g, int a, long s);

// Closed-form graded decompositions conjectured for the exceptional twisted
// data: E^{(2)}_6 with a in {1, 2, 4} and D^{(3)}_4 with a in {1, 2}.
bool graded_closed_form_available(const AlgebraDatum& g, int a);
CharacterCombo graded_closed_form(const AlgebraDatum& g, int a, long s);

}  // namespace qaffine
