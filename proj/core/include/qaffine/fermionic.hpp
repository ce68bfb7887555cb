#pragma once

// Configuration sums attached to tensor products of column modules W^{(a)}_j
// over an affine root datum: the exact restricted sums M_l and their
// unrestricted relatives, rewritten vacuum/charge forms used as independent
// cross-check paths, subset-relaxed sums, branching q-series N_l(lambda), and
// the structural checks tying them together (column recursion, Weyl-group
// skew symmetry, diagram symmetry, half-infinite tensor limits and their
// dual factorizations, and stabilization toward N_l).

#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "qaffine/algebra.hpp"
#include "qaffine/laurent.hpp"

namespace qaffine {

// Multiset of column modules W^{(a)}_j; nu[{a,j}] is the tensor multiplicity
// nu^{(a)}_j. Node indices a are 1-based, column lengths j >= 1.
struct QuantumSpace {
  std::map<std::pair<int, long>, long> nu;

  long mult(int a, long j) const;
  QuantumSpace& add(int a, long j, long count = 1);
  static QuantumSpace single(int a, long j, long count = 1);
  // Every multiplicity scaled by L (the L-fold tensor power of this block).
  QuantumSpace repeated(long L) const;
  bool empty() const { return nu.empty(); }
  long factor_count() const;
  // Largest column length present at node a (0 when none).
  long max_column(int a) const;
  std::string text() const;
  bool operator==(const QuantumSpace& o) const { return nu == o.nu; }
  bool operator<(const QuantumSpace& o) const { return nu < o.nu; }
};

// One admissible configuration: occupation numbers m^{(a)}_i, derived
// vacancy numbers p^{(a)}_i, and the exact exponent attached to it.
struct RiggingConfig {
  std::map<std::pair<int, long>, long> m;
  std::map<std::pair<int, long>, long> p;
  Rat cocharge;
};

// Slot subset used by the relaxed sum; must avoid the top slots (a, t_a l).
using SubsetS = std::set<std::pair<int, long>>;

// Level argument: a nonnegative integer, or nullopt for the infinite level.
using Level = std::optional<long>;

// All configurations entering the sum for (W, lambda) at the given level:
// per node a, partitions of the a-th root coordinate of
// iota(sum_j j nu^{(a)}_j Lambda_a - lambda) into parts <= t_a l, filtered by
// vacancy nonnegativity when require_nonneg_p is set. Returns an empty list
// when a root coordinate is negative or non-integral.
std::vector<RiggingConfig> enumerate_configs(const AlgebraDatum& g,
                                             const QuantumSpace& W,
                                             const WeightVector& lambda,
                                             Level level,
                                             bool require_nonneg_p);

// Restricted configuration sum M_l(W, lambda, q); exact Laurent polynomial.
LaurentSeries fermionic_M(const AlgebraDatum& g, const QuantumSpace& W,
                          const WeightVector& lambda, Level level);

// Unrestricted variant: same sum without the vacancy-nonnegativity filter
// (binomials with negative top entries evaluated by their extended clauses).
LaurentSeries fermionic_Mtilde(const AlgebraDatum& g, const QuantumSpace& W,
                               const WeightVector& lambda, Level level);

// Vacuum form at finite level: M_l(W, 0, q^{-1}) computed on the reduced slot
// set with the top occupation numbers eliminated. Independent code path from
// fermionic_M; exact polynomial. Level 0 is allowed (1 for the empty
// equivalence class, 0 otherwise).
LaurentSeries fermionic_M_vacuum_qinv(const AlgebraDatum& g,
                                      const QuantumSpace& W, long level);

// Charge form at infinite level: M_inf(W, lambda, q^{-1}) via the purely
// quadratic exponent. Independent code path from fermionic_M.
LaurentSeries fermionic_M_charge_qinv(const AlgebraDatum& g,
                                      const QuantumSpace& W,
                                      const WeightVector& lambda);

// Subset-relaxed vacuum-form sum at finite level, truncated at `order`:
// occupation numbers on S range over all integers and contribute Pochhammer
// reciprocals 1/(q_a)_{p}, all other reduced slots contribute q-binomials;
// vacancies must be nonnegative on every reduced slot and the eliminated top
// occupation numbers must be nonnegative integers. S empty reproduces the
// vacuum form.
LaurentSeries fermionic_MS(const AlgebraDatum& g, const QuantumSpace& W,
                           const SubsetS& S, long level, const Rat& order);

// Branching q-series N_l(lambda, q) truncated at `order`: Pochhammer-inverse
// prefactor times the congruence-constrained sum over reduced-slot
// occupation numbers with the positive-definite level-l kernel.
LaurentSeries string_N(const AlgebraDatum& g, const WeightVector& lambda,
                       long level, const Rat& order);

// ------------------------------------------------------------------
// Structural checks.

struct RecursionReport {
  QuantumSpace W1, W2, W3;
  Rat theta;
  LaurentSeries lhs, rhs;                  // restricted sums
  LaurentSeries lhs_relaxed, rhs_relaxed;  // unrestricted sums
  bool equal = false;
  bool equal_relaxed = false;
  bool skipped = false;
  std::string reason;
  bool ok() const { return skipped || (equal && equal_relaxed); }
};

// Column recursion at slot (a, j): with W1 = W^{(a)}_j^{x2} (x) W,
// W2 = W^{(a)}_{j+1} (x) W^{(a)}_{j-1} (x) W and W3 built from the
// slot-coupling coefficients, tests
//   M_l(W1) = M_l(W2) + q_a^{-theta} M_l(W3)
// and the same for the unrestricted sums. Instances whose W3 exponents are
// not nonnegative integers are reported as skipped.
RecursionReport check_recursion(const AlgebraDatum& g, int a, long j,
                                const QuantumSpace& W,
                                const WeightVector& lambda, Level level);

// Skew symmetry of the unrestricted infinite-level sum under the shifted
// Weyl action: Mtilde(W, w(lambda+rho)-rho) = det(w) Mtilde(W, lambda).
bool check_weyl_skew(const AlgebraDatum& g, const QuantumSpace& W,
                     const WeightVector& lambda, const std::vector<int>& word);

struct NoAutomorphism : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Diagram-automorphism symmetry: M_l(W, lambda) equals the sum with node
// labels and lambda permuted by the datum's automorphism. Throws
// NoAutomorphism when the datum carries none.
bool check_diagram_symmetry(const AlgebraDatum& g, const QuantumSpace& W,
                            const WeightVector& lambda, Level level);

struct LimitReport {
  std::vector<LaurentSeries> lhs_per_L;  // normalized, truncated
  LaurentSeries lhs;                     // deepest-L entry
  LaurentSeries rhs;
  bool stabilized = false;        // consecutive L entries agree
  bool match = false;             // deepest LHS agrees with RHS
  bool level_independent = true;  // only exercised by the dual limit
  bool skipped = false;
  std::string details;
  bool ok() const {
    return !skipped && stabilized && match && level_independent;
  }
};

// Half-infinite tensor limit of an arbitrary repeating block: for each L in
// L_list computes the normalized sum for block^{(x)L} (level nullopt: the
// infinite-level sum with argument q; finite level: the restricted vacuum
// sum, lambda must vanish), checks stabilization in L, and compares against
// the zeta-sum built from single-column spaces, the subset-relaxed sum, and
// Pochhammer reciprocals. Throws std::invalid_argument when a requested L is
// incompatible with the integrality of the critical configuration.
LimitReport limit_spinon_mixed_check(const AlgebraDatum& g,
                                     const QuantumSpace& block, Level level,
                                     const WeightVector& lambda,
                                     const std::vector<long>& L_list,
                                     const Rat& order);

// Single-column specialization: block = W^{(b)}_s.
LimitReport limit_spinon_check(const AlgebraDatum& g, int b, long s,
                               Level level, const WeightVector& lambda,
                               const std::vector<long>& L_list,
                               const Rat& order);

// Dual half-infinite limit with argument q^{-1}: compares
// M_inf(W^{(b)(x)L}_l, L l Lambda_b - mu, q^{-1}) for L in L_list (and for
// level l and l+1, establishing level independence) against the factorized
// sum over column multiplicities at node b, with the neighbor factors
// evaluated recursively over their sub-data. `recipe` must be "auto"; the
// factorization table covers the classical families up to rank 4 and throws
// std::invalid_argument otherwise. mu lives in the simple-root lattice with
// coordinates in Z/eps_c.
LimitReport limit_dualspinon_check(const AlgebraDatum& g, int b, long l,
                                   const WeightVector& mu,
                                   const std::vector<long>& L_list,
                                   const Rat& order,
                                   const std::string& recipe = "auto");

// Stabilization of the normalized finite-level sum toward the branching
// series: for each W in nu_ladder compares
// q^{-|iota(lambda_rep)|^2/(2l)} M_l(W, sum j nu Lambda - lambda_rep, q^{-1})
// against string_N(lambda, l) up to `order`, where lambda_rep is the
// representative of lambda modulo l times the shift lattice whose
// configuration targets sit nearest to half the vacuum targets of W (the
// branching series only depends on the class, the limit requires
// representatives growing with the ladder).
LimitReport check_MN_stabilization(const AlgebraDatum& g,
                                   const WeightVector& lambda, long level,
                                   const Rat& order,
                                   const std::vector<QuantumSpace>& nu_ladder);

}  // namespace qaffine
