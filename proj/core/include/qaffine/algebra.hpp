#pragma once

// Registry of the affine families X^(r)_N and every derived integer/rational
// datum the rest of the library consumes: null-root expansion marks, dual
// marks, the (t_a, t~v_a, eps_a) node data, the normalized bilinear form on
// the degree-zero subalgebra, and classical Cartan matrices.

#include <nlohmann/json.hpp>

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "qaffine/common.hpp"

namespace qaffine {

struct UnknownAlgebra : std::runtime_error {
  explicit UnknownAlgebra(const std::string& what) : std::runtime_error(what) {}
};

enum class Family : char { A = 'A', B = 'B', C = 'C', D = 'D', E = 'E', F = 'F', G = 'G' };

struct AlgebraLabel {
  Family family = Family::A;
  int twist = 1;  // r in {1,2,3}
  int N = 1;      // rank of the simply-laced algebra behind the twist
  int n = 1;      // affine rank: number of non-zero nodes

  // Canonical display form, e.g. "A(2)_2".
  std::string str() const;
  // Filename-safe form, e.g. "A2~2".
  std::string token() const;

  bool operator==(const AlgebraLabel& o) const {
    return family == o.family && twist == o.twist && N == o.N;
  }
};

// Accepts "A2~2", "A(2)_2", "D4~3", ... (case-insensitive). Throws
// UnknownAlgebra on anything outside the admitted list.
AlgebraLabel parse_label(const std::string& text);

// Label of the algebra with transposed Cartan matrix (node order preserved).
AlgebraLabel dual_label(const AlgebraLabel& label);

// A classical (finite-type) root datum: Cartan matrix plus the half squared
// lengths d_a fixing an invariant form, pairing[a][b] = (alpha_a|alpha_b) =
// d_a * cartan[a][b].
struct ClassicalAlgebra {
  char family = 'A';
  int rank = 0;
  RatVec d;            // half squared root lengths, size rank
  IntMat cartan;       // cartan[a][b] = <alpha_b, h_a>, 0-indexed
  RatMat pairing;      // symmetric, 0-indexed
  RatMat cartan_inv;   // exact inverse of cartan
  // Fundamental-weight coords <x, h_a> -> simple-root coords and back.
  RatVec to_root(const RatVec& fund) const;
  RatVec to_fund(const RatVec& root) const;
  // Gram matrix entry (Lambda_a | Lambda_b) of fundamental weights.
  Rat weight_gram(int a0index, int b0index) const;
};

// Builds a classical root datum. `d` fixes the normalization; pass the
// standard one (long roots of squared length 2) via make_classical_standard.
// For B/C/F/G the last/first short nodes follow the d-vector, so callers
// control the orientation explicitly.
ClassicalAlgebra make_classical(char family, int rank, RatVec d);
// Standard orientation and normalization: long roots squared length 2;
// B_n: alpha_n short; C_n: alpha_n long; F_4: alpha_3, alpha_4 short;
// G_2: alpha_1 long.
ClassicalAlgebra make_classical_standard(char family, int rank);

struct AlgebraDatum {
  AlgebraLabel label;

  std::vector<long> marks;       // a_i, i in {0..n}
  std::vector<long> dual_marks;  // a~v_i, i in {0..n}
  long h_dual = 0;               // dual Coxeter number, sum of dual marks
  long dim_XN = 0;               // dimension of the simple algebra X_N

  // Node data for a in {1..n}; index [a-1].
  std::vector<long> t;
  std::vector<long> tvee;
  std::vector<long> eps;  // 1 except (A^(2)_{2n}, a = n) ... realized via the general rule

  ClassicalAlgebra g0;     // degree-zero subalgebra (bar), with (.|.)' normalized
                           // so long roots have squared length 2r
  ClassicalAlgebra gcirc;  // subalgebra on nodes {1..n}, (.|.) with long roots 2r

  // Diagram automorphism of the classical nodes where one exists (simply
  // laced nontwisted types); sigma[a-1] in {1..n}.
  std::optional<std::vector<int>> sigma;

  int n() const { return label.n; }
  int r() const { return label.twist; }
  long a0() const { return marks[0]; }

  // (alpha~_a | alpha~_b)' on the degree-zero subalgebra, 1-based nodes.
  Rat pairing(int a, int b) const;
  // Integer Cartan matrices, 1-based accessors.
  long cartan_g0(int a, int b) const;
  long cartan_gcirc(int a, int b) const;
};

AlgebraDatum load_algebra(const AlgebraLabel& label);
AlgebraDatum load_algebra(const std::string& text);

// ------------------------------------------------------------------
// Coefficients shared by the fermionic and recursion machinery.

// B_{bk,aj} = 2min(t_a k, t_b j) - min(t_a k, t_b (j+1)) - min(t_a k, t_b (j-1)).
long B_coeff(const AlgebraDatum& g, int b, int k, int a, int j);
// The equivalent delta-case expression, kept separate for cross-checking.
long B_coeff_case(const AlgebraDatum& g, int b, int k, int a, int j);

// K^(l)_{jk} = min(j,k) - jk/l.
Rat K_coeff(long l, long j, long k);

// ------------------------------------------------------------------
// Weight plumbing. Weights of the classical subalgebra live either in
// fundamental-weight coordinates or simple-root coordinates.

struct WeightVector {
  enum class Basis { FundamentalWeights, SimpleRoots };
  RatVec coords;
  Basis basis = Basis::FundamentalWeights;
};

// Conversion in gcirc; exact, mutually inverse.
WeightVector to_root_coords(const AlgebraDatum& g, const WeightVector& w);
WeightVector to_weight_coords(const AlgebraDatum& g, const WeightVector& w);

// Root coordinates (alpha~ basis of g0) of iota(lambda) for lambda given in
// fundamental-weight coordinates of gcirc: iota(Lambda_a) = eps_a Lambda~_a.
RatVec iota_root_coords(const AlgebraDatum& g, const RatVec& lambda);

// |iota(lambda)|'^2 under the g0 form.
Rat iota_norm2(const AlgebraDatum& g, const RatVec& lambda);

// Simple reflection s_i of gcirc on fundamental-weight coordinates.
RatVec weyl_reflect(const AlgebraDatum& g, int i, const RatVec& lambda);
// Sign of a reduced (or any) word of simple reflections.
int weyl_orbit_sign(const std::vector<int>& word);

nlohmann::json to_json(const AlgebraDatum& g);

}  // namespace qaffine
