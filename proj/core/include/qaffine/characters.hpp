#pragma once

// Character ring of classical subalgebras: weight multiplicities
// (Freudenthal recursion), Weyl dimension formula, tensor product
// decomposition, and formal linear combinations of irreducible characters
// with series coefficients.

#include <map>
#include <memory>
#include <vector>

#include "qaffine/algebra.hpp"
#include "qaffine/laurent.hpp"

namespace qaffine {

// Weight in fundamental-weight coordinates (integral weights only).
using Wt = std::vector<long>;

class CharacterTable {
 public:
  explicit CharacterTable(ClassicalAlgebra g);

  const ClassicalAlgebra& algebra() const { return g_; }
  // Positive roots in simple-root coordinates.
  const std::vector<Wt>& positive_roots() const { return pos_roots_; }

  // Dominant representative of the Weyl orbit of mu.
  Wt dominant_rep(Wt mu) const;
  bool is_dominant(const Wt& mu) const;

  // Multiplicity map mu(dominant) -> mult of the module with highest weight
  // lambda (dominant). Cached.
  const std::map<Wt, Int>& dominant_weights(const Wt& lambda);
  // Multiplicity of an arbitrary weight.
  Int weight_mult(const Wt& lambda, const Wt& mu);
  // Full weight system with multiplicities (orbits expanded).
  std::vector<std::pair<Wt, Int>> weight_system(const Wt& lambda);

  // Dimension by the Weyl product formula (exact).
  Int dim(const Wt& lambda);

  // V(lambda) (x) V(mu) = sum of nu -> multiplicity. Cached.
  const std::map<Wt, Int>& tensor_decompose(const Wt& lambda, const Wt& mu);

 private:
  ClassicalAlgebra g_;
  int n_;
  std::vector<Wt> pos_roots_;        // root coords
  std::vector<Wt> pos_roots_fund_;   // same roots in fundamental-weight coords
  RatMat gram_;                      // (Lambda_a | Lambda_b)

  Rat inner_fund(const Wt& x, const Wt& y) const;
  Rat inner_fund_root(const Wt& x_fund, const Wt& alpha_root) const;
  std::vector<Wt> orbit(const Wt& dominant) const;

  std::map<Wt, std::map<Wt, Int>> mult_cache_;
  std::map<std::pair<Wt, Wt>, std::map<Wt, Int>> tensor_cache_;
};

// Shared tables keyed by the underlying Cartan data.
CharacterTable& character_table(const ClassicalAlgebra& g);

// Formal sum of irreducible characters with Laurent-series coefficients.
struct CharacterCombo {
  std::map<Wt, LaurentSeries> terms;

  void add(const Wt& w, const LaurentSeries& coeff);
  bool operator==(const CharacterCombo& o) const { return terms == o.terms; }

  static CharacterCombo single(const Wt& w, LaurentSeries coeff = LaurentSeries::one());
  nlohmann::json to_json() const;
  std::string text() const;
};

CharacterCombo combo_add(const CharacterCombo& a, const CharacterCombo& b);
CharacterCombo combo_mul(CharacterTable& t, const CharacterCombo& a, const CharacterCombo& b);
// Sum of coefficient-values-at-one times irreducible dimensions.
Int combo_dim(CharacterTable& t, const CharacterCombo& c);
// Specializes every coefficient at q = 1.
std::map<Wt, Int> combo_at_one(const CharacterCombo& c);

}  // namespace qaffine
