#include "qaffine/qsystem.hpp"

#include <algorithm>
#include <cstdlib>
#include <functional>
#include <sstream>
#include <stdexcept>
#include <utility>
#include <vector>

namespace qaffine {

namespace {

// Shapes of the closed-form solution families.  "Simplex" forms range over
// nonnegative (k_1..k_a) with sum <= j; "chain" forms range over the nodes
// of one parity class with a weighted sum pinned to j (a slack variable of
// weight one or two absorbs the remainder when the class reaches node zero).
enum class PairKind {
  TwistedEvenC,    // A^{(2)}_{2n} over C_n: simplex, no parity
  TwistedEvenB,    // A^{(2)}_{2n} over B_n: simplex with parity constraints
  TwistedOddC,     // A^{(2)}_{2n-1} over C_n: alternating chain
  TwistedOddD,     // A^{(2)}_{2n-1} over D_n: simplex with parity, signed spin
  TwistedD,        // D^{(2)}_{n+1} over B_n: simplex; single term at node n
  TwistedTriality, // D^{(3)}_4 over G_2
  LoopBD,          // B^{(1)}_n over D_n: simplex; doubled signed spin rule
  PlainA,          // untwisted: single term at every node
  PlainB,          // untwisted: chains; doubled chain at the spin node
  PlainC,          // untwisted: simplex with parity; single at node n
  PlainD,          // untwisted: chains; single terms at the spin nodes
};

struct PairInfo {
  PairKind kind;
  ClassicalAlgebra cls;
};

[[noreturn]] void unsupported(const AlgebraDatum& g, char family) {
  std::ostringstream os;
  os << "no character solution family '" << family << "' for " << g.label.str();
  throw std::invalid_argument(os.str());
}

PairInfo pair_info(const AlgebraDatum& g, char family) {
  const char fam_g = static_cast<char>(g.label.family);
  const int twist = g.label.twist;
  const int n = g.n();
  if (twist == 1) {
    // Untwisted data: certified closed forms for A/B/C/D up to rank 4 only.
    if (n > 4) unsupported(g, family);
    if (fam_g == 'B' && family == 'D' && n >= 3)
      return {PairKind::LoopBD, make_classical_standard('D', n)};
    if (fam_g != family) unsupported(g, family);
    switch (fam_g) {
      case 'A': return {PairKind::PlainA, g.gcirc};
      case 'B': return {PairKind::PlainB, g.gcirc};
      case 'C': return {PairKind::PlainC, g.gcirc};
      case 'D': return {PairKind::PlainD, g.gcirc};
      default: unsupported(g, family);
    }
  }
  if (fam_g == 'A' && twist == 2 && g.label.N % 2 == 0) {
    if (family == 'C') return {PairKind::TwistedEvenC, g.gcirc};
    if (family == 'B')
      return {PairKind::TwistedEvenB, make_classical_standard('B', n)};
    unsupported(g, family);
  }
  if (fam_g == 'A' && twist == 2 && g.label.N % 2 == 1) {
    if (family == 'C') return {PairKind::TwistedOddC, g.gcirc};
    if (family == 'D' && n >= 3)
      return {PairKind::TwistedOddD, make_classical_standard('D', n)};
    unsupported(g, family);
  }
  if (fam_g == 'D' && twist == 2) {
    if (family == 'B') return {PairKind::TwistedD, g.gcirc};
    unsupported(g, family);
  }
  if (fam_g == 'D' && twist == 3) {
    if (family == 'G') return {PairKind::TwistedTriality, g.gcirc};
    unsupported(g, family);
  }
  unsupported(g, family);
}

void add_const_term(CharacterCombo& out, const Wt& w, const Int& mult) {
  out.add(w, LaurentSeries::monomial(mult, Rat(0)));
}

// All nonnegative integer vectors (k_1..k_len) with sum <= budget.
void each_simplex(int len, long budget,
                  const std::function<void(const std::vector<long>&)>& fn) {
  std::vector<long> k(static_cast<std::size_t>(len), 0);
  std::function<void(int, long)> rec = [&](int pos, long rem) {
    if (pos == len) {
      fn(k);
      return;
    }
    for (long v = 0; v <= rem; ++v) {
      k[static_cast<std::size_t>(pos)] = v;
      rec(pos + 1, rem - v);
    }
  };
  rec(0, budget);
}

bool even_diff(long x, long y) { return ((x - y) & 1L) == 0; }

// Parity constraint shared by the simplex-with-parity forms: every k_b is
// even except k_a, which matches the parity of j.
bool parity_ok(const std::vector<long>& k, int a, long j) {
  for (int b = 1; b <= static_cast<int>(k.size()); ++b) {
    const long ref = (b == a) ? j : 0;
    if (!even_diff(k[static_cast<std::size_t>(b - 1)], ref)) return false;
  }
  return true;
}

CharacterCombo chi_impl(const AlgebraDatum& g, const PairInfo& pi, int a,
                        long j) {
  const int n = g.n();
  if (a < 1 || a > n) throw std::invalid_argument("node index out of range");
  if (j < 0) throw std::invalid_argument("column count must be nonnegative");
  const int nc = pi.cls.rank;
  CharacterCombo out;
  const auto ident_weight = [&](const std::vector<long>& k) {
    Wt w(static_cast<std::size_t>(nc), 0);
    for (std::size_t b = 0; b < k.size(); ++b) w[b] = k[b];
    return w;
  };
  // Weight map folding node n-1 onto the sum of the two final fundamental
  // weights (used where the solution label lives on a folded node pair).
  const auto folded_weight = [&](const std::vector<long>& k) {
    Wt w(static_cast<std::size_t>(nc), 0);
    for (std::size_t b = 0; b + 1 < k.size(); ++b) w[b] = k[b];
    w[static_cast<std::size_t>(nc - 2)] += k.back();
    w[static_cast<std::size_t>(nc - 1)] += k.back();
    return w;
  };
  const auto single = [&](const Wt& w) {
    add_const_term(out, w, Int(1));
    return out;
  };
  const auto single_node = [&](int node, long mult) {
    Wt w(static_cast<std::size_t>(nc), 0);
    w[static_cast<std::size_t>(node - 1)] = mult;
    return single(w);
  };

  switch (pi.kind) {
    case PairKind::PlainA:
      return single_node(a, j);

    case PairKind::TwistedEvenC:
      each_simplex(a, j, [&](const std::vector<long>& k) {
        add_const_term(out, ident_weight(k), Int(1));
      });
      return out;

    case PairKind::TwistedD:
      if (a == n) return single_node(n, j);
      each_simplex(a, j, [&](const std::vector<long>& k) {
        add_const_term(out, ident_weight(k), Int(1));
      });
      return out;

    case PairKind::TwistedEvenB:
      each_simplex(a, j, [&](const std::vector<long>& k) {
        if (!parity_ok(k, a, j)) return;
        Wt w = ident_weight(k);
        if (a == n) w[static_cast<std::size_t>(n - 1)] *= 2;
        add_const_term(out, w, Int(1));
      });
      return out;

    case PairKind::PlainC:
      if (a == n) return single_node(n, j);
      each_simplex(a, j, [&](const std::vector<long>& k) {
        if (!parity_ok(k, a, j)) return;
        add_const_term(out, ident_weight(k), Int(1));
      });
      return out;

    case PairKind::TwistedOddD:
      if (a <= n - 2) {
        each_simplex(a, j, [&](const std::vector<long>& k) {
          if (!parity_ok(k, a, j)) return;
          add_const_term(out, ident_weight(k), Int(1));
        });
        return out;
      }
      if (a == n - 1) {
        each_simplex(a, j, [&](const std::vector<long>& k) {
          if (!parity_ok(k, a, j)) return;
          add_const_term(out, folded_weight(k), Int(1));
        });
        return out;
      }
      // a == n: k_1..k_{n-1} even, a signed k_n of the parity of j, with
      // k_1+...+k_{n-1}+|k_n| <= j.
      each_simplex(n - 1, j, [&](const std::vector<long>& k) {
        for (long v : k)
          if ((v & 1L) != 0) return;
        long used = 0;
        for (long v : k) used += v;
        const long rem = j - used;
        for (long kn = -rem; kn <= rem; ++kn) {
          if (!even_diff(kn, j)) continue;
          Wt w(static_cast<std::size_t>(nc), 0);
          for (std::size_t b = 0; b + 1 < k.size(); ++b) w[b] = k[b];
          const long knm1 = (n >= 2) ? k[static_cast<std::size_t>(n - 2)] : 0;
          w[static_cast<std::size_t>(nc - 2)] = knm1 + std::labs(kn) - kn;
          w[static_cast<std::size_t>(nc - 1)] = knm1 + std::labs(kn) + kn;
          add_const_term(out, w, Int(1));
        }
      });
      return out;

    case PairKind::LoopBD:
      if (a <= n - 2) {
        each_simplex(a, j, [&](const std::vector<long>& k) {
          add_const_term(out, ident_weight(k), Int(1));
        });
        return out;
      }
      if (a == n - 1) {
        each_simplex(a, j, [&](const std::vector<long>& k) {
          add_const_term(out, folded_weight(k), Int(1));
        });
        return out;
      }
      // a == n: nonnegative k_1..k_{n-1}, a signed k_n of the parity of j,
      // with 2(k_1+...+k_{n-1})+|k_n| <= j.
      each_simplex(n - 1, j / 2, [&](const std::vector<long>& k) {
        long used = 0;
        for (long v : k) used += v;
        const long rem = j - 2 * used;
        for (long kn = -rem; kn <= rem; ++kn) {
          if (!even_diff(kn, j)) continue;
          Wt w(static_cast<std::size_t>(nc), 0);
          for (std::size_t b = 0; b + 1 < k.size(); ++b) w[b] = k[b];
          const long knm1 = (n >= 2) ? k[static_cast<std::size_t>(n - 2)] : 0;
          w[static_cast<std::size_t>(nc - 2)] = knm1 + (std::labs(kn) - kn) / 2;
          w[static_cast<std::size_t>(nc - 1)] = knm1 + (std::labs(kn) + kn) / 2;
          add_const_term(out, w, Int(1));
        }
      });
      return out;

    case PairKind::TwistedOddC:
    case PairKind::PlainB:
    case PairKind::PlainD: {
      const bool spin_b = (pi.kind == PairKind::PlainB && a == n);
      if (pi.kind == PairKind::PlainD && a > n - 2) return single_node(a, j);
      if (pi.kind == PairKind::PlainB && a == n && n == 1)
        return single_node(1, j);
      // Chain over the nodes b = a, a-2, a-4, ... of the parity class of a.
      // Weight of node b in the constraint: 2 for b < a at the doubled spin
      // chain, otherwise 1.  When the class contains node 0 the remainder is
      // absorbed there (in steps matching the node-0 weight); otherwise the
      // weighted sum must equal j exactly.
      std::vector<int> nodes;
      for (int b = a; b >= 1; b -= 2) nodes.push_back(b);
      const bool has_slack = (a % 2 == 0);
      const long slack_step = spin_b ? 2 : 1;
      std::vector<long> k(nodes.size(), 0);
      std::function<void(std::size_t, long)> rec = [&](std::size_t pos,
                                                       long rem) {
        if (pos == nodes.size()) {
          if (rem == 0 ||
              (has_slack && rem > 0 && rem % slack_step == 0)) {
            Wt w(static_cast<std::size_t>(nc), 0);
            for (std::size_t i = 0; i < nodes.size(); ++i)
              w[static_cast<std::size_t>(nodes[i] - 1)] = k[i];
            add_const_term(out, w, Int(1));
          }
          return;
        }
        const long step = (spin_b && nodes[pos] != a) ? 2 : 1;
        for (long v = 0; v * step <= rem; ++v) {
          k[pos] = v;
          rec(pos + 1, rem - v * step);
        }
      };
      rec(0, j);
      return out;
    }

    case PairKind::TwistedTriality: {
      if (a == 1) {
        for (long kk = 0; kk <= j; ++kk) {
          Wt w{kk, 0};
          add_const_term(out, w, Int(1));
        }
        return out;
      }
      for (long k1 = 0; k1 <= j; ++k1)
        for (long k2 = 0; k1 + k2 <= j; ++k2) {
          const long mult =
              std::min(1 + k2, 1 + j - k1 - k2) * (k1 + 1);
          Wt w{k1, k2};
          add_const_term(out, w, Int(mult));
        }
      return out;
    }
  }
  throw std::logic_error("unhandled solution family");
}

CharacterCombo combo_one(int rank) {
  return CharacterCombo::single(Wt(static_cast<std::size_t>(rank), 0));
}

// Exponents of the product term in the bilinear column recurrence at (a, j):
// E(b,k) = 2 delta_{(b,k),(a,j)} - (pairing contraction) / tvee_b.
std::map<std::pair<int, long>, long> recurrence_exponents(
    const AlgebraDatum& g, int a, long j) {
  std::map<std::pair<int, long>, long> out;
  const int n = g.n();
  const long kmax = 3 * j + 3;
  for (int b = 1; b <= n; ++b)
    for (long k = 1; k <= kmax; ++k) {
      Rat e = -g.pairing(a, b) * Rat(B_coeff(g, a, j, b, k)) /
              Rat(g.tvee[b - 1]);
      if (b == a && k == j) e += 2;
      if (e == 0) continue;
      if (!is_integer(e))
        throw std::logic_error("non-integer recurrence exponent");
      out[{b, k}] = to_long(e.get_num());
    }
  return out;
}

// Enumerates every dominant integral lambda whose distance from the column
// weight of W lies in the nonnegative root lattice of the ambient classical
// subalgebra, i.e. the candidates carrying a nonzero multiplicity.
void each_candidate_weight(
    const AlgebraDatum& g, const RatVec& vac,
    const std::function<void(const Wt&, const RatVec&)>& fn) {
  const int n = g.n();
  const RatVec r0 = iota_root_coords(g, vac);
  std::vector<long> box(static_cast<std::size_t>(n), 0);
  for (int b = 0; b < n; ++b) {
    if (r0[static_cast<std::size_t>(b)] < 0) return;
    box[static_cast<std::size_t>(b)] =
        to_long(rat_floor(r0[static_cast<std::size_t>(b)]));
  }
  std::vector<long> c(static_cast<std::size_t>(n), 0);
  while (true) {
    RatVec rr(static_cast<std::size_t>(n));
    for (int b = 0; b < n; ++b)
      rr[static_cast<std::size_t>(b)] =
          r0[static_cast<std::size_t>(b)] - Rat(c[static_cast<std::size_t>(b)]);
    bool ok = true;
    Wt lam(static_cast<std::size_t>(n), 0);
    RatVec lam_rat(static_cast<std::size_t>(n), Rat(0));
    for (int bq = 1; bq <= n && ok; ++bq) {
      Rat v(0);
      for (int b2 = 1; b2 <= n; ++b2)
        v += Rat(g.cartan_g0(bq, b2)) * rr[static_cast<std::size_t>(b2 - 1)];
      v /= Rat(g.eps[static_cast<std::size_t>(bq - 1)]);
      if (v < 0 || !is_integer(v)) {
        ok = false;
      } else {
        lam[static_cast<std::size_t>(bq - 1)] = to_long(v.get_num());
        lam_rat[static_cast<std::size_t>(bq - 1)] = v;
      }
    }
    if (ok) fn(lam, lam_rat);
    int pos = 0;
    while (pos < n && c[static_cast<std::size_t>(pos)] ==
                          box[static_cast<std::size_t>(pos)])
      c[static_cast<std::size_t>(pos++)] = 0;
    if (pos == n) break;
    ++c[static_cast<std::size_t>(pos)];
  }
}

// Closed monomial exponent of the graded coefficient of V(lambda) inside the
// single-column module with node a and s columns, for the three families
// whose coefficients are single powers of q.
Rat graded_monomial_exponent(const AlgebraDatum& g, PairKind kind, int a,
                             long s, const RatVec& lam) {
  const int n = g.n();
  RatVec diff(static_cast<std::size_t>(n), Rat(0));
  for (int b = 0; b < n; ++b) diff[static_cast<std::size_t>(b)] = -lam[b];
  diff[static_cast<std::size_t>(a - 1)] += Rat(s);
  if (kind == PairKind::TwistedEvenC) {
    // Pair the embeddings of Lambda_n and (s Lambda_a - lambda) through the
    // ambient bilinear form, then halve.
    RatVec top(static_cast<std::size_t>(n), Rat(0));
    top[static_cast<std::size_t>(n - 1)] = Rat(1);
    const RatVec xr = iota_root_coords(g, top);
    const RatVec yr = iota_root_coords(g, diff);
    Rat acc(0);
    for (int b = 1; b <= n; ++b)
      for (int c2 = 1; c2 <= n; ++c2)
        acc += xr[static_cast<std::size_t>(b - 1)] *
               yr[static_cast<std::size_t>(c2 - 1)] * g.pairing(b, c2);
    return acc / 2;
  }
  // Classical fundamental-weight Gram form of the ambient subalgebra.
  Rat acc(0);
  for (int c2 = 1; c2 <= n; ++c2)
    acc += g.gcirc.weight_gram(n - 1, c2 - 1) *
           diff[static_cast<std::size_t>(c2 - 1)];
  if (kind == PairKind::TwistedOddC) return acc / 2;
  return acc;  // TwistedD
}

}  // namespace

ClassicalAlgebra qsystem_classical(const AlgebraDatum& g, char family) {
  return pair_info(g, family).cls;
}

CharacterCombo qsystem_chi(const AlgebraDatum& g, char family, int a, long j) {
  return chi_impl(g, pair_info(g, family), a, j);
}

bool verify_qsystem(const AlgebraDatum& g, char family, int a, long j) {
  if (j < 1) throw std::invalid_argument("column count must be >= 1");
  const PairInfo pi = pair_info(g, family);
  if (a < 1 || a > g.n())
    throw std::invalid_argument("node index out of range");
  CharacterTable& tab = character_table(pi.cls);

  CharacterCombo cross = combo_one(pi.cls.rank);
  CharacterCombo prod = combo_one(pi.cls.rank);
  for (const auto& [slot, e] : recurrence_exponents(g, a, j)) {
    const CharacterCombo c = chi_impl(g, pi, slot.first, slot.second);
    for (long t = 0; t < std::labs(e); ++t) {
      if (e > 0)
        prod = combo_mul(tab, prod, c);
      else
        cross = combo_mul(tab, cross, c);
    }
  }
  const CharacterCombo cj = chi_impl(g, pi, a, j);
  const CharacterCombo lhs = combo_mul(tab, combo_mul(tab, cj, cj), cross);
  const CharacterCombo rhs = combo_add(
      combo_mul(tab,
                combo_mul(tab, chi_impl(g, pi, a, j + 1),
                          chi_impl(g, pi, a, j - 1)),
                cross),
      prod);
  return lhs == rhs;
}

CompletenessReport verify_completeness(const AlgebraDatum& g,
                                       const QuantumSpace& W) {
  const PairInfo pi = pair_info(g, g.gcirc.family);
  CharacterTable& tab = character_table(pi.cls);
  CompletenessReport rep;

  CharacterCombo lhs = combo_one(pi.cls.rank);
  for (const auto& [slot, count] : W.nu) {
    const CharacterCombo c = chi_impl(g, pi, slot.first, slot.second);
    for (long t = 0; t < count; ++t) lhs = combo_mul(tab, lhs, c);
  }
  rep.lhs = lhs;

  const int n = g.n();
  RatVec vac(static_cast<std::size_t>(n), Rat(0));
  for (const auto& [slot, count] : W.nu)
    vac[static_cast<std::size_t>(slot.first - 1)] +=
        Rat(slot.second) * Rat(count);
  CharacterCombo rhs;
  each_candidate_weight(g, vac, [&](const Wt& lam, const RatVec& lam_rat) {
    const WeightVector wl{lam_rat, WeightVector::Basis::FundamentalWeights};
    const Int mult =
        fermionic_Mtilde(g, W, wl, std::nullopt).evaluate_at_one();
    if (mult != 0) add_const_term(rhs, lam, mult);
  });
  rep.rhs = rhs;
  rep.equal = (rep.lhs == rep.rhs);
  return rep;
}

CharacterCombo graded_decomposition_W(const AlgebraDatum& g, int a, long s) {
  const int n = g.n();
  if (a < 1 || a > n) throw std::invalid_argument("node index out of range");
  if (s < 0) throw std::invalid_argument("column count must be nonnegative");
  CharacterCombo out;
  if (s == 0) {
    add_const_term(out, Wt(static_cast<std::size_t>(n), 0), Int(1));
    return out;
  }
  const QuantumSpace W = QuantumSpace::single(a, s);
  RatVec vac(static_cast<std::size_t>(n), Rat(0));
  vac[static_cast<std::size_t>(a - 1)] = Rat(s);

  const char fam_g = static_cast<char>(g.label.family);
  const int twist = g.label.twist;
  std::optional<PairKind> monomial_kind;
  if (fam_g == 'A' && twist == 2 && g.label.N % 2 == 1)
    monomial_kind = PairKind::TwistedOddC;
  if (fam_g == 'A' && twist == 2 && g.label.N % 2 == 0)
    monomial_kind = PairKind::TwistedEvenC;
  if (fam_g == 'D' && twist == 2) monomial_kind = PairKind::TwistedD;

  each_candidate_weight(g, vac, [&](const Wt& lam, const RatVec& lam_rat) {
    const WeightVector wl{lam_rat, WeightVector::Basis::FundamentalWeights};
    const LaurentSeries m = fermionic_M(g, W, wl, std::nullopt);
    if (m.is_zero()) return;
    const LaurentSeries coeff = m.substituted_inverse();
    if (monomial_kind) {
      const Rat e = graded_monomial_exponent(g, *monomial_kind, a, s, lam_rat);
      if (coeff.terms().size() != 1 || coeff.coefficient(e) != 1)
        throw std::logic_error(
            "graded coefficient differs from its closed monomial form");
    }
    out.add(lam, coeff);
  });
  return out;
}

bool graded_closed_form_available(const AlgebraDatum& g, int a) {
  const char fam_g = static_cast<char>(g.label.family);
  if (fam_g == 'E' && g.label.twist == 2)
    return a == 1 || a == 2 || a == 4;
  if (fam_g == 'D' && g.label.twist == 3) return a == 1 || a == 2;
  return false;
}

CharacterCombo graded_closed_form(const AlgebraDatum& g, int a, long s) {
  if (!graded_closed_form_available(g, a))
    throw std::invalid_argument("no closed graded form for this node");
  if (s < 0) throw std::invalid_argument("column count must be nonnegative");
  const char fam_g = static_cast<char>(g.label.family);
  CharacterCombo out;
  const auto qint = [](long len) {  // 1 + q + ... + q^{len-1}
    LaurentSeries acc;
    for (long t = 0; t < len; ++t)
      acc += LaurentSeries::monomial(1, Rat(t));
    return acc;
  };
  if (fam_g == 'D') {  // triality datum over G_2
    if (a == 1) {
      for (long k = 0; k <= s; ++k)
        out.add(Wt{k, 0}, LaurentSeries::monomial(1, Rat(s - k)));
      return out;
    }
    for (long j1 = 0; j1 <= s; ++j1)
      for (long j2 = 0; j1 + j2 <= s; ++j2) {
        const Int mult(std::min(1 + j2, 1 + s - j1 - j2));
        const LaurentSeries coeff =
            qint(j1 + 1).scaled(mult).shifted(Rat(3 * s - 2 * j1 - 3 * j2));
        out.add(Wt{j1, j2}, coeff);
      }
    return out;
  }
  // E^{(2)}_6 over F_4.
  if (a == 1) {
    for (long k = 0; k <= s; ++k)
      out.add(Wt{k, 0, 0, 0}, LaurentSeries::monomial(1, Rat(s - k)));
    return out;
  }
  if (a == 4) {
    for (long j1 = 0; j1 <= s; ++j1)
      for (long j4 = 0; j1 + j4 <= s; ++j4)
        out.add(Wt{j1, 0, 0, j4},
                LaurentSeries::monomial(1, Rat(2 * s - j1 - 2 * j4)));
    return out;
  }
  for (long j1 = 0; j1 <= s; ++j1)
    for (long j2 = 0; j1 + j2 <= s; ++j2)
      for (long j3 = 0; j1 + j2 + 2 * j3 <= s; ++j3)
        for (long j4 = 0; j1 + j2 + 2 * j3 + j4 <= s; ++j4) {
          const Int mult(std::min(1 + j2, 1 + s - j1 - j2 - 2 * j3 - j4));
          const LaurentSeries coeff =
              qint(j1 + 1).scaled(mult).shifted(
                  Rat(3 * s - 2 * j1 - 3 * j2 - 4 * j3 - 2 * j4));
          out.add(Wt{j1, j2, j3, j4}, coeff);
        }
  return out;
}

}  // namespace qaffine
