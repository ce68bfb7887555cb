#include "qaffine/characters.hpp"

#include <algorithm>
#include <mutex>
#include <set>
#include <sstream>

namespace qaffine {

namespace {

Wt add_wt(const Wt& a, const Wt& b) {
  Wt out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] + b[i];
  return out;
}

Wt sub_wt(const Wt& a, const Wt& b) {
  Wt out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] - b[i];
  return out;
}

}  // namespace

CharacterTable::CharacterTable(ClassicalAlgebra g) : g_(std::move(g)), n_(g_.rank) {
  // Positive roots by height: extend the alpha-string of each known root.
  std::set<Wt> roots;
  std::vector<Wt> frontier;
  for (int a = 0; a < n_; ++a) {
    Wt e(static_cast<std::size_t>(n_), 0);
    e[static_cast<std::size_t>(a)] = 1;
    roots.insert(e);
    frontier.push_back(e);
  }
  while (!frontier.empty()) {
    std::vector<Wt> next;
    for (const Wt& beta : frontier) {
      for (int a = 0; a < n_; ++a) {
        // <beta, h_a> in root coords.
        long pair_a = 0;
        for (int b = 0; b < n_; ++b)
          pair_a += beta[static_cast<std::size_t>(b)] *
                    to_long(g_.cartan[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)]);
        // Depth of the alpha_a-string below beta.
        long p = 0;
        Wt down = beta;
        while (true) {
          down[static_cast<std::size_t>(a)] -= 1;
          bool zero = std::all_of(down.begin(), down.end(), [](long v) { return v == 0; });
          if (zero || roots.count(down)) {
            ++p;
            if (zero) break;
          } else {
            break;
          }
        }
        if (p - pair_a > 0) {
          Wt up = beta;
          up[static_cast<std::size_t>(a)] += 1;
          if (roots.insert(up).second) next.push_back(up);
        }
      }
    }
    frontier = std::move(next);
  }
  pos_roots_.assign(roots.begin(), roots.end());

  pos_roots_fund_.reserve(pos_roots_.size());
  for (const Wt& r : pos_roots_) {
    Wt f(static_cast<std::size_t>(n_), 0);
    for (int a = 0; a < n_; ++a) {
      long v = 0;
      for (int b = 0; b < n_; ++b)
        v += to_long(g_.cartan[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)]) *
             r[static_cast<std::size_t>(b)];
      f[static_cast<std::size_t>(a)] = v;
    }
    pos_roots_fund_.push_back(f);
  }

  gram_.assign(static_cast<std::size_t>(n_), RatVec(static_cast<std::size_t>(n_), Rat(0)));
  for (int a = 0; a < n_; ++a)
    for (int b = 0; b < n_; ++b)
      gram_[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] = g_.weight_gram(a, b);
}

Rat CharacterTable::inner_fund(const Wt& x, const Wt& y) const {
  Rat out(0);
  for (int a = 0; a < n_; ++a) {
    if (x[static_cast<std::size_t>(a)] == 0) continue;
    for (int b = 0; b < n_; ++b)
      out += Rat(x[static_cast<std::size_t>(a)]) * y[static_cast<std::size_t>(b)] *
             gram_[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)];
  }
  return out;
}

Rat CharacterTable::inner_fund_root(const Wt& x_fund, const Wt& alpha_root) const {
  // (Lambda_a | alpha_b) = d_b delta_{ab}.
  Rat out(0);
  for (int b = 0; b < n_; ++b)
    out += Rat(alpha_root[static_cast<std::size_t>(b)]) * g_.d[static_cast<std::size_t>(b)] *
           x_fund[static_cast<std::size_t>(b)];
  return out;
}

bool CharacterTable::is_dominant(const Wt& mu) const {
  return std::all_of(mu.begin(), mu.end(), [](long v) { return v >= 0; });
}

Wt CharacterTable::dominant_rep(Wt mu) const {
  while (true) {
    int neg = -1;
    for (int a = 0; a < n_; ++a)
      if (mu[static_cast<std::size_t>(a)] < 0) {
        neg = a;
        break;
      }
    if (neg < 0) return mu;
    const long c = mu[static_cast<std::size_t>(neg)];
    for (int b = 0; b < n_; ++b)
      mu[static_cast<std::size_t>(b)] -=
          c * to_long(g_.cartan[static_cast<std::size_t>(b)][static_cast<std::size_t>(neg)]);
  }
}

std::vector<Wt> CharacterTable::orbit(const Wt& dominant) const {
  std::set<Wt> seen{dominant};
  std::vector<Wt> frontier{dominant};
  while (!frontier.empty()) {
    std::vector<Wt> next;
    for (const Wt& w : frontier)
      for (int a = 0; a < n_; ++a) {
        const long c = w[static_cast<std::size_t>(a)];
        if (c == 0) continue;
        Wt r = w;
        for (int b = 0; b < n_; ++b)
          r[static_cast<std::size_t>(b)] -=
              c * to_long(g_.cartan[static_cast<std::size_t>(b)][static_cast<std::size_t>(a)]);
        if (seen.insert(r).second) next.push_back(r);
      }
    frontier = std::move(next);
  }
  return {seen.begin(), seen.end()};
}

const std::map<Wt, Int>& CharacterTable::dominant_weights(const Wt& lambda) {
  auto hit = mult_cache_.find(lambda);
  if (hit != mult_cache_.end()) return hit->second;
  if (!is_dominant(lambda)) throw std::invalid_argument("dominant_weights: lambda not dominant");

  // Candidate dominant weights mu = lambda - sum c_a alpha_a with c in a box
  // bounded by the (entrywise nonnegative) inverse Cartan applied to lambda.
  std::vector<long> bound(static_cast<std::size_t>(n_), 0);
  for (int a = 0; a < n_; ++a) {
    Rat v(0);
    for (int b = 0; b < n_; ++b)
      v += g_.cartan_inv[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] *
           lambda[static_cast<std::size_t>(b)];
    bound[static_cast<std::size_t>(a)] = to_long(rat_floor(v));
  }
  std::vector<std::pair<long, Wt>> dominated;  // (height, mu)
  Wt c(static_cast<std::size_t>(n_), 0);
  // Plain nested enumeration via odometer.
  while (true) {
    Wt mu = lambda;
    for (int a = 0; a < n_; ++a)
      for (int b = 0; b < n_; ++b)
        mu[static_cast<std::size_t>(a)] -=
            to_long(g_.cartan[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)]) *
            c[static_cast<std::size_t>(b)];
    if (is_dominant(mu)) {
      long h = 0;
      for (long v : c) h += v;
      dominated.emplace_back(h, mu);
    }
    int pos = 0;
    while (pos < n_ && c[static_cast<std::size_t>(pos)] == bound[static_cast<std::size_t>(pos)]) {
      c[static_cast<std::size_t>(pos)] = 0;
      ++pos;
    }
    if (pos == n_) break;
    ++c[static_cast<std::size_t>(pos)];
  }
  std::sort(dominated.begin(), dominated.end());

  std::map<Wt, Int>& mult = mult_cache_[lambda];
  const Wt rho(static_cast<std::size_t>(n_), 1);
  const Rat norm_l = inner_fund(add_wt(lambda, rho), add_wt(lambda, rho));
  for (const auto& [h, mu] : dominated) {
    if (h == 0) {
      mult[mu] = 1;
      continue;
    }
    // Freudenthal recursion over alpha-strings above mu.
    Rat rhs(0);
    for (std::size_t ri = 0; ri < pos_roots_.size(); ++ri) {
      const Wt& alpha_f = pos_roots_fund_[ri];
      Wt nu = mu;
      for (long k = 1;; ++k) {
        nu = add_wt(nu, alpha_f);
        const auto it = mult.find(dominant_rep(nu));
        if (it == mult.end()) break;  // left the weight hull along this ray
        rhs += Rat(it->second) * inner_fund_root(nu, pos_roots_[ri]);
      }
    }
    const Rat denom = norm_l - inner_fund(add_wt(mu, rho), add_wt(mu, rho));
    const Rat m = 2 * rhs / denom;
    if (!is_integer(m) || m < 0)
      throw std::logic_error("weight multiplicity recursion produced a non-integer");
    if (m > 0) mult[mu] = Int(m.get_num());
  }
  return mult;
}

Int CharacterTable::weight_mult(const Wt& lambda, const Wt& mu) {
  const auto& m = dominant_weights(lambda);
  const auto it = m.find(dominant_rep(mu));
  return it == m.end() ? Int(0) : it->second;
}

std::vector<std::pair<Wt, Int>> CharacterTable::weight_system(const Wt& lambda) {
  std::vector<std::pair<Wt, Int>> out;
  for (const auto& [mu, m] : dominant_weights(lambda))
    for (const Wt& w : orbit(mu)) out.emplace_back(w, m);
  return out;
}

Int CharacterTable::dim(const Wt& lambda) {
  const Wt rho(static_cast<std::size_t>(n_), 1);
  const Wt lr = add_wt(lambda, rho);
  Rat prod(1);
  for (std::size_t ri = 0; ri < pos_roots_.size(); ++ri)
    prod *= inner_fund_root(lr, pos_roots_[ri]) / inner_fund_root(rho, pos_roots_[ri]);
  if (!is_integer(prod)) throw std::logic_error("dimension formula produced a non-integer");
  return Int(prod.get_num());
}

const std::map<Wt, Int>& CharacterTable::tensor_decompose(const Wt& lambda, const Wt& mu) {
  const auto key = std::make_pair(lambda, mu);
  auto hit = tensor_cache_.find(key);
  if (hit != tensor_cache_.end()) return hit->second;

  // Convolve against the weight system of the smaller factor.
  const Wt& big = dim(lambda) >= dim(mu) ? lambda : mu;
  const Wt& small = dim(lambda) >= dim(mu) ? mu : lambda;

  std::map<Wt, Int> result;
  const Wt rho(static_cast<std::size_t>(n_), 1);
  for (const auto& [nu, m] : weight_system(small)) {
    Wt t = add_wt(add_wt(big, rho), nu);
    int sign = 1;
    bool wall = false;
    while (true) {
      int neg = -1;
      for (int a = 0; a < n_; ++a) {
        if (t[static_cast<std::size_t>(a)] == 0) {
          wall = true;
          break;
        }
        if (t[static_cast<std::size_t>(a)] < 0) {
          neg = a;
          break;
        }
      }
      if (wall || neg < 0) break;
      const long cval = t[static_cast<std::size_t>(neg)];
      for (int b = 0; b < n_; ++b)
        t[static_cast<std::size_t>(b)] -=
            cval * to_long(g_.cartan[static_cast<std::size_t>(b)][static_cast<std::size_t>(neg)]);
      sign = -sign;
    }
    if (wall) continue;
    const Wt target = sub_wt(t, rho);
    auto& acc = result[target];
    acc += sign * m;
    if (acc == 0) result.erase(target);
  }
  for (const auto& [w, m] : result)
    if (m < 0) throw std::logic_error("tensor decomposition produced a negative multiplicity");
  return tensor_cache_.emplace(key, std::move(result)).first->second;
}

CharacterTable& character_table(const ClassicalAlgebra& g) {
  static std::mutex mu;
  static std::map<std::string, std::unique_ptr<CharacterTable>> registry;
  std::ostringstream key;
  key << g.family << g.rank;
  for (const auto& row : g.cartan)
    for (const auto& v : row) key << ',' << v;
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = registry[key.str()];
  if (!slot) slot = std::make_unique<CharacterTable>(g);
  return *slot;
}

void CharacterCombo::add(const Wt& w, const LaurentSeries& coeff) {
  auto it = terms.find(w);
  if (it == terms.end()) {
    if (!coeff.is_zero()) terms.emplace(w, coeff);
    return;
  }
  it->second += coeff;
  if (it->second.is_zero()) terms.erase(it);
}

CharacterCombo CharacterCombo::single(const Wt& w, LaurentSeries coeff) {
  CharacterCombo c;
  if (!coeff.is_zero()) c.terms.emplace(w, std::move(coeff));
  return c;
}

nlohmann::json CharacterCombo::to_json() const {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& [w, s] : terms) arr.push_back({{"weight", w}, {"coeff", s.to_json()}});
  return arr;
}

std::string CharacterCombo::text() const {
  if (terms.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [w, s] : terms) {
    if (!first) os << " + ";
    first = false;
    os << "(" << s.text() << ")*V[";
    for (std::size_t i = 0; i < w.size(); ++i) os << (i ? "," : "") << w[i];
    os << "]";
  }
  return os.str();
}

CharacterCombo combo_add(const CharacterCombo& a, const CharacterCombo& b) {
  CharacterCombo out = a;
  for (const auto& [w, s] : b.terms) out.add(w, s);
  return out;
}

CharacterCombo combo_mul(CharacterTable& t, const CharacterCombo& a, const CharacterCombo& b) {
  CharacterCombo out;
  for (const auto& [wa, sa] : a.terms)
    for (const auto& [wb, sb] : b.terms) {
      const LaurentSeries c = sa * sb;
      for (const auto& [w, m] : t.tensor_decompose(wa, wb)) out.add(w, c.scaled(m));
    }
  return out;
}

Int combo_dim(CharacterTable& t, const CharacterCombo& c) {
  Int out = 0;
  for (const auto& [w, s] : c.terms) out += s.evaluate_at_one() * t.dim(w);
  return out;
}

std::map<Wt, Int> combo_at_one(const CharacterCombo& c) {
  std::map<Wt, Int> out;
  for (const auto& [w, s] : c.terms) {
    Int v = s.evaluate_at_one();
    if (v != 0) out.emplace(w, std::move(v));
  }
  return out;
}

}  // namespace qaffine
