#include "qaffine/laurent.hpp"

#include <sstream>

namespace qaffine {

namespace {

std::optional<Rat> min_opt(const std::optional<Rat>& a, const std::optional<Rat>& b) {
  if (!a) return b;
  if (!b) return a;
  return std::min(*a, *b);
}

}  // namespace

LaurentSeries LaurentSeries::monomial(Int coeff, Rat exponent) {
  LaurentSeries s;
  if (coeff != 0) s.terms_.emplace(std::move(exponent), std::move(coeff));
  return s;
}

void LaurentSeries::insert_term(const Rat& e, const Int& c) {
  if (c == 0) return;
  if (trunc_ && e >= *trunc_) return;
  auto it = terms_.find(e);
  if (it == terms_.end()) {
    terms_.emplace(e, c);
  } else {
    it->second += c;
    if (it->second == 0) terms_.erase(it);
  }
}

LaurentSeries LaurentSeries::truncated(const Rat& order) const {
  LaurentSeries out;
  out.trunc_ = min_opt(trunc_, order);
  for (const auto& [e, c] : terms_) {
    if (e >= *out.trunc_) break;
    out.terms_.emplace(e, c);
  }
  return out;
}

Int LaurentSeries::coefficient(const Rat& exponent) const {
  auto it = terms_.find(exponent);
  return it == terms_.end() ? Int(0) : it->second;
}

Rat LaurentSeries::min_exponent() const {
  if (terms_.empty()) throw std::logic_error("min_exponent of zero series");
  return terms_.begin()->first;
}

Rat LaurentSeries::max_exponent() const {
  if (terms_.empty()) throw std::logic_error("max_exponent of zero series");
  return terms_.rbegin()->first;
}

LaurentSeries LaurentSeries::operator+(const LaurentSeries& o) const {
  LaurentSeries out;
  out.trunc_ = min_opt(trunc_, o.trunc_);
  for (const auto& [e, c] : terms_) out.insert_term(e, c);
  for (const auto& [e, c] : o.terms_) out.insert_term(e, c);
  return out;
}

LaurentSeries LaurentSeries::operator-(const LaurentSeries& o) const {
  return *this + o.scaled(Int(-1));
}

LaurentSeries LaurentSeries::operator*(const LaurentSeries& o) const {
  // An operand that is exactly zero annihilates, unknown tail or not.
  if (terms_.empty() && !trunc_) return LaurentSeries();
  if (o.terms_.empty() && !o.trunc_) return LaurentSeries();
  auto low = [](const LaurentSeries& s) {
    return s.terms_.empty() ? *s.trunc_ : s.terms_.begin()->first;
  };
  LaurentSeries out;
  if (trunc_) out.trunc_ = min_opt(out.trunc_, *trunc_ + low(o));
  if (o.trunc_) out.trunc_ = min_opt(out.trunc_, *o.trunc_ + low(*this));
  for (const auto& [e1, c1] : terms_) {
    for (const auto& [e2, c2] : o.terms_) {
      const Rat e = e1 + e2;
      if (out.trunc_ && e >= *out.trunc_) break;  // exponents ascend in the inner map
      out.insert_term(e, c1 * c2);
    }
  }
  return out;
}

LaurentSeries& LaurentSeries::operator+=(const LaurentSeries& o) { return *this = *this + o; }
LaurentSeries& LaurentSeries::operator-=(const LaurentSeries& o) { return *this = *this - o; }
LaurentSeries& LaurentSeries::operator*=(const LaurentSeries& o) { return *this = *this * o; }

LaurentSeries LaurentSeries::scaled(const Int& c) const {
  LaurentSeries out;
  out.trunc_ = trunc_;
  if (c == 0) return out;
  for (const auto& [e, v] : terms_) out.terms_.emplace(e, v * c);
  return out;
}

LaurentSeries LaurentSeries::shifted(const Rat& e) const {
  LaurentSeries out;
  if (trunc_) out.trunc_ = *trunc_ + e;
  for (const auto& [x, v] : terms_) out.terms_.emplace(x + e, v);
  return out;
}

LaurentSeries LaurentSeries::substituted_power(const Rat& t) const {
  if (t <= 0) throw std::invalid_argument("substituted_power: exponent factor must be positive");
  LaurentSeries out;
  if (trunc_) out.trunc_ = *trunc_ * t;
  for (const auto& [x, v] : terms_) out.terms_.emplace(x * t, v);
  return out;
}

LaurentSeries LaurentSeries::substituted_inverse() const {
  if (trunc_)
    throw std::logic_error("substituted_inverse on a truncated series is not determined");
  LaurentSeries out;
  for (const auto& [x, v] : terms_) out.terms_.emplace(-x, v);
  return out;
}

Int LaurentSeries::evaluate_at_one() const {
  if (trunc_) throw std::logic_error("evaluate_at_one on a truncated series is not determined");
  Int s = 0;
  for (const auto& [e, c] : terms_) s += c;
  return s;
}

bool LaurentSeries::agrees_with(const LaurentSeries& o) const {
  const std::optional<Rat> order = min_opt(trunc_, o.trunc_);
  if (!order) return terms_ == o.terms_;
  for (auto it = terms_.begin(); it != terms_.end() && it->first < *order; ++it)
    if (o.coefficient(it->first) != it->second) return false;
  for (auto it = o.terms_.begin(); it != o.terms_.end() && it->first < *order; ++it)
    if (coefficient(it->first) != it->second) return false;
  return true;
}

namespace {

std::string rat_text(const Rat& r) {
  std::ostringstream os;
  os << r;
  return os.str();
}

std::string term_text(const Rat& e, const Int& c_abs) {
  std::string base;
  if (e == 0) return c_abs.get_str();
  if (e == 1) {
    base = "q";
  } else if (is_integer(e) && e > 0) {
    base = "q^" + rat_text(e);
  } else {
    base = "q^(" + rat_text(e) + ")";
  }
  if (c_abs == 1) return base;
  return c_abs.get_str() + "*" + base;
}

}  // namespace

std::string LaurentSeries::text() const {
  std::string out;
  if (terms_.empty()) {
    out = "0";
  } else {
    bool first = true;
    for (const auto& [e, c] : terms_) {
      const bool neg = c < 0;
      const Int mag = neg ? Int(-c) : c;
      if (first) {
        if (neg) out += "-";
        first = false;
      } else {
        out += neg ? " - " : " + ";
      }
      out += term_text(e, mag);
    }
  }
  if (trunc_) out += " + O(q^(" + rat_text(*trunc_) + "))";
  return out;
}

nlohmann::json LaurentSeries::to_json() const {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& [e, c] : terms_) {
    arr.push_back({rat_text(e.get_num()) + "/" + rat_text(e.get_den()), c.get_str()});
  }
  return arr;
}

}  // namespace qaffine
