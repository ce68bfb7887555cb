#pragma once

// Exact Laurent polynomials / truncated power series in q with exact-rational
// exponents and arbitrary-precision integer coefficients.
//
// Truncation semantics: a series may carry an order O meaning "terms with
// exponent >= O are unknown". Arithmetic propagates the tightest order that
// is still fully determined by the operands.

#include <nlohmann/json.hpp>

#include <map>
#include <optional>
#include <string>

#include "qaffine/common.hpp"

namespace qaffine {

class LaurentSeries {
 public:
  LaurentSeries() = default;

  static LaurentSeries zero() { return LaurentSeries(); }
  static LaurentSeries one() { return monomial(1, Rat(0)); }
  static LaurentSeries monomial(Int coeff, Rat exponent);

  const std::map<Rat, Int>& terms() const { return terms_; }
  const std::optional<Rat>& truncation() const { return trunc_; }
  bool is_zero() const { return terms_.empty(); }

  // Drops terms at or above the order and records it.
  LaurentSeries truncated(const Rat& order) const;

  Int coefficient(const Rat& exponent) const;
  // Lowest exponent present; throws on the zero polynomial.
  Rat min_exponent() const;
  Rat max_exponent() const;

  LaurentSeries operator+(const LaurentSeries& o) const;
  LaurentSeries operator-(const LaurentSeries& o) const;
  LaurentSeries operator*(const LaurentSeries& o) const;
  LaurentSeries& operator+=(const LaurentSeries& o);
  LaurentSeries& operator-=(const LaurentSeries& o);
  LaurentSeries& operator*=(const LaurentSeries& o);
  bool operator==(const LaurentSeries& o) const {
    return terms_ == o.terms_ && trunc_ == o.trunc_;
  }

  LaurentSeries scaled(const Int& c) const;
  // Multiplication by q^e.
  LaurentSeries shifted(const Rat& e) const;
  // q -> q^t with t a positive rational (exponent scaling).
  LaurentSeries substituted_power(const Rat& t) const;
  // q -> q^(-1); only meaningful on untruncated polynomials.
  LaurentSeries substituted_inverse() const;

  // Sum of coefficients; requires an untruncated polynomial.
  Int evaluate_at_one() const;

  // True when the two series agree on every exponent below both truncation
  // orders (or everywhere, if neither is truncated).
  bool agrees_with(const LaurentSeries& o) const;

  // Ascending-exponent display, e.g. "1 + 2*q^2 + q^(7/2)".
  std::string text() const;
  // Sorted [exponent "num/den", coefficient string] pairs.
  nlohmann::json to_json() const;

 private:
  void insert_term(const Rat& e, const Int& c);

  std::map<Rat, Int> terms_;
  std::optional<Rat> trunc_;
};

}  // namespace qaffine
