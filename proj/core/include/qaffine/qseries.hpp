#pragma once

// q-binomial coefficients (all integer first arguments, including the
// negative-range clauses) and Pochhammer-symbol series, in a chosen base
// q^t.

#include <optional>

#include "qaffine/laurent.hpp"

namespace qaffine {

// Gaussian binomial [n over k] in base q; zero unless 0 <= k <= n.
LaurentSeries gaussian_binomial(long n, long k);

// [p+m over m] in base q^t for any integer p and m >= 0:
//   p >= 0            : Gaussian binomial,
//   -m <= p <= -1     : 0,
//   p <= -m-1         : (-1)^m q^{t(mp + m(m+1)/2)} [ -p-1 over m ].
LaurentSeries qbinomial(long p, long m, long t = 1);

// Product (q^t; q^t)_k = prod_{i=1..k} (1 - q^{ti}); exact polynomial.
LaurentSeries pochhammer(long k, long t = 1);

// 1/(q^t;q^t)_k truncated at the given order; k = nullopt means the infinite
// product. (q)_0 = 1 is returned exactly (untruncated).
LaurentSeries inv_pochhammer(std::optional<long> k, long t, const Rat& order);

// Exact ordinary binomial coefficient (n choose k), 0 for k < 0 or k > n.
Int binomial_int(long n, long k);

}  // namespace qaffine
