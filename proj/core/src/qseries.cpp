#include "qaffine/qseries.hpp"

#include <map>
#include <mutex>
#include <utility>

namespace qaffine {

namespace {

std::mutex g_gauss_mutex;
std::map<std::pair<long, long>, LaurentSeries> g_gauss_cache;

LaurentSeries gaussian_binomial_uncached(long n, long k) {
  // Pascal recurrence [n,k] = [n-1,k-1] + q^k [n-1,k]; row-by-row fill.
  std::vector<LaurentSeries> row(static_cast<std::size_t>(k) + 1);
  row[0] = LaurentSeries::one();
  for (long i = 1; i <= n; ++i) {
    const long kmax = std::min(i, k);
    for (long j = kmax; j >= 1; --j) {
      LaurentSeries v = row[static_cast<std::size_t>(j - 1)];
      if (j < i) v += row[static_cast<std::size_t>(j)].shifted(Rat(j));
      row[static_cast<std::size_t>(j)] = std::move(v);
    }
  }
  return row[static_cast<std::size_t>(k)];
}

}  // namespace

LaurentSeries gaussian_binomial(long n, long k) {
  if (k < 0 || k > n) return LaurentSeries::zero();
  if (k == 0 || k == n) return LaurentSeries::one();
  if (2 * k > n) k = n - k;  // symmetry keeps the cache small
  const std::pair<long, long> key{n, k};
  std::lock_guard<std::mutex> lock(g_gauss_mutex);
  auto it = g_gauss_cache.find(key);
  if (it == g_gauss_cache.end())
    it = g_gauss_cache.emplace(key, gaussian_binomial_uncached(n, k)).first;
  return it->second;
}

LaurentSeries qbinomial(long p, long m, long t) {
  if (m < 0) throw std::invalid_argument("qbinomial: m must be nonnegative");
  if (t < 1) throw std::invalid_argument("qbinomial: base exponent must be positive");
  if (m == 0) return LaurentSeries::one();
  if (p >= 0) return gaussian_binomial(p + m, m).substituted_power(Rat(t));
  if (p >= -m) return LaurentSeries::zero();
  // p <= -m-1; m*p + m(m+1)/2 is an integer because m(m+1) is even.
  LaurentSeries base = gaussian_binomial(-p - 1, m).substituted_power(Rat(t));
  const Int shift = Int(t) * (Int(m) * p + Int(m) * (m + 1) / 2);
  base = base.shifted(Rat(shift));
  return m % 2 == 0 ? base : base.scaled(Int(-1));
}

LaurentSeries pochhammer(long k, long t) {
  if (k < 0) throw std::invalid_argument("pochhammer: k must be nonnegative");
  LaurentSeries out = LaurentSeries::one();
  for (long i = 1; i <= k; ++i) {
    out *= LaurentSeries::one() - LaurentSeries::monomial(1, Rat(t * i));
  }
  return out;
}

LaurentSeries inv_pochhammer(std::optional<long> k, long t, const Rat& order) {
  if (t < 1) throw std::invalid_argument("inv_pochhammer: base exponent must be positive");
  if (k && *k < 0) throw std::invalid_argument("inv_pochhammer: k must be nonnegative");
  if (k && *k == 0) return LaurentSeries::one();
  auto geometric = [&](long step) {
    LaurentSeries g;
    for (Rat e(0); e < order; e += step) g += LaurentSeries::monomial(1, e);
    return g.truncated(order);
  };
  LaurentSeries out = LaurentSeries::one().truncated(order);
  // Factors with t*i >= order contribute 1 + O(q^order); skip them.
  for (long i = 1; (!k || i <= *k) && Rat(t) * i < order; ++i) out *= geometric(t * i);
  return out.truncated(order);
}

Int binomial_int(long n, long k) {
  if (k < 0 || k > n || n < 0) return Int(0);
  Int out;
  mpz_bin_uiui(out.get_mpz_t(), static_cast<unsigned long>(n), static_cast<unsigned long>(k));
  return out;
}

}  // namespace qaffine
