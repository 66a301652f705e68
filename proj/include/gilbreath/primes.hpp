#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace gilbreath {

/// The first K primes, addressed 1-based (p_1 = 2).
class PrimeTable {
 public:
  PrimeTable() = default;
  explicit PrimeTable(std::vector<std::uint32_t> values) : values_(std::move(values)) {}

  std::size_t limit() const noexcept { return values_.size(); }

  std::uint32_t nth(std::size_t n) const {
    if (n < 1 || n > values_.size())
      throw std::out_of_range("prime index " + std::to_string(n) + " outside 1.." +
                              std::to_string(values_.size()));
    return values_[n - 1];
  }

  const std::vector<std::uint32_t>& values() const noexcept { return values_; }

  friend bool operator==(const PrimeTable&, const PrimeTable&) = default;

 private:
  std::vector<std::uint32_t> values_;
};

namespace detail {

// p_k <= k (ln k + ln ln k) holds for k >= 6.
inline std::uint64_t prime_upper_estimate(std::size_t k) {
  if (k < 6) return 13;
  const double x = static_cast<double>(k);
  return static_cast<std::uint64_t>(x * (std::log(x) + std::log(std::log(x)))) + 1;
}

// Segmented sieve of Eratosthenes over [2, limit], stopping after `want` primes.
inline std::vector<std::uint32_t> sieve_upto(std::uint64_t limit, std::size_t want) {
  std::vector<std::uint32_t> out;
  if (limit < 2) return out;

  const auto root = static_cast<std::uint64_t>(std::sqrt(static_cast<double>(limit))) + 1;
  std::vector<char> small(root + 1, 1);
  std::vector<std::uint32_t> base;
  for (std::uint64_t i = 2; i <= root; ++i) {
    if (!small[i]) continue;
    base.push_back(static_cast<std::uint32_t>(i));
    for (std::uint64_t j = i * i; j <= root; j += i) small[j] = 0;
  }

  constexpr std::uint64_t kSegment = 1 << 15;
  std::vector<char> seg(kSegment);
  for (std::uint64_t lo = 2; lo <= limit && out.size() < want; lo += kSegment) {
    const std::uint64_t hi = std::min(lo + kSegment - 1, limit);
    std::fill(seg.begin(), seg.end(), 1);
    for (std::uint32_t p : base) {
      const std::uint64_t pp = std::uint64_t{p} * p;
      if (pp > hi) break;
      std::uint64_t start = std::max(pp, (lo + p - 1) / p * p);
      for (std::uint64_t j = start; j <= hi; j += p) seg[j - lo] = 0;
    }
    for (std::uint64_t i = lo; i <= hi && out.size() < want; ++i)
      if (seg[i - lo]) out.push_back(static_cast<std::uint32_t>(i));
  }
  return out;
}

}  // namespace detail

/// Generates exactly the first k primes. The sieve limit starts at the
/// standard upper estimate for p_k and doubles until k primes are found.
inline PrimeTable first_k_primes(std::size_t k) {
  if (k == 0) throw std::invalid_argument("first_k_primes: k must be >= 1");
  std::uint64_t limit = detail::prime_upper_estimate(k);
  for (;;) {
    auto v = detail::sieve_upto(limit, k);
    if (v.size() == k) return PrimeTable(std::move(v));
    limit *= 2;
  }
}

inline std::uint32_t nth_prime(const PrimeTable& table, std::size_t n) { return table.nth(n); }

// Cache format: "# primes k=<K>" then one prime per line, ascending.
inline void write_prime_cache(std::ostream& os, const PrimeTable& table) {
  os << "# primes k=" << table.limit() << '\n';
  for (auto p : table.values()) os << p << '\n';
}

inline PrimeTable read_prime_cache(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line.rfind("# primes k=", 0) != 0)
    throw std::runtime_error("prime cache: missing header");
  std::size_t k = 0;
  try {
    k = std::stoull(line.substr(11));
  } catch (const std::exception&) {
    throw std::runtime_error("prime cache: malformed header");
  }
  std::vector<std::uint32_t> v;
  v.reserve(k);
  std::uint64_t x = 0;
  while (v.size() < k && (is >> x)) {
    if (!v.empty() && x <= v.back()) throw std::runtime_error("prime cache: not ascending");
    v.push_back(static_cast<std::uint32_t>(x));
  }
  if (v.size() != k) throw std::runtime_error("prime cache: truncated");
  if (k > 0 && v.front() != 2) throw std::runtime_error("prime cache: first entry is not 2");
  return PrimeTable(std::move(v));
}

}  // namespace gilbreath
