#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "gilbreath/triangle.hpp"

namespace gilbreath {

inline constexpr std::uint32_t kDefaultStableMargin = 100;

/// Per-column last row holding a value greater than 2, within the computed region.
class BTable {
 public:
  BTable() = default;
  BTable(std::uint32_t bound, std::vector<std::uint32_t> last_exceed, std::uint32_t stable_margin)
      : bound_(bound), b_(std::move(last_exceed)), stable_margin_(stable_margin) {}

  std::uint32_t bound() const noexcept { return bound_; }
  std::uint32_t columns() const noexcept { return bound_ - 1; }
  std::uint32_t stable_margin() const noexcept { return stable_margin_; }

  /// B(n) for 1 <= n <= S-1, absent when no entry of column n exceeds 2.
  std::optional<std::uint32_t> at(std::uint32_t n) const {
    if (n < 1 || n > columns())
      throw std::out_of_range("B column " + std::to_string(n) + " outside 1.." +
                              std::to_string(columns()));
    if (b_[n] == 0) return std::nullopt;
    return b_[n];
  }

  /// Zero encodes "absent"; index 0 unused.
  std::uint32_t raw(std::uint32_t n) const noexcept { return b_[n]; }
  const std::vector<std::uint32_t>& raw() const noexcept { return b_; }

  /// True when fewer than stable_margin rows of column n lie below B(n).
  bool provisional(std::uint32_t n) const {
    auto b = at(n);
    if (!b) return false;
    return std::int64_t{bound_} - n - *b < std::int64_t{stable_margin_};
  }

  friend bool operator==(const BTable&, const BTable&) = default;

 private:
  std::uint32_t bound_ = 0;
  std::vector<std::uint32_t> b_;
  std::uint32_t stable_margin_ = kDefaultStableMargin;
};

inline BTable compute_b(const DiffTriangle& t, std::uint32_t stable_margin = kDefaultStableMargin) {
  std::vector<std::uint32_t> b(t.bound(), 0);
  for (std::uint32_t n = 1; n < t.bound(); ++n)
    if (t.first_row()[n - 1] > 2) b[n] = 1;
  // Every entry > 2 below row 1 is in the exception list.
  for (const auto& e : t.exceptions())
    if (e.value > 2 && e.m > b[e.n]) b[e.n] = e.m;
  // Column 1 is excluded: d(1,1) = 2 and the rest are 1 when the conjecture holds.
  return BTable(t.bound(), std::move(b), stable_margin);
}

/// Tally of B(n) = k over 2 <= n <= max_n.
inline std::map<std::int64_t, std::uint64_t> b_histogram(const BTable& b, std::uint32_t max_n) {
  if (max_n > b.columns())
    throw std::invalid_argument("b_histogram: max_n exceeds column range");
  std::map<std::int64_t, std::uint64_t> h;
  for (std::uint32_t n = 2; n <= max_n; ++n)
    if (auto v = b.at(n)) ++h[*v];
  return h;
}

/// Largest B(n) over 2 <= n <= max_n (0 if none).
inline std::uint32_t max_b(const BTable& b, std::uint32_t max_n) {
  std::uint32_t best = 0;
  for (std::uint32_t n = 2; n <= max_n && n <= b.columns(); ++n) best = std::max(best, b.raw(n));
  return best;
}

/// less/equal/greater compare B(n+1) against B(n), i.e. the sign of the difference.
struct BDiffs {
  std::map<std::int64_t, std::uint64_t> counts;  // B(n+1) - B(n) -> occurrences
  std::uint64_t less = 0;                        // B(n+1) < B(n)
  std::uint64_t equal = 0;
  std::uint64_t greater = 0;                     // B(n+1) > B(n)
};

/// Consecutive differences B(n+1) - B(n) for 2 <= n <= max_n.
inline BDiffs b_diffs(const BTable& b, std::uint32_t max_n) {
  if (max_n + 1 > b.columns())
    throw std::invalid_argument("b_diffs: max_n must be <= S - 2");
  BDiffs d;
  for (std::uint32_t n = 2; n <= max_n; ++n) {
    auto lo = b.at(n), hi = b.at(n + 1);
    if (!lo || !hi) continue;
    const std::int64_t delta = std::int64_t{*hi} - *lo;
    ++d.counts[delta];
    if (delta < 0)
      ++d.less;
    else if (delta == 0)
      ++d.equal;
    else
      ++d.greater;
  }
  return d;
}

struct MomentSummary {
  double mean = 0;
  double variance = 0;
  double gamma1 = 0;  // skewness m3 / m2^1.5
  double gamma2 = 0;  // excess kurtosis m4 / m2^2 - 3
  std::uint64_t count = 0;
};

/// Population moments of a weighted value distribution.
inline MomentSummary moments(const std::map<std::int64_t, std::uint64_t>& histogram) {
  MomentSummary s;
  double sum = 0;
  for (auto [v, c] : histogram) {
    s.count += c;
    sum += static_cast<double>(v) * static_cast<double>(c);
  }
  if (s.count < 2) throw std::invalid_argument("moments: need at least two observations");
  const double total = static_cast<double>(s.count);
  s.mean = sum / total;
  double m2 = 0, m3 = 0, m4 = 0;
  for (auto [v, c] : histogram) {
    const double d = static_cast<double>(v) - s.mean;
    const double w = static_cast<double>(c);
    m2 += w * d * d;
    m3 += w * d * d * d;
    m4 += w * d * d * d * d;
  }
  m2 /= total;
  m3 /= total;
  m4 /= total;
  if (m2 <= 0) throw std::invalid_argument("moments: degenerate distribution");
  s.variance = m2;
  s.gamma1 = m3 / std::pow(m2, 1.5);
  s.gamma2 = m4 / (m2 * m2) - 3.0;
  return s;
}

/**
 * Shape statistics of the frequency profile itself: the counts c_k for every
 * value k in [lo, hi] (missing keys count as zero) are treated as a sample.
 * Central moments use divisor K, the scale uses the Bessel-corrected standard
 * deviation s:  gamma1 = m3 / s^3,  gamma2 = m4 / s^4 - 3.
 *
 * This is the convention behind the skewness/kurtosis quoted alongside the
 * B(n) and B(n+1)-B(n) bar charts; the weighted-value moments() above give
 * different numbers for the same histograms.
 */
inline MomentSummary frequency_moments(const std::map<std::int64_t, std::uint64_t>& histogram,
                                       std::int64_t lo, std::int64_t hi) {
  if (hi <= lo) throw std::invalid_argument("frequency_moments: need at least two bins");
  std::vector<double> c;
  for (std::int64_t k = lo; k <= hi; ++k) {
    auto it = histogram.find(k);
    c.push_back(it == histogram.end() ? 0.0 : static_cast<double>(it->second));
  }
  const double K = static_cast<double>(c.size());
  double mean = 0;
  for (double x : c) mean += x;
  mean /= K;
  double ss = 0, m3 = 0, m4 = 0;
  for (double x : c) {
    const double d = x - mean;
    ss += d * d;
    m3 += d * d * d;
    m4 += d * d * d * d;
  }
  if (ss <= 0) throw std::invalid_argument("frequency_moments: flat profile");
  m3 /= K;
  m4 /= K;
  const double s2 = ss / (K - 1);
  MomentSummary s;
  s.count = c.size();
  s.mean = mean;
  s.variance = s2;
  s.gamma1 = m3 / std::pow(s2, 1.5);
  s.gamma2 = m4 / (s2 * s2) - 3.0;
  return s;
}

/// Restriction of a histogram to keys in [lo, hi].
inline std::map<std::int64_t, std::uint64_t> restrict_range(
    const std::map<std::int64_t, std::uint64_t>& h, std::int64_t lo, std::int64_t hi) {
  return {h.lower_bound(lo), h.upper_bound(hi)};
}

}  // namespace gilbreath
