#pragma once

#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "gilbreath/bfunc.hpp"
#include "gilbreath/format.hpp"
#include "gilbreath/triangle.hpp"

namespace gilbreath {

inline constexpr unsigned kDefaultMaxPatternLength = 6;
/// Hard ceiling on window length; 2^20 counters per worker.
inline constexpr unsigned kPatternLengthCeiling = 20;

enum class Orientation { horizontal, vertical };

inline std::string_view to_string(Orientation o) {
  return o == Orientation::horizontal ? "horizontal" : "vertical";
}

/// Cells of the stabilized region: n >= 2, m + n <= S, B(n) present, m > B(n).
class EligibilityMask {
 public:
  EligibilityMask(const DiffTriangle& t, const BTable& b) : t_(&t), b_(&b) {
    if (t.bound() != b.bound()) throw std::invalid_argument("triangle and B table bounds differ");
    for (std::uint32_t n = 2; n <= b.columns(); ++n) max_b_ = std::max(max_b_, b.raw(n));
  }

  const DiffTriangle& triangle() const noexcept { return *t_; }
  const BTable& btable() const noexcept { return *b_; }
  std::uint32_t bound() const noexcept { return t_->bound(); }
  /// Rows deeper than this are eligible across their whole width (n >= 2).
  std::uint32_t max_b() const noexcept { return max_b_; }

  bool eligible(std::uint32_t m, std::uint32_t n) const noexcept {
    if (n < 2 || m < 1 || std::uint64_t{m} + n > t_->bound()) return false;
    const std::uint32_t b = b_->raw(n);
    return b != 0 && m > b;
  }

 private:
  const DiffTriangle* t_;
  const BTable* b_;
  std::uint32_t max_b_ = 0;
};

struct EligibleTotals {
  std::uint64_t total = 0;
  std::uint64_t zeros = 0;
  std::uint64_t twos = 0;

  friend bool operator==(const EligibleTotals&, const EligibleTotals&) = default;
};

inline EligibleTotals eligible_totals(const EligibilityMask& mask) {
  const DiffTriangle& t = mask.triangle();
  EligibleTotals r;
  for (std::uint32_t m = 2; m < t.bound(); ++m) {
    const std::uint32_t len = t.row_length(m);
    if (len < 2) continue;
    if (m > mask.max_b()) {
      // Columns 2..len, i.e. bits 1..len-1.
      const auto words = t.row_words(m);
      std::uint64_t ones = 0;
      for (std::size_t w = 0; w < words.size(); ++w) {
        std::uint64_t x = words[w];
        if (w == 0) x &= ~std::uint64_t{1};
        ones += static_cast<std::uint64_t>(std::popcount(x));
      }
      r.total += len - 1;
      r.twos += ones;
    } else {
      for (std::uint32_t n = 2; n <= len; ++n) {
        if (!mask.eligible(m, n)) continue;
        ++r.total;
        r.twos += t.bit(m, n);
      }
    }
  }
  r.zeros = r.total - r.twos;
  return r;
}

/**
 * Frequencies of every {0,2}-pattern of one length and orientation.
 *
 * counts[i] belongs to the pattern whose first cell is the most significant
 * of the l bits of i (0 -> 0, 2 -> 1), so index order equals lexicographic
 * order of the rendered strings ("00" < "02" < "20" < "22").
 */
struct PatternCensus {
  unsigned length = 0;
  Orientation orientation = Orientation::horizontal;
  std::vector<std::uint64_t> counts;

  std::uint64_t total() const noexcept {
    std::uint64_t s = 0;
    for (auto c : counts) s += c;
    return s;
  }

  friend bool operator==(const PatternCensus&, const PatternCensus&) = default;
};

inline std::string pattern_string(std::size_t index, unsigned length) {
  std::string s(length, '0');
  for (unsigned k = 0; k < length; ++k)
    if ((index >> (length - 1 - k)) & 1u) s[k] = '2';
  return s;
}

inline std::size_t pattern_index(std::string_view pattern) {
  std::size_t i = 0;
  for (char c : pattern) {
    if (c != '0' && c != '2') throw std::invalid_argument("pattern must be over {0,2}");
    i = (i << 1) | (c == '2');
  }
  return i;
}

namespace detail {

// Window accumulator for lengths 1..W. `code` holds the most recent cell in
// bit 0, so code & (2^l - 1) is the lexicographic index of the length-l
// window ending at the current cell. Cells deep enough into a run feed only
// the full-width table; shorter tables are recovered by marginalizing it.
struct WindowCounter {
  unsigned width;
  std::vector<std::uint64_t> full;                // width-length windows
  std::vector<std::vector<std::uint64_t>> head;   // windows ending within the first width-1 cells of a run

  explicit WindowCounter(unsigned w) : width(w), full(std::size_t{1} << w), head(w + 1) {
    for (unsigned l = 1; l <= w; ++l) head[l].assign(std::size_t{1} << l, 0);
  }

  void push(std::uint32_t run, std::uint32_t code) {
    if (run >= width) {
      ++full[code & ((std::uint32_t{1} << width) - 1)];
    } else {
      for (std::uint32_t l = 1; l <= run; ++l) ++head[l][code & ((std::uint32_t{1} << l) - 1)];
    }
  }

  void merge(const WindowCounter& o) {
    for (std::size_t i = 0; i < full.size(); ++i) full[i] += o.full[i];
    for (unsigned l = 1; l <= width; ++l)
      for (std::size_t i = 0; i < head[l].size(); ++i) head[l][i] += o.head[l][i];
  }

  std::vector<std::uint64_t> finish(unsigned l) const {
    std::vector<std::uint64_t> out = head[l];
    const std::size_t mask = (std::size_t{1} << l) - 1;
    for (std::size_t c = 0; c < full.size(); ++c) out[c & mask] += full[c];
    return out;
  }
};

inline void scan_rows(const EligibilityMask& mask, WindowCounter& wc, unsigned worker,
                      unsigned workers) {
  const DiffTriangle& t = mask.triangle();
  const BTable& b = mask.btable();
  for (std::uint32_t m = 2 + worker; m < t.bound(); m += workers) {
    const std::uint32_t len = t.row_length(m);
    const auto words = t.row_words(m);
    const bool all = m > mask.max_b();
    std::uint32_t run = 0, code = 0;
    for (std::uint32_t n = 2; n <= len; ++n) {
      if (!all) {
        const std::uint32_t bn = b.raw(n);
        if (bn == 0 || m <= bn) {
          run = 0;
          code = 0;
          continue;
        }
      }
      const std::uint32_t i = n - 1;
      const std::uint32_t bit = static_cast<std::uint32_t>((words[i / 64] >> (i % 64)) & 1u);
      code = (code << 1) | bit;
      ++run;
      wc.push(run, code);
    }
  }
}

// Columns are processed in blocks of 64 so that each row contributes one word.
inline void scan_columns(const EligibilityMask& mask, WindowCounter& wc, unsigned worker,
                         unsigned workers) {
  const DiffTriangle& t = mask.triangle();
  const BTable& b = mask.btable();
  const std::uint32_t columns = t.bound() - 1;
  const std::uint32_t blocks = (columns + 63) / 64;
  std::array<std::uint32_t, 64> run{}, code{}, first{}, last{};
  for (std::uint32_t blk = worker; blk < blocks; blk += workers) {
    const std::uint32_t n0 = blk * 64 + 1;
    std::uint32_t deepest = 0;
    for (std::uint32_t j = 0; j < 64; ++j) {
      const std::uint32_t n = n0 + j;
      run[j] = code[j] = 0;
      first[j] = 1;
      last[j] = 0;
      if (n < 2 || n > columns || b.raw(n) == 0) continue;
      first[j] = b.raw(n) + 1;
      last[j] = t.bound() - n;
      deepest = std::max(deepest, last[j]);
    }
    for (std::uint32_t m = 2; m <= deepest; ++m) {
      const std::uint64_t word = t.words()[t.row_offset(m) + blk];
      for (std::uint32_t j = 0; j < 64; ++j) {
        if (m < first[j] || m > last[j]) continue;
        code[j] = (code[j] << 1) | static_cast<std::uint32_t>((word >> j) & 1u);
        wc.push(++run[j], code[j]);
      }
    }
  }
}

}  // namespace detail

/// Censuses for every length 1..max_length in one pass over the region.
inline std::vector<PatternCensus> count_all_patterns(const EligibilityMask& mask,
                                                     unsigned max_length, Orientation orientation,
                                                     unsigned workers = 1) {
  if (max_length < 1 || max_length > kPatternLengthCeiling)
    throw std::invalid_argument("pattern length must be in 1.." +
                                std::to_string(kPatternLengthCeiling));
  workers = std::max(1u, workers);
  std::vector<detail::WindowCounter> partial(workers, detail::WindowCounter(max_length));
  auto job = [&](unsigned w) {
    if (orientation == Orientation::horizontal)
      detail::scan_rows(mask, partial[w], w, workers);
    else
      detail::scan_columns(mask, partial[w], w, workers);
  };
  if (workers == 1) {
    job(0);
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(job, w);
  }
  for (unsigned w = 1; w < workers; ++w) partial[0].merge(partial[w]);

  std::vector<PatternCensus> out;
  for (unsigned l = 1; l <= max_length; ++l)
    out.push_back({l, orientation, partial[0].finish(l)});
  return out;
}

inline PatternCensus count_patterns(const EligibilityMask& mask, unsigned length,
                                    Orientation orientation,
                                    unsigned max_length = kDefaultMaxPatternLength,
                                    unsigned workers = 1) {
  if (length < 1 || length > max_length)
    throw std::invalid_argument("pattern length " + std::to_string(length) + " outside 1.." +
                                std::to_string(max_length));
  return count_all_patterns(mask, length, orientation, workers).back();
}

/// Pattern -> 100 * count / N, rounded to 6 significant figures.
inline std::map<std::string, double> percentages(const PatternCensus& c) {
  const std::uint64_t total = c.total();
  if (total == 0) throw std::invalid_argument("percentages: census is empty");
  std::map<std::string, double> out;
  for (std::size_t i = 0; i < c.counts.size(); ++i)
    out[pattern_string(i, c.length)] =
        round_sig(100.0 * static_cast<double>(c.counts[i]) / static_cast<double>(total), 6);
  return out;
}

}  // namespace gilbreath
