#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "gilbreath/primes.hpp"

namespace gilbreath {

/// The region bound used for the published census: m + n <= 30151.
inline constexpr std::uint32_t kDefaultBound = 30151;

/// An entry of the triangle whose value is not 0 or 2.
struct Exception {
  std::uint32_t m = 0;
  std::uint32_t n = 0;
  std::uint32_t value = 0;

  friend bool operator==(const Exception&, const Exception&) = default;
};

struct GilbreathCheck {
  bool holds = true;
  std::optional<std::uint32_t> counterexample_row;
};

/**
 * The finite region m + n <= S of the iterated absolute-difference triangle
 * over the primes.
 *
 * Row 1 is kept as integers. Every row m >= 2 is stored as a bit-plane
 * (bit n-1 set iff d(m,n) == 2), each row starting on a 64-bit word
 * boundary. Entries that are neither 0 nor 2 (including the whole first
 * column below row 1) have a clear bit and an entry in a sorted exception
 * list keyed by (m, n).
 */
class DiffTriangle {
 public:
  DiffTriangle() = default;

  std::uint32_t bound() const noexcept { return bound_; }
  /// Number of rows; row m holds columns 1..S-m.
  std::uint32_t rows() const noexcept { return bound_ - 1; }
  std::uint32_t row_length(std::uint32_t m) const noexcept { return bound_ - m; }

  std::uint64_t element_count() const noexcept {
    return std::uint64_t{bound_} * (bound_ - 1) / 2;
  }

  bool contains(std::uint32_t m, std::uint32_t n) const noexcept {
    return m >= 1 && n >= 1 && std::uint64_t{m} + n <= bound_;
  }

  std::uint32_t element(std::uint32_t m, std::uint32_t n) const {
    if (!contains(m, n))
      throw std::out_of_range("d(" + std::to_string(m) + "," + std::to_string(n) +
                              ") outside m+n <= " + std::to_string(bound_));
    if (m == 1) return first_row_[n - 1];
    if (auto e = find_exception(m, n)) return e->value;
    return bit(m, n) ? 2u : 0u;
  }

  /// Raw bit for a row m >= 2: true iff the stored entry is 2.
  bool bit(std::uint32_t m, std::uint32_t n) const noexcept {
    const std::size_t i = n - 1;
    return (bits_[row_offset_[m] + i / 64] >> (i % 64)) & 1u;
  }

  /// Packed words of row m >= 2; bit (n-1) of the sequence is column n.
  std::span<const std::uint64_t> row_words(std::uint32_t m) const noexcept {
    return {bits_.data() + row_offset_[m], row_offset_[m + 1] - row_offset_[m]};
  }

  std::size_t row_offset(std::uint32_t m) const noexcept { return row_offset_[m]; }
  std::span<const std::uint64_t> words() const noexcept { return bits_; }

  std::span<const std::uint32_t> first_row() const noexcept { return first_row_; }
  std::span<const Exception> exceptions() const noexcept { return exceptions_; }

  std::optional<Exception> find_exception(std::uint32_t m, std::uint32_t n) const noexcept {
    auto it = std::lower_bound(exceptions_.begin(), exceptions_.end(), Exception{m, n, 0},
                               [](const Exception& a, const Exception& b) {
                                 return a.m != b.m ? a.m < b.m : a.n < b.n;
                               });
    if (it != exceptions_.end() && it->m == m && it->n == n) return *it;
    return std::nullopt;
  }

  friend DiffTriangle build(const PrimeTable& primes, std::uint32_t bound);
  friend DiffTriangle read_snapshot(std::istream& is, const PrimeTable& primes);

  friend bool operator==(const DiffTriangle&, const DiffTriangle&) = default;

 private:
  void allocate(std::uint32_t bound, const PrimeTable& primes) {
    if (bound < 3) throw std::invalid_argument("triangle bound must be >= 3");
    if (primes.limit() < bound - 1)
      throw std::invalid_argument("triangle bound " + std::to_string(bound) + " needs " +
                                  std::to_string(bound - 1) + " primes, got " +
                                  std::to_string(primes.limit()));
    bound_ = bound;
    first_row_.assign(primes.values().begin(), primes.values().begin() + (bound - 1));
    row_offset_.assign(bound + 1, 0);
    std::size_t off = 0;
    for (std::uint32_t m = 2; m <= bound; ++m) {
      row_offset_[m] = off;
      if (m < bound) off += (row_length(m) + 63) / 64;
    }
    row_offset_[bound] = off;
    bits_.assign(off, 0);
    exceptions_.clear();
  }

  std::uint32_t bound_ = 0;
  std::vector<std::uint32_t> first_row_;
  std::vector<std::size_t> row_offset_;  // indexed by m; rows 2..S-1 valid, [S] = end
  std::vector<std::uint64_t> bits_;
  std::vector<Exception> exceptions_;
};

/**
 * Builds the triangle row by row.
 *
 * Rows are differenced as integers while they still contain values other
 * than 0 or 2 beyond the first column. Once a row is two-valued for n >= 2
 * with d(m,1) == 1, every later row follows from the previous bit-plane as
 * b(m+1,n) = b(m,n) xor b(m,n+1), and d(m+1,1) = |1 - d(m,2)| = 1.
 */
inline DiffTriangle build(const PrimeTable& primes, std::uint32_t bound) {
  DiffTriangle t;
  t.allocate(bound, primes);

  std::vector<std::uint32_t> cur(t.first_row_.begin(), t.first_row_.end());
  std::uint32_t m = 2;
  for (; m < bound; ++m) {
    const std::uint32_t len = t.row_length(m);
    std::uint64_t* row = t.bits_.data() + t.row_offset_[m];
    bool clean = true;
    for (std::uint32_t i = 0; i < len; ++i) {
      const std::uint32_t a = cur[i], b = cur[i + 1];
      const std::uint32_t v = a > b ? a - b : b - a;
      cur[i] = v;
      if (v == 2) {
        row[i / 64] |= std::uint64_t{1} << (i % 64);
      } else if (v != 0) {
        t.exceptions_.push_back({m, i + 1, v});
        if (i != 0 || v != 1) clean = false;
      }
    }
    cur.resize(len);
    if (clean) {
      ++m;
      break;
    }
  }

  // Two-valued regime: shift-xor on whole words, bit 0 (column 1) masked off.
  for (; m < bound; ++m) {
    const std::uint32_t len = t.row_length(m);
    const std::uint64_t* prev = t.bits_.data() + t.row_offset_[m - 1];
    const std::size_t prev_words = t.row_offset_[m] - t.row_offset_[m - 1];
    std::uint64_t* row = t.bits_.data() + t.row_offset_[m];
    const std::size_t words = (len + 63) / 64;
    for (std::size_t w = 0; w < words; ++w) {
      const std::uint64_t next = w + 1 < prev_words ? prev[w + 1] : 0;
      row[w] = prev[w] ^ ((prev[w] >> 1) | (next << 63));
    }
    row[0] &= ~std::uint64_t{1};
    if (len % 64) row[words - 1] &= (std::uint64_t{1} << (len % 64)) - 1;
    t.exceptions_.push_back({m, 1, 1});
  }
  return t;
}

inline DiffTriangle build(std::uint32_t bound) { return build(first_k_primes(bound - 1), bound); }

/// Checks d(m,1) == 1 for 2 <= m <= S-1.
inline GilbreathCheck verify_gilbreath(const DiffTriangle& t) {
  for (std::uint32_t m = 2; m < t.bound(); ++m)
    if (t.element(m, 1) != 1) return {false, m};
  return {};
}

/// Largest m with some d(m,n) > 2 for n >= 2 (row 1 always qualifies).
inline std::uint32_t max_exception_row(const DiffTriangle& t) {
  std::uint32_t best = 0;
  for (std::uint32_t n = 2; n < t.bound(); ++n)
    if (t.first_row()[n - 1] > 2) {
      best = 1;
      break;
    }
  for (const auto& e : t.exceptions())
    if (e.n >= 2 && e.value > 2) best = std::max(best, e.m);
  return best;
}

// Snapshot layout:
//   "GILB1 <S>\n"
//   rows m = 2..S-1: ceil((S-m)/8) bytes, bit (n-1) at byte (n-1)/8, bit (n-1)%8
//   "EXC <count>\n" then count triples (m, n, value) as little-endian uint32
inline void write_snapshot(std::ostream& os, const DiffTriangle& t) {
  os << "GILB1 " << t.bound() << '\n';
  std::vector<char> buf;
  for (std::uint32_t m = 2; m < t.bound(); ++m) {
    const auto words = t.row_words(m);
    const std::size_t nbytes = (t.row_length(m) + 7) / 8;
    buf.assign(nbytes, 0);
    for (std::size_t j = 0; j < nbytes; ++j)
      buf[j] = static_cast<char>((words[j / 8] >> (8 * (j % 8))) & 0xff);
    os.write(buf.data(), static_cast<std::streamsize>(nbytes));
  }
  os << "EXC " << t.exceptions().size() << '\n';
  for (const auto& e : t.exceptions()) {
    for (std::uint32_t v : {e.m, e.n, e.value}) {
      const char le[4] = {static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff),
                          static_cast<char>((v >> 16) & 0xff),
                          static_cast<char>((v >> 24) & 0xff)};
      os.write(le, 4);
    }
  }
}

inline DiffTriangle read_snapshot(std::istream& is, const PrimeTable& primes) {
  std::string magic;
  std::uint64_t bound = 0;
  if (!(is >> magic >> bound) || magic != "GILB1" || is.get() != '\n')
    throw std::runtime_error("snapshot: bad header");
  if (bound < 3 || bound > std::uint64_t{1} << 31) throw std::runtime_error("snapshot: bad bound");

  DiffTriangle t;
  t.allocate(static_cast<std::uint32_t>(bound), primes);
  std::vector<unsigned char> buf;
  for (std::uint32_t m = 2; m < t.bound(); ++m) {
    const std::size_t nbytes = (t.row_length(m) + 7) / 8;
    buf.resize(nbytes);
    if (!is.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(nbytes)))
      throw std::runtime_error("snapshot: truncated row " + std::to_string(m));
    std::uint64_t* row = t.bits_.data() + t.row_offset_[m];
    for (std::size_t j = 0; j < nbytes; ++j) row[j / 8] |= std::uint64_t{buf[j]} << (8 * (j % 8));
  }
  std::string tag;
  std::uint64_t count = 0;
  if (!(is >> tag >> count) || tag != "EXC" || is.get() != '\n')
    throw std::runtime_error("snapshot: bad exception header");
  t.exceptions_.reserve(count);
  unsigned char le[12];
  for (std::uint64_t k = 0; k < count; ++k) {
    if (!is.read(reinterpret_cast<char*>(le), 12)) throw std::runtime_error("snapshot: truncated");
    auto u32 = [&](int o) {
      return std::uint32_t{le[o]} | std::uint32_t{le[o + 1]} << 8 | std::uint32_t{le[o + 2]} << 16 |
             std::uint32_t{le[o + 3]} << 24;
    };
    Exception e{u32(0), u32(4), u32(8)};
    if (!t.contains(e.m, e.n) || e.m < 2) throw std::runtime_error("snapshot: exception out of region");
    if (!t.exceptions_.empty()) {
      const auto& b = t.exceptions_.back();
      if (b.m > e.m || (b.m == e.m && b.n >= e.n))
        throw std::runtime_error("snapshot: exceptions not sorted");
    }
    t.exceptions_.push_back(e);
  }
  return t;
}

}  // namespace gilbreath
