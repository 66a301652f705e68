#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "gilbreath/bfunc.hpp"
#include "gilbreath/census.hpp"
#include "gilbreath/format.hpp"
#include "gilbreath/primes.hpp"
#include "gilbreath/stats.hpp"
#include "gilbreath/triangle.hpp"

namespace gilbreath {

inline constexpr std::uint32_t kDefaultMaxN = 30050;
/// Keeps the packed triangle under ~650 MB.
inline constexpr std::uint32_t kMaxBound = 100000;
inline constexpr const char* kCacheEnv = "GILBREATH_CACHE";

enum class OutputFormat { csv, json };

struct ConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::uint32_t bound = kDefaultBound;
  std::uint32_t max_n = kDefaultMaxN;
  unsigned max_length = kDefaultMaxPatternLength;
  std::filesystem::path out_dir = ".";
  std::optional<std::filesystem::path> cache_dir;
  unsigned workers = 1;
  OutputFormat format = OutputFormat::csv;
  TailCut tail = TailCut::three_sigma;

  void validate_bound() const {
    if (bound < 3) throw ConfigError("bound must be >= 3");
    if (bound > kMaxBound)
      throw ConfigError("bound " + std::to_string(bound) + " exceeds the in-memory limit " +
                        std::to_string(kMaxBound));
  }

  void validate() const {
    validate_bound();
    if (max_n < 2 || max_n > bound - 2)
      throw ConfigError("max-n must be in 2..bound-2 (" + std::to_string(bound - 2) + ")");
    if (max_length < 1 || max_length > kPatternLengthCeiling)
      throw ConfigError("lmax must be in 1.." + std::to_string(kPatternLengthCeiling));
    if (workers < 1) throw ConfigError("workers must be >= 1");
  }
};

/// Cache directory from the environment, if set and non-empty.
inline std::optional<std::filesystem::path> default_cache_dir() {
  const char* v = std::getenv(kCacheEnv);
  if (v == nullptr || *v == '\0') return std::nullopt;
  return std::filesystem::path(v);
}

/// Primes and triangle for a bound, loaded from / stored to the cache when configured.
struct Region {
  PrimeTable primes;
  DiffTriangle triangle;
  BTable b;
};

inline Region load_region(const RunConfig& cfg) {
  Region r;
  const std::size_t k = cfg.bound - 1;
  namespace fs = std::filesystem;
  if (!cfg.cache_dir) {
    r.primes = first_k_primes(k);
    r.triangle = build(r.primes, cfg.bound);
    r.b = compute_b(r.triangle);
    return r;
  }

  std::error_code ec;
  fs::create_directories(*cfg.cache_dir, ec);
  if (ec) throw IoError("cannot create cache directory " + cfg.cache_dir->string());
  const fs::path prime_file = *cfg.cache_dir / ("primes_k" + std::to_string(k) + ".txt");
  const fs::path snap_file = *cfg.cache_dir / ("triangle_S" + std::to_string(cfg.bound) + ".gilb");

  if (std::ifstream in{prime_file}) {
    r.primes = read_prime_cache(in);
  } else {
    r.primes = first_k_primes(k);
    std::ofstream out(prime_file);
    write_prime_cache(out, r.primes);
    if (!out) throw IoError("cannot write " + prime_file.string());
  }
  if (std::ifstream in{snap_file, std::ios::binary}) {
    r.triangle = read_snapshot(in, r.primes);
  } else {
    r.triangle = build(r.primes, cfg.bound);
    std::ofstream out(snap_file, std::ios::binary);
    write_snapshot(out, r.triangle);
    if (!out) throw IoError("cannot write " + snap_file.string());
  }
  r.b = compute_b(r.triangle);
  return r;
}

/// Shape statistics for the B distributions, keyed as written to moments.json.
struct BShape {
  std::map<std::int64_t, std::uint64_t> histogram;
  BDiffs diffs;
  std::uint32_t max_b = 0;
  MomentSummary values;         // frequency profile over 1..max_b
  MomentSummary differences;    // frequency profile over -(max_b-1)..(max_b-1)
  MomentSummary central;        // frequency profile over -25..25
  MomentSummary values_weighted;
  MomentSummary differences_weighted;
};

inline constexpr std::int64_t kCentralDiffRange = 25;

inline BShape b_shape(const BTable& b, std::uint32_t max_n) {
  BShape s;
  s.histogram = b_histogram(b, max_n);
  s.diffs = b_diffs(b, max_n);
  s.max_b = max_b(b, max_n);
  const std::int64_t top = s.max_b;
  auto guarded = [](auto&& f) -> MomentSummary {
    try {
      return f();
    } catch (const std::invalid_argument&) {
      return {};
    }
  };
  s.values = guarded([&] { return frequency_moments(s.histogram, 1, top); });
  s.differences = guarded([&] { return frequency_moments(s.diffs.counts, 1 - top, top - 1); });
  s.central = guarded([&] {
    return frequency_moments(s.diffs.counts, -kCentralDiffRange, kCentralDiffRange);
  });
  s.values_weighted = guarded([&] { return moments(s.histogram); });
  s.differences_weighted = guarded([&] { return moments(s.diffs.counts); });
  return s;
}

/// Everything the report verbs emit.
struct Analysis {
  std::vector<PatternCensus> horizontal;
  std::vector<PatternCensus> vertical;
  EligibleTotals eligible;
  ChiSquareReport chi;
};

inline Analysis analyze(const Region& r, const RunConfig& cfg) {
  EligibilityMask mask(r.triangle, r.b);
  Analysis a;
  a.eligible = eligible_totals(mask);
  a.horizontal = count_all_patterns(mask, cfg.max_length, Orientation::horizontal, cfg.workers);
  a.vertical = count_all_patterns(mask, cfg.max_length, Orientation::vertical, cfg.workers);
  a.chi = full_report(a.horizontal, a.vertical, cfg.tail);
  return a;
}

// ---------------------------------------------------------------------------
// Tabular output: each table is a header plus string cells, rendered as CSV
// or as a JSON array of objects.

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

inline std::string render_csv(const Table& t) {
  std::ostringstream os;
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) os << (i ? "," : "") << cells[i];
    os << '\n';
  };
  line(t.header);
  for (const auto& r : t.rows) line(r);
  return os.str();
}

inline std::string render_json(const Table& t) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& r : t.rows) {
    nlohmann::ordered_json obj = nlohmann::ordered_json::object();
    for (std::size_t i = 0; i < t.header.size(); ++i) obj[t.header[i]] = i < r.size() ? r[i] : "";
    arr.push_back(std::move(obj));
  }
  return arr.dump(2) + "\n";
}

inline void write_file(const std::filesystem::path& p, const std::string& content) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw IoError("cannot open " + p.string() + " for writing");
  out << content;
  if (!out) throw IoError("write failed: " + p.string());
}

inline void write_table(const RunConfig& cfg, const std::string& stem, const Table& t) {
  if (cfg.format == OutputFormat::csv)
    write_file(cfg.out_dir / (stem + ".csv"), render_csv(t));
  else
    write_file(cfg.out_dir / (stem + ".json"), render_json(t));
}

inline void ensure_out_dir(const RunConfig& cfg) {
  std::error_code ec;
  std::filesystem::create_directories(cfg.out_dir, ec);
  if (ec || !std::filesystem::is_directory(cfg.out_dir))
    throw IoError("cannot create output directory " + cfg.out_dir.string());
}

inline constexpr std::uint32_t kCornerRows = 70;
inline constexpr std::uint32_t kCornerColumns = 23;

/// d(m,n) for m <= 70, n <= 23; cells outside the region are left empty.
inline Table corner_table(const DiffTriangle& t) {
  Table out;
  for (std::uint32_t n = 1; n <= kCornerColumns; ++n) out.header.push_back(std::to_string(n));
  for (std::uint32_t m = 1; m <= kCornerRows && m < t.bound(); ++m) {
    std::vector<std::string> row;
    for (std::uint32_t n = 1; n <= kCornerColumns; ++n)
      row.push_back(t.contains(m, n) ? std::to_string(t.element(m, n)) : "");
    out.rows.push_back(std::move(row));
  }
  return out;
}

inline Table b_table(const BTable& b) {
  Table out{{"n", "B"}, {}};
  for (std::uint32_t n = 1; n <= b.columns(); ++n) {
    auto v = b.at(n);
    out.rows.push_back({std::to_string(n), v ? std::to_string(*v) : ""});
  }
  return out;
}

inline Table histogram_table(const std::map<std::int64_t, std::uint64_t>& h, std::int64_t lo,
                             std::int64_t hi, const std::string& key) {
  Table out{{key, "count"}, {}};
  for (std::int64_t k = lo; k <= hi; ++k) {
    auto it = h.find(k);
    out.rows.push_back({std::to_string(k), std::to_string(it == h.end() ? 0 : it->second)});
  }
  return out;
}

inline Table census_table(const PatternCensus& c) {
  Table out{{"pattern", "count", "percentage"}, {}};
  const double total = static_cast<double>(c.total());
  for (std::size_t i = 0; i < c.counts.size(); ++i) {
    const std::string pct =
        total > 0 ? format_sig(100.0 * static_cast<double>(c.counts[i]) / total, 6) : "";
    out.rows.push_back({pattern_string(i, c.length), std::to_string(c.counts[i]), pct});
  }
  return out;
}

inline std::string orientation_label(const DeviationSummary& s) {
  return s.orientation ? std::string(to_string(*s.orientation)) : "";
}

inline Table spread_table(const ChiSquareReport& r) {
  Table out{{"l", "orientation", "N", "sigma", "sigma_expected", "ratio"}, {}};
  for (const auto& s : r.rows)
    out.rows.push_back({std::to_string(s.length), orientation_label(s), std::to_string(s.total),
                        format_sig(s.sigma_observed, 6), format_sig(s.sigma_expected, 6),
                        format_sig(s.ratio(), 5)});
  return out;
}

inline Table bins_table(const ChiSquareReport& r) {
  Table out{{"l", "orientation", "below_-2", "-2_to_-1", "-1_to_0", "0_to_1", "1_to_2", "from_2"},
            {}};
  for (const auto& s : r.rows) {
    std::vector<std::string> row{std::to_string(s.length), orientation_label(s)};
    for (auto b : s.bins) row.push_back(std::to_string(b));
    out.rows.push_back(std::move(row));
  }
  return out;
}

inline Table chi_table(const ChiSquareReport& r) {
  Table out{{"l", "orientation", "chi2", "p_value"}, {}};
  for (const auto& s : r.rows)
    out.rows.push_back({std::to_string(s.length), orientation_label(s), format_sig(s.chi2, 6),
                        format_sig(s.p_value, 5)});
  out.rows.push_back(
      {"total", "", format_sig(r.total_chi2, 6), format_sig(r.total_p_value, 5)});
  return out;
}

inline nlohmann::ordered_json moment_json(const MomentSummary& m) {
  return {{"count", m.count},
          {"mean", m.mean},
          {"variance", m.variance},
          {"gamma1", m.gamma1},
          {"gamma2", m.gamma2}};
}

inline nlohmann::ordered_json moments_json(const BShape& s, std::uint32_t max_n) {
  const std::int64_t top = s.max_b;
  nlohmann::ordered_json j;
  j["max_n"] = max_n;
  j["max_b"] = s.max_b;
  j["b_values"] = moment_json(s.values);
  j["b_values"]["range"] = {1, top};
  j["b_diffs"] = moment_json(s.differences);
  j["b_diffs"]["range"] = {1 - top, top - 1};
  j["b_diffs_central"] = moment_json(s.central);
  j["b_diffs_central"]["range"] = {-kCentralDiffRange, kCentralDiffRange};
  j["b_values_weighted"] = moment_json(s.values_weighted);
  j["b_diffs_weighted"] = moment_json(s.differences_weighted);
  j["consecutive"] = {{"less", s.diffs.less}, {"equal", s.diffs.equal}, {"greater", s.diffs.greater}};
  return j;
}

inline void write_b_outputs(const RunConfig& cfg, const Region& r) {
  const BShape s = b_shape(r.b, cfg.max_n);
  const std::int64_t top = s.max_b;
  write_table(cfg, "bn", b_table(r.b));
  write_table(cfg, "b_hist", histogram_table(s.histogram, 1, top, "value"));
  write_table(cfg, "b_diffs", histogram_table(s.diffs.counts, 1 - top, top - 1, "difference"));
  write_file(cfg.out_dir / "moments.json", moments_json(s, cfg.max_n).dump(2) + "\n");
}

inline void write_census_outputs(const RunConfig& cfg, const Analysis& a) {
  for (const auto* side : {&a.horizontal, &a.vertical})
    for (const auto& c : *side)
      write_table(cfg,
                  "census_l" + std::to_string(c.length) + "_" + std::string(to_string(c.orientation)),
                  census_table(c));
  write_table(cfg, "stats_table15", spread_table(a.chi));
  write_table(cfg, "bins_table16", bins_table(a.chi));
  write_table(cfg, "chi2_table17", chi_table(a.chi));
}

inline void write_report(const RunConfig& cfg, const Region& r, const Analysis& a) {
  ensure_out_dir(cfg);
  write_table(cfg, "table1", corner_table(r.triangle));
  write_b_outputs(cfg, r);
  write_census_outputs(cfg, a);
}

}  // namespace gilbreath
