#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "gilbreath/census.hpp"

namespace gilbreath {

/// Degrees of freedom for one cumulative-bin test and for the pooled total.
inline constexpr int kTestDegreesOfFreedom = 5;
inline constexpr int kTotalDegreesOfFreedom = 55;

/// Cut points, in units of the expected deviation, for the cumulative tallies.
inline constexpr std::array<int, 5> kDeviationCuts = {-2, -1, 0, 1, 2};

/// Standard normal CDF.
inline double phi(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

namespace detail {

// Regularized lower gamma P(a,x) by series; valid for x < a + 1.
inline double gamma_p_series(double a, double x) {
  double term = 1.0 / a, sum = term;
  for (int k = 1; k < 1000; ++k) {
    term *= x / (a + k);
    sum += term;
    if (std::abs(term) < std::abs(sum) * 1e-17) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Regularized upper gamma Q(a,x) by modified Lentz continued fraction; x >= a + 1.
inline double gamma_q_fraction(double a, double x) {
  constexpr double tiny = 1e-300;
  double b = x + 1.0 - a, c = 1.0 / tiny, d = 1.0 / b, h = d;
  for (int i = 1; i < 1000; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < 1e-17) break;
  }
  return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

}  // namespace detail

/// Regularized upper incomplete gamma Q(a, x) = Gamma(a, x) / Gamma(a).
inline double gamma_q(double a, double x) {
  if (a <= 0 || x < 0) throw std::invalid_argument("gamma_q: need a > 0, x >= 0");
  if (x == 0) return 1.0;
  if (x < a + 1.0) return 1.0 - detail::gamma_p_series(a, x);
  return detail::gamma_q_fraction(a, x);
}

/// Upper-tail probability of a chi-squared variate with `df` degrees of freedom.
inline double chi2_p_value(double chi2, int df) {
  if (df < 1) throw std::invalid_argument("chi2_p_value: df must be >= 1");
  if (chi2 < 0) throw std::invalid_argument("chi2_p_value: statistic must be >= 0");
  return gamma_q(0.5 * df, 0.5 * chi2);
}

inline double pattern_count(unsigned length) { return std::ldexp(1.0, static_cast<int>(length)); }

/// E[n] = N / 2^l.
inline double expected_frequency(unsigned length, std::uint64_t total) {
  return static_cast<double>(total) / pattern_count(length);
}

/// Binomial spread of one pattern frequency: 2^-l sqrt((2^l - 1) N).
inline double sigma_expected(unsigned length, std::uint64_t total) {
  const double k = pattern_count(length);
  return std::sqrt((k - 1.0) * static_cast<double>(total)) / k;
}

/// Bessel-corrected standard deviation of the observed frequencies.
inline double sigma_observed(std::span<const std::uint64_t> counts) {
  if (counts.size() < 2) throw std::invalid_argument("sigma_observed: need at least two counts");
  double mean = 0;
  for (auto c : counts) mean += static_cast<double>(c);
  mean /= static_cast<double>(counts.size());
  double ss = 0;
  for (auto c : counts) {
    const double d = static_cast<double>(c) - mean;
    ss += d * d;
  }
  return std::sqrt(ss / static_cast<double>(counts.size() - 1));
}

/// O_j = #{ c : c < E + j sigma' } for each cut j.
inline std::array<std::uint64_t, 5> cumulative_tallies(std::span<const std::uint64_t> counts,
                                                       double expected, double sigma) {
  std::array<std::uint64_t, 5> o{};
  for (auto c : counts) {
    const double dev = static_cast<double>(c) - expected;
    for (std::size_t j = 0; j < kDeviationCuts.size(); ++j)
      if (dev < kDeviationCuts[j] * sigma) ++o[j];
  }
  return o;
}

/// Six-way split of the frequencies by deviation from E, in units of sigma':
/// (-inf,-2), [-2,-1), [-1,0), [0,1), [1,2), [2,inf).
inline std::array<std::uint64_t, 6> deviation_bins(std::span<const std::uint64_t> counts,
                                                   double expected, double sigma) {
  if (!(sigma > 0)) throw std::invalid_argument("deviation_bins: sigma must be positive");
  const auto o = cumulative_tallies(counts, expected, sigma);
  std::array<std::uint64_t, 6> bins{};
  bins[0] = o[0];
  for (std::size_t j = 1; j < o.size(); ++j) bins[j] = o[j] - o[j - 1];
  bins[5] = counts.size() - o[4];
  return bins;
}

/// Where the last cumulative term of the chi-squared sum is evaluated.
enum class TailCut {
  three_sigma,  // O_3 against K Phi(3); reproduces the published statistics
  infinity,     // O_inf = K against K
};

/**
 * Cumulative chi-squared with continuity correction,
 *   sum over j in {-2,-1,0,1,2,top} of (|O_j - K Phi(j)| - 0.5)^2 / (K Phi(j)),
 * K = 2^l. The top cut is j = 3 or j -> inf (O = K, Phi = 1) per `tail`.
 * The corrected term is squared as is, even when |O_j - K Phi(j)| < 0.5.
 */
inline double chi_square_yates(std::span<const std::uint64_t> counts, unsigned length,
                               std::uint64_t total, TailCut tail = TailCut::three_sigma) {
  if (total == 0) throw std::invalid_argument("chi_square_yates: N must be positive");
  const double k = pattern_count(length);
  const auto o = cumulative_tallies(counts, expected_frequency(length, total),
                                    sigma_expected(length, total));
  auto term = [](double observed, double expected) {
    const double d = std::abs(observed - expected) - 0.5;
    return d * d / expected;
  };
  double chi2 = 0;
  for (std::size_t j = 0; j < kDeviationCuts.size(); ++j)
    chi2 += term(static_cast<double>(o[j]), k * phi(kDeviationCuts[j]));
  if (tail == TailCut::infinity) {
    chi2 += term(k, k);
  } else {
    const double expected = expected_frequency(length, total);
    const double sigma = sigma_expected(length, total);
    std::uint64_t below = 0;
    for (auto c : counts)
      if (static_cast<double>(c) - expected < 3 * sigma) ++below;
    chi2 += term(static_cast<double>(below), k * phi(3));
  }
  return chi2;
}

struct DeviationSummary {
  unsigned length = 0;
  std::optional<Orientation> orientation;  // empty for l = 1, where both coincide
  std::uint64_t total = 0;
  double expected = 0;
  double sigma_expected = 0;
  double sigma_observed = 0;
  std::array<std::uint64_t, 6> bins{};
  double chi2 = 0;
  double p_value = 0;

  double ratio() const { return sigma_observed / sigma_expected; }
};

struct ChiSquareReport {
  std::vector<DeviationSummary> rows;
  double total_chi2 = 0;
  double total_p_value = 0;
};

inline DeviationSummary summarize(const PatternCensus& c, std::optional<Orientation> orientation,
                                  TailCut tail = TailCut::three_sigma) {
  DeviationSummary s;
  s.length = c.length;
  s.orientation = orientation;
  s.total = c.total();
  s.expected = expected_frequency(c.length, s.total);
  s.sigma_expected = sigma_expected(c.length, s.total);
  s.sigma_observed = sigma_observed(c.counts);
  s.bins = deviation_bins(c.counts, s.expected, s.sigma_expected);
  s.chi2 = chi_square_yates(c.counts, c.length, s.total, tail);
  s.p_value = chi2_p_value(s.chi2, kTestDegreesOfFreedom);
  return s;
}

/**
 * One row for l = 1 (orientation-free), then horizontal and vertical rows for
 * each l = 2..L. The pooled statistic is the plain sum of all rows, tested at
 * 11 x 5 = 55 degrees of freedom for the standard six-length layout.
 */
inline ChiSquareReport full_report(const std::vector<PatternCensus>& horizontal,
                                   const std::vector<PatternCensus>& vertical,
                                   TailCut tail = TailCut::three_sigma) {
  if (horizontal.empty() || horizontal.size() != vertical.size())
    throw std::invalid_argument("full_report: need matching horizontal and vertical censuses");
  ChiSquareReport r;
  r.rows.push_back(summarize(horizontal[0], std::nullopt, tail));
  for (std::size_t i = 1; i < horizontal.size(); ++i) {
    r.rows.push_back(summarize(horizontal[i], Orientation::horizontal, tail));
    r.rows.push_back(summarize(vertical[i], Orientation::vertical, tail));
  }
  for (const auto& row : r.rows) r.total_chi2 += row.chi2;
  r.total_p_value =
      chi2_p_value(r.total_chi2, kTestDegreesOfFreedom * static_cast<int>(r.rows.size()));
  return r;
}

}  // namespace gilbreath
