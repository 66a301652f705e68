// Command-line front end: builds the difference triangle over the primes and
// writes the B(n), census and goodness-of-fit tables.

#include <algorithm>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "gilbreath/report.hpp"

namespace {

enum ExitCode : int { kOk = 0, kCounterexample = 1, kBadConfig = 2, kIoFailure = 3 };

struct Options {
  gilbreath::RunConfig cfg;
  std::string format = "csv";
  std::string cache;
  std::string tail = "three-sigma";
  bool max_n_given = false;
};

void add_common(CLI::App* cmd, Options& o) {
  cmd->add_option("--bound", o.cfg.bound, "region bound S (m + n <= S)");
  cmd->add_option_function<std::uint32_t>(
      "--max-n",
      [&o](std::uint32_t v) {
        o.cfg.max_n = v;
        o.max_n_given = true;
      },
      "last column n for the B(n) tallies");
  cmd->add_option("--lmax", o.cfg.max_length, "longest pattern length");
  cmd->add_option("--out", o.cfg.out_dir, "output directory");
  cmd->add_option("--cache", o.cache, "cache directory (default: $GILBREATH_CACHE)");
  cmd->add_option("--workers", o.cfg.workers, "census worker threads");
  cmd->add_option("--format", o.format, "table format")->check(CLI::IsMember({"csv", "json"}));
  cmd->add_option("--tail", o.tail, "top cut of the cumulative chi-squared")
      ->check(CLI::IsMember({"three-sigma", "infinity"}));
}

void finalize(Options& o) {
  if (!o.max_n_given)
    o.cfg.max_n = std::min<std::uint32_t>(gilbreath::kDefaultMaxN,
                                          o.cfg.bound >= 4 ? o.cfg.bound - 2 : 2);
  o.cfg.format = o.format == "json" ? gilbreath::OutputFormat::json : gilbreath::OutputFormat::csv;
  o.cfg.tail = o.tail == "infinity" ? gilbreath::TailCut::infinity : gilbreath::TailCut::three_sigma;
  if (!o.cache.empty())
    o.cfg.cache_dir = o.cache;
  else
    o.cfg.cache_dir = gilbreath::default_cache_dir();
}

int run_verify(const gilbreath::RunConfig& cfg) {
  cfg.validate_bound();
  const auto region = gilbreath::load_region(cfg);
  const auto check = gilbreath::verify_gilbreath(region.triangle);
  const auto row = gilbreath::max_exception_row(region.triangle);
  if (!check.holds) {
    std::cout << "gilbreath: FAILED, d(" << *check.counterexample_row << ",1) != 1\n";
    return kCounterexample;
  }
  std::cout << "gilbreath: OK, max exception row " << row << '\n';
  return kOk;
}

int run_primes(const gilbreath::RunConfig& cfg, std::size_t count, const std::string& file) {
  if (count == 0) {
    cfg.validate_bound();
    count = cfg.bound - 1;
  }
  const auto table = gilbreath::first_k_primes(count);
  if (file.empty()) {
    gilbreath::write_prime_cache(std::cout, table);
    return kOk;
  }
  std::ofstream out(file);
  gilbreath::write_prime_cache(out, table);
  if (!out) throw gilbreath::IoError("cannot write " + file);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gilbreath prime-difference triangle: B(n), {0,2}-pattern census, chi-squared"};
  app.require_subcommand(1);
  Options o;

  auto* verify = app.add_subcommand("verify", "check d(m,1) = 1 and report the last row with a value > 2");
  auto* bn = app.add_subcommand("bn", "write bn, b_hist, b_diffs tables and moments.json");
  auto* census = app.add_subcommand("census", "write pattern censuses and the goodness-of-fit tables");
  auto* report = app.add_subcommand("report", "write every table");
  auto* primes = app.add_subcommand("primes", "print the first k primes in cache format");
  for (auto* cmd : {verify, bn, census, report, primes}) add_common(cmd, o);
  std::size_t prime_count = 0;
  std::string prime_file;
  primes->add_option("--count", prime_count, "number of primes (default bound - 1)");
  primes->add_option("--file", prime_file, "write to this file instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kBadConfig;
  }
  finalize(o);

  try {
    if (verify->parsed()) return run_verify(o.cfg);
    if (primes->parsed()) return run_primes(o.cfg, prime_count, prime_file);

    o.cfg.validate();
    gilbreath::ensure_out_dir(o.cfg);
    const auto region = gilbreath::load_region(o.cfg);
    if (bn->parsed()) {
      gilbreath::write_b_outputs(o.cfg, region);
    } else {
      const auto analysis = gilbreath::analyze(region, o.cfg);
      if (census->parsed())
        gilbreath::write_census_outputs(o.cfg, analysis);
      else
        gilbreath::write_report(o.cfg, region, analysis);
    }
    return kOk;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kBadConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kIoFailure;
  }
}
