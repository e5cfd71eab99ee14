#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rtllock/attack.hpp"
#include "rtllock/locking.hpp"

namespace rtllock {

struct ExperimentConfig {
  /// Bench spec strings (see parse_bench_spec) or Verilog file paths.
  std::vector<std::string> benchmarks;
  std::vector<Algorithm> algorithms{Algorithm::AssureSerial, Algorithm::AssureRandom, Algorithm::Hra,
                                    Algorithm::Era};
  /// Key budget as a percentage of the benchmark's operations, unless
  /// budget_bits is set.
  double budget_percent = 75.0;
  std::optional<std::size_t> budget_bits;
  std::size_t test_copies = 10;
  std::size_t train_rounds = 100;
  /// Bits per relocking round; defaults to the test budget.
  std::optional<std::size_t> train_bits;
  std::vector<std::uint64_t> seeds{1};
  std::string output_dir;
  /// 0 = hardware concurrency.
  std::size_t threads = 0;
  ClassifierOptions classifier;

  /// Throws InputError on unknown fields, wrong types or invariant violations.
  static ExperimentConfig from_json(std::string_view text);
  void validate() const;
};

/// Fixed-header CSV for runs.csv.
inline constexpr std::string_view kRunsCsvHeader =
    "trial,benchmark,algorithm,seed,copy,trial_seed,ops,budget,key_bits,metric_global,metric_restricted,kpa";
inline constexpr std::string_view kSummaryCsvHeader =
    "benchmark,algorithm,trials,mean_kpa,min_kpa,max_kpa,mean_key_bits,mean_metric_global,mean_metric_restricted";

struct TrialResult {
  std::size_t trial = 0;
  std::string benchmark;
  Algorithm algorithm = Algorithm::Era;
  std::uint64_t seed = 0;
  std::size_t copy = 0;
  std::uint64_t trial_seed = 0;
  std::size_t ops = 0;
  std::size_t budget = 0;
  std::size_t key_bits = 0;
  double metric_global = 0.0;
  double metric_restricted = 0.0;
  double kpa = 0.0;
};

struct SummaryRow {
  std::string benchmark;  // "ALL" for grand means
  std::string algorithm;
  std::size_t trials = 0;
  double mean_kpa = 0.0;
  double min_kpa = 0.0;
  double max_kpa = 0.0;
  double mean_key_bits = 0.0;
  double mean_metric_global = 0.0;
  double mean_metric_restricted = 0.0;
};

struct ExperimentResult {
  std::vector<TrialResult> runs;       // trial-index order, successful trials only
  std::vector<std::string> errors;     // "trial N: message"

  /// Per (benchmark, algorithm) in config order, then the grand mean per
  /// algorithm, then the random-guess baseline row.
  std::vector<SummaryRow> summary() const;
  std::optional<double> mean_kpa(std::string_view benchmark, Algorithm algo) const;

  void write_runs_csv(std::ostream& os) const;
  void write_summary_csv(std::ostream& os) const;
};

/// Runs one locked-copy attack trial: lock with the algorithm, relock the
/// locked design train_rounds times, train, predict, score.
TrialResult run_trial(const Design& design, std::string_view benchmark, Algorithm algo,
                      std::size_t budget, std::size_t train_rounds, std::size_t train_bits,
                      std::uint64_t trial_seed, const PairTable& pairs, ClassifierOptions classifier);

/// Loads a benchmark by spec string, falling back to a Verilog file path.
Design load_benchmark(const std::string& benchmark);

/// Fans trials out over a thread pool. Seeds are derived from the trial index
/// so results do not depend on scheduling. Failed trials are listed in
/// `errors`; the remaining trials still complete.
ExperimentResult run_experiment(const ExperimentConfig& config,
                                const PairTable& pairs = PairTable::defaults(),
                                const std::function<void(const TrialResult&)>& on_trial = {});

/// Writes runs.csv and summary.csv under config.output_dir (created if needed).
void write_experiment_outputs(const ExperimentResult& result, const std::string& output_dir);

}  // namespace rtllock
