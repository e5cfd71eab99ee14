#include "rtllock/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <ostream>
#include <thread>

#include "json.hpp"
#include "rtllock/benchgen.hpp"
#include "rtllock/error.hpp"
#include "rtllock/verilog.hpp"

namespace rtllock {

namespace {

using json = nlohmann::json;

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4f", v);
  return buf;
}

template <class T>
T get_field(const json& j, const char* key) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw InputError(std::string("config: field '") + key + "' has the wrong type");
  }
}

// Quotes a field that contains a comma or quote (spec strings like counts:add=25,shl=10).
std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"") == std::string::npos) {
    return s;
  }
  std::string out = "\"";
  for (char c : s) {
    out += c;
    if (c == '"') {
      out += '"';
    }
  }
  return out + "\"";
}

}  // namespace

ExperimentConfig ExperimentConfig::from_json(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InputError(std::string("config: invalid JSON: ") + e.what());
  }
  if (!doc.is_object()) {
    throw InputError("config: top level must be an object");
  }
  ExperimentConfig c;
  for (const auto& [key, value] : doc.items()) {
    if (key == "benchmarks") {
      c.benchmarks = get_field<std::vector<std::string>>(doc, "benchmarks");
    } else if (key == "algorithms") {
      c.algorithms.clear();
      for (const std::string& name : get_field<std::vector<std::string>>(doc, "algorithms")) {
        const auto algo = algorithm_from_name(name);
        if (!algo) {
          throw InputError("config: unknown algorithm '" + name + "'");
        }
        c.algorithms.push_back(*algo);
      }
    } else if (key == "budget_percent") {
      c.budget_percent = get_field<double>(doc, "budget_percent");
    } else if (key == "budget_bits") {
      c.budget_bits = get_field<std::size_t>(doc, "budget_bits");
    } else if (key == "test_copies") {
      c.test_copies = get_field<std::size_t>(doc, "test_copies");
    } else if (key == "train_rounds") {
      c.train_rounds = get_field<std::size_t>(doc, "train_rounds");
    } else if (key == "train_bits") {
      c.train_bits = get_field<std::size_t>(doc, "train_bits");
    } else if (key == "seeds") {
      c.seeds = get_field<std::vector<std::uint64_t>>(doc, "seeds");
    } else if (key == "output_dir") {
      c.output_dir = get_field<std::string>(doc, "output_dir");
    } else if (key == "threads") {
      c.threads = get_field<std::size_t>(doc, "threads");
    } else if (key == "min_z") {
      c.classifier.min_z = get_field<double>(doc, "min_z");
    } else {
      throw InputError("config: unknown field '" + key + "'");
    }
  }
  c.validate();
  return c;
}

void ExperimentConfig::validate() const {
  if (benchmarks.empty()) {
    throw InputError("config: no benchmarks");
  }
  if (algorithms.empty()) {
    throw InputError("config: no algorithms");
  }
  if (!budget_bits && !(budget_percent > 0.0 && budget_percent <= 100.0)) {
    throw InputError("config: budget percentage must be in (0, 100]");
  }
  if (test_copies == 0 || train_rounds == 0 || seeds.empty()) {
    throw InputError("config: test copies, train rounds and seeds must be at least 1");
  }
  if (classifier.min_z < 0.0) {
    throw InputError("config: min_z must be non-negative");
  }
}

Design load_benchmark(const std::string& benchmark) {
  std::optional<BenchSpec> spec;
  try {
    spec = parse_bench_spec(benchmark);
  } catch (const InputError& spec_error) {
    if (std::filesystem::exists(benchmark)) {
      return read_verilog_file(benchmark);
    }
    throw InputError("benchmark '" + benchmark + "' is neither a readable file nor a valid spec (" +
                     spec_error.what() + ")");
  }
  return generate(*spec);
}

TrialResult run_trial(const Design& design, std::string_view benchmark, Algorithm algo,
                      std::size_t budget, std::size_t train_rounds, std::size_t train_bits,
                      std::uint64_t trial_seed, const PairTable& pairs, ClassifierOptions classifier) {
  TrialResult r;
  r.benchmark = std::string(benchmark);
  r.algorithm = algo;
  r.trial_seed = trial_seed;
  r.ops = total_ops(design);
  r.budget = budget;

  const LockSession locked = lock(algo, design, budget, trial_seed, pairs);
  const MetricReport m = locked.report();
  r.key_bits = locked.used();
  r.metric_global = m.global;
  r.metric_restricted = m.restricted;

  // The attacker only holds the locked design; training data comes from
  // relocking it with keys of its own.
  ObservationTable table;
  relock_each(locked.design(), train_rounds, train_bits, mix_seed(trial_seed, 1), pairs,
              [&](const Design& d, const Key& k) { train_into(table, d, k, pairs); });
  const AttackReport report =
      predict(table, locked.design(), mix_seed(trial_seed, 2), locked.key(), pairs, classifier);
  r.kpa = report.kpa.value_or(0.0);
  return r;
}

ExperimentResult run_experiment(const ExperimentConfig& config, const PairTable& pairs,
                                const std::function<void(const TrialResult&)>& on_trial) {
  config.validate();
  std::vector<Design> designs;
  designs.reserve(config.benchmarks.size());
  for (const std::string& b : config.benchmarks) {
    designs.push_back(load_benchmark(b));
  }

  struct Job {
    std::size_t bench;
    Algorithm algo;
    std::uint64_t seed;
    std::size_t copy;
  };
  std::vector<Job> jobs;
  for (std::size_t b = 0; b < designs.size(); ++b) {
    for (Algorithm a : config.algorithms) {
      for (std::uint64_t s : config.seeds) {
        for (std::size_t c = 0; c < config.test_copies; ++c) {
          jobs.push_back(Job{b, a, s, c});
        }
      }
    }
  }

  std::vector<std::optional<TrialResult>> results(jobs.size());
  std::vector<std::string> errors(jobs.size());
  std::atomic<std::size_t> next{0};
  std::mutex callback_mutex;

  auto worker = [&]() {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= jobs.size()) {
        return;
      }
      const Job& job = jobs[i];
      const Design& design = designs[job.bench];
      try {
        const std::size_t ops = total_ops(design);
        const std::size_t budget = config.budget_bits.value_or(budget_from_percent(config.budget_percent, ops));
        TrialResult r = run_trial(design, config.benchmarks[job.bench], job.algo, budget, config.train_rounds,
                                  config.train_bits.value_or(budget), mix_seed(job.seed, i), pairs,
                                  config.classifier);
        r.trial = i;
        r.seed = job.seed;
        r.copy = job.copy;
        if (on_trial) {
          std::lock_guard<std::mutex> lock(callback_mutex);
          on_trial(r);
        }
        results[i] = std::move(r);
      } catch (const std::exception& e) {
        errors[i] = "trial " + std::to_string(i) + ": " + e.what();
      }
    }
  };

  std::size_t n_threads = config.threads != 0 ? config.threads : std::thread::hardware_concurrency();
  n_threads = std::clamp<std::size_t>(n_threads, 1, std::max<std::size_t>(1, jobs.size()));
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < n_threads; ++t) {
    pool.emplace_back(worker);
  }
  worker();
  for (std::thread& t : pool) {
    t.join();
  }

  ExperimentResult out;
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    if (results[i]) {
      out.runs.push_back(std::move(*results[i]));
    } else if (!errors[i].empty()) {
      out.errors.push_back(std::move(errors[i]));
    }
  }
  return out;
}

std::vector<SummaryRow> ExperimentResult::summary() const {
  auto fold = [](std::string bench, std::string algo, const std::vector<const TrialResult*>& rs) {
    SummaryRow row{std::move(bench), std::move(algo)};
    row.trials = rs.size();
    if (rs.empty()) {
      return row;
    }
    row.min_kpa = rs.front()->kpa;
    row.max_kpa = rs.front()->kpa;
    for (const TrialResult* r : rs) {
      row.mean_kpa += r->kpa;
      row.min_kpa = std::min(row.min_kpa, r->kpa);
      row.max_kpa = std::max(row.max_kpa, r->kpa);
      row.mean_key_bits += static_cast<double>(r->key_bits);
      row.mean_metric_global += r->metric_global;
      row.mean_metric_restricted += r->metric_restricted;
    }
    const auto n = static_cast<double>(rs.size());
    row.mean_kpa /= n;
    row.mean_key_bits /= n;
    row.mean_metric_global /= n;
    row.mean_metric_restricted /= n;
    return row;
  };

  // Benchmarks and algorithms in order of first appearance (= config order).
  std::vector<std::string> benches;
  std::vector<Algorithm> algos;
  for (const TrialResult& r : runs) {
    if (std::find(benches.begin(), benches.end(), r.benchmark) == benches.end()) {
      benches.push_back(r.benchmark);
    }
    if (std::find(algos.begin(), algos.end(), r.algorithm) == algos.end()) {
      algos.push_back(r.algorithm);
    }
  }

  std::vector<SummaryRow> rows;
  for (const std::string& b : benches) {
    for (Algorithm a : algos) {
      std::vector<const TrialResult*> rs;
      for (const TrialResult& r : runs) {
        if (r.benchmark == b && r.algorithm == a) {
          rs.push_back(&r);
        }
      }
      if (!rs.empty()) {
        rows.push_back(fold(b, std::string(algorithm_name(a)), rs));
      }
    }
  }
  // Grand mean: average of per-benchmark means, each benchmark weighted equally.
  for (Algorithm a : algos) {
    SummaryRow g{"ALL", std::string(algorithm_name(a))};
    std::size_t n = 0;
    for (const SummaryRow& row : rows) {
      if (row.algorithm != g.algorithm) {
        continue;
      }
      g.trials += row.trials;
      g.mean_kpa += row.mean_kpa;
      g.min_kpa = n == 0 ? row.min_kpa : std::min(g.min_kpa, row.min_kpa);
      g.max_kpa = n == 0 ? row.max_kpa : std::max(g.max_kpa, row.max_kpa);
      g.mean_key_bits += row.mean_key_bits;
      g.mean_metric_global += row.mean_metric_global;
      g.mean_metric_restricted += row.mean_metric_restricted;
      ++n;
    }
    const auto dn = static_cast<double>(n);
    g.mean_kpa /= dn;
    g.mean_key_bits /= dn;
    g.mean_metric_global /= dn;
    g.mean_metric_restricted /= dn;
    rows.push_back(g);
  }
  rows.push_back(SummaryRow{"ALL", "random-guess", 0, 50.0, 50.0, 50.0, 0.0, 0.0, 0.0});
  return rows;
}

std::optional<double> ExperimentResult::mean_kpa(std::string_view benchmark, Algorithm algo) const {
  double sum = 0.0;
  std::size_t n = 0;
  for (const TrialResult& r : runs) {
    if (r.benchmark == benchmark && r.algorithm == algo) {
      sum += r.kpa;
      ++n;
    }
  }
  if (n == 0) {
    return std::nullopt;
  }
  return sum / static_cast<double>(n);
}

void ExperimentResult::write_runs_csv(std::ostream& os) const {
  os << kRunsCsvHeader << '\n';
  for (const TrialResult& r : runs) {
    os << r.trial << ',' << csv_field(r.benchmark) << ',' << algorithm_name(r.algorithm) << ',' << r.seed << ','
       << r.copy << ',' << r.trial_seed << ',' << r.ops << ',' << r.budget << ',' << r.key_bits << ','
       << fmt(r.metric_global) << ',' << fmt(r.metric_restricted) << ',' << fmt(r.kpa) << '\n';
  }
}

void ExperimentResult::write_summary_csv(std::ostream& os) const {
  os << kSummaryCsvHeader << '\n';
  for (const SummaryRow& s : summary()) {
    os << csv_field(s.benchmark) << ',' << s.algorithm << ',' << s.trials << ',' << fmt(s.mean_kpa) << ','
       << fmt(s.min_kpa) << ',' << fmt(s.max_kpa) << ',' << fmt(s.mean_key_bits) << ','
       << fmt(s.mean_metric_global) << ',' << fmt(s.mean_metric_restricted) << '\n';
  }
}

void write_experiment_outputs(const ExperimentResult& result, const std::string& output_dir) {
  std::error_code ec;
  std::filesystem::create_directories(output_dir, ec);
  if (ec) {
    throw InputError("cannot create output directory '" + output_dir + "': " + ec.message());
  }
  const auto dir = std::filesystem::path(output_dir);
  std::ofstream runs(dir / "runs.csv");
  std::ofstream summary(dir / "summary.csv");
  if (!runs || !summary) {
    throw InputError("cannot write results under '" + output_dir + "'");
  }
  result.write_runs_csv(runs);
  result.write_summary_csv(summary);
}

}  // namespace rtllock
