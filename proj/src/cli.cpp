#include "rtllock/cli.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "rtllock/attack.hpp"
#include "rtllock/benchgen.hpp"
#include "rtllock/error.hpp"
#include "rtllock/experiment.hpp"
#include "rtllock/locking.hpp"
#include "rtllock/odt.hpp"
#include "rtllock/pair_table.hpp"
#include "rtllock/verilog.hpp"

namespace rtllock {

namespace {

// A broken internal guarantee (exit code 3).
class InvariantViolation : public Error {
 public:
  using Error::Error;
};

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw InputError("cannot read '" + path + "'");
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string trim(std::string s) {
  const auto not_space = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  return s;
}

std::string fixed2(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) {
      out.push_back(item);
    }
  }
  return out;
}

struct Options {
  std::string pairs_path;

  // bench-gen
  std::string spec;
  // shared paths
  std::string input;
  std::string output;
  std::string key_out;
  std::string trace_out;
  // lock
  std::string algo = "hra";
  double budget_percent = 75.0;
  std::optional<std::size_t> budget_bits;
  std::uint64_t seed = 1;
  // metric
  std::string original;
  std::string trace_in;
  // unlock
  std::string key_in;
  // attack
  std::string config_path;
  std::vector<std::string> benchmarks;
  std::string algorithms;
  std::optional<double> attack_budget;
  std::optional<std::size_t> attack_budget_bits;
  std::optional<std::size_t> copies;
  std::optional<std::size_t> train_rounds;
  std::optional<std::size_t> train_bits;
  std::string seeds;
  std::string out_dir;
  std::optional<std::size_t> threads;
  std::optional<double> min_z;
  bool paper_scale = false;
};

PairTable resolve_pairs(const Options& o) {
  return o.pairs_path.empty() ? PairTable::defaults() : load_pair_table(o.pairs_path);
}

int cmd_bench_gen(const Options& o, std::ostream& out, std::ostream& err) {
  Design d;
  try {
    d = generate(parse_bench_spec(o.spec));
  } catch (const InputError& e) {
    err << "usage: " << e.what() << '\n';
    return kExitUsage;
  }
  write_text_file(o.output, emit_verilog(d));
  out << "wrote " << o.output << " (" << total_ops(d) << " operations)\n";
  return kExitOk;
}

int cmd_lock(const Options& o, std::ostream& out) {
  const PairTable pairs = resolve_pairs(o);
  const auto algo = algorithm_from_name(o.algo);
  if (!algo) {
    throw InputError("unknown algorithm '" + o.algo + "'");
  }
  const Design original = read_verilog_file(o.input);
  if (original.key_length != 0) {
    throw InputError("'" + o.input + "' is already locked");
  }
  if (!o.budget_bits && !(o.budget_percent >= 0.0 && o.budget_percent <= 100.0)) {
    throw InputError("budget percentage must be in [0, 100]");
  }
  const std::size_t budget = o.budget_bits.value_or(budget_from_percent(o.budget_percent, total_ops(original)));

  const LockSession s = lock(*algo, original, budget, o.seed, pairs);
  if (!structural_equal(apply_key(s.design(), s.key()), original)) {
    throw InvariantViolation("locked design does not unlock to the original");
  }

  write_text_file(o.output, emit_verilog(s.design()));
  write_text_file(o.key_out.empty() ? o.output + ".key" : o.key_out, s.key().to_hex() + "\n");
  std::ostringstream trace;
  s.write_trace_csv(trace);
  write_text_file(o.trace_out.empty() ? o.output + ".trace.csv" : o.trace_out, trace.str());

  for (const std::string& w : s.warnings()) {
    out << "warning: " << w << '\n';
  }
  if (s.used() > budget) {
    out << "budget exceeded: used " << s.used() << '\n';
  }
  const MetricReport m = s.report();
  out << "key bits: " << s.used() << " (budget " << budget << ")\n";
  out << "metric global: " << fixed2(m.global) << '\n';
  out << "metric restricted: " << fixed2(m.restricted) << '\n';
  return kExitOk;
}

// Re-emits a lock trace with cumulative key bits and checks that its final
// metric agrees with the locked design.
void replay_trace(const std::string& path, double final_global, std::ostream& os) {
  std::istringstream in(read_text(path));
  std::string line;
  if (!std::getline(in, line) || trim(line) != "step,pair,P,bits,metric_global") {
    throw InputError("'" + path + "' is not a lock trace");
  }
  os << "step,pair,P,bits_total,metric_global\n";
  std::size_t total = 0;
  std::optional<double> last;
  while (std::getline(in, line)) {
    line = trim(line);
    if (line.empty()) {
      continue;
    }
    const std::vector<std::string> f = split_list(line);
    if (f.size() != 5) {
      throw InputError("malformed trace line: " + line);
    }
    try {
      total += std::stoul(f[3]);
      last = std::stod(f[4]);
    } catch (const std::exception&) {
      throw InputError("malformed trace line: " + line);
    }
    os << f[0] << ',' << f[1] << ',' << f[2] << ',' << total << ',' << f[4] << '\n';
  }
  if (last && std::fabs(*last - final_global) > 1e-3) {
    throw InvariantViolation("trace ends at metric " + fixed2(*last) + " but the design scores " +
                             fixed2(final_global));
  }
}

int cmd_metric(const Options& o, std::ostream& out) {
  const PairTable pairs = resolve_pairs(o);
  const Design locked = read_verilog_file(o.input);
  const Design original = read_verilog_file(o.original);
  const MetricReport m = metric(original, locked, pairs);
  out << m.to_json() << '\n';
  if (!o.trace_in.empty()) {
    if (o.trace_out.empty()) {
      replay_trace(o.trace_in, m.global, out);
    } else {
      std::ostringstream csv;
      replay_trace(o.trace_in, m.global, csv);
      write_text_file(o.trace_out, csv.str());
    }
  }
  return kExitOk;
}

int cmd_unlock(const Options& o, std::ostream& out) {
  const Design locked = read_verilog_file(o.input);
  const Key key = Key::from_hex(trim(read_text(o.key_in)), locked.key_length);
  write_text_file(o.output, emit_verilog(apply_key(locked, key)));
  out << "wrote " << o.output << '\n';
  return kExitOk;
}

int cmd_validate_pairs(const Options& o, std::ostream& out) {
  const PairingSpec spec = parse_pairing_json(read_text(o.input));
  const std::vector<PairingFinding> findings = check_pairing(spec);
  if (findings.empty()) {
    out << "no leakage\n";
    return kExitOk;
  }
  for (const PairingFinding& f : findings) {
    const char* kind = "";
    switch (f.issue) {
      case PairingIssue::SelfPair: kind = "self-pair"; break;
      case PairingIssue::Unpaired: kind = "unpaired"; break;
      case PairingIssue::Leak: kind = "leakage"; break;
      case PairingIssue::DuplicateCode: kind = "duplicate-code"; break;
      case PairingIssue::InvalidCode: kind = "invalid-code"; break;
    }
    out << kind << ": " << f.message << '\n';
  }
  return kExitInput;
}

int cmd_attack(const Options& o, std::ostream& out, std::ostream& err) {
  const PairTable pairs = resolve_pairs(o);
  ExperimentConfig c;
  if (!o.config_path.empty()) {
    c = ExperimentConfig::from_json(read_text(o.config_path));
  }
  if (!o.benchmarks.empty()) {
    c.benchmarks = o.benchmarks;
  }
  if (!o.algorithms.empty()) {
    c.algorithms.clear();
    for (const std::string& name : split_list(o.algorithms)) {
      const auto a = algorithm_from_name(name);
      if (!a) {
        throw InputError("unknown algorithm '" + name + "'");
      }
      c.algorithms.push_back(*a);
    }
  }
  if (o.attack_budget) {
    c.budget_percent = *o.attack_budget;
    c.budget_bits.reset();
  }
  if (o.attack_budget_bits) {
    c.budget_bits = o.attack_budget_bits;
  }
  if (o.paper_scale) {
    c.train_rounds = 1000;
  }
  if (o.train_rounds) {
    c.train_rounds = *o.train_rounds;
  }
  if (o.copies) {
    c.test_copies = *o.copies;
  }
  if (o.train_bits) {
    c.train_bits = o.train_bits;
  }
  if (!o.seeds.empty()) {
    c.seeds.clear();
    for (const std::string& s : split_list(o.seeds)) {
      try {
        c.seeds.push_back(std::stoull(s));
      } catch (const std::exception&) {
        throw InputError("seed '" + s + "' is not an integer");
      }
    }
  }
  if (o.threads) {
    c.threads = *o.threads;
  }
  if (o.min_z) {
    c.classifier.min_z = *o.min_z;
  }
  if (!o.out_dir.empty()) {
    c.output_dir = o.out_dir;
  }
  if (c.output_dir.empty()) {
    const char* env = std::getenv("RTLLOCK_OUT_DIR");
    c.output_dir = env != nullptr && *env != '\0' ? env : "results";
  }
  c.validate();

  const ExperimentResult result = run_experiment(c, pairs);
  write_experiment_outputs(result, c.output_dir);

  out << std::left << std::setw(28) << "benchmark" << std::setw(16) << "algorithm" << std::right
      << std::setw(8) << "trials" << std::setw(10) << "mean_kpa" << '\n';
  for (const SummaryRow& r : result.summary()) {
    out << std::left << std::setw(28) << r.benchmark << std::setw(16) << r.algorithm << std::right
        << std::setw(8) << r.trials << std::setw(10) << fixed2(r.mean_kpa) << '\n';
  }
  out << "results in " << c.output_dir << '\n';
  for (const std::string& e : result.errors) {
    err << "error: " << e << '\n';
  }
  return result.errors.empty() ? kExitOk : kExitInput;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Operation locking for RTL designs with learning-resilience balancing", "rtllock"};
  app.require_subcommand(1);
  Options o;
  app.add_option("--pairs", o.pairs_path, "Locking-pair override file (JSON)");

  auto* gen = app.add_subcommand("bench-gen", "Generate a synthetic benchmark");
  gen->add_option("spec", o.spec, "imbalanced:add:2046, balanced:add-sub:1023, random:500[:seed[:mix]], counts:add=25,shl=10")
      ->required();
  gen->add_option("-o,--out", o.output, "Output .v file")->required();

  auto* lk = app.add_subcommand("lock", "Lock a design");
  lk->add_option("input", o.input, "Input .v file")->required();
  lk->add_option("--algo", o.algo, "assure-serial | assure-random | hra | era")
      ->check(CLI::IsMember({"assure-serial", "assure-random", "hra", "era"}))
      ->capture_default_str();
  auto* pct = lk->add_option("--budget", o.budget_percent, "Key budget in percent of operations")
                  ->capture_default_str();
  lk->add_option("--budget-bits", o.budget_bits, "Key budget in bits")->excludes(pct);
  lk->add_option("--seed", o.seed, "Random seed")->capture_default_str();
  lk->add_option("-o,--out", o.output, "Locked .v file")->required();
  lk->add_option("--key-out", o.key_out, "Key file (hex, MSB first); default <out>.key");
  lk->add_option("--trace-out", o.trace_out, "Trace CSV; default <out>.trace.csv");

  auto* met = app.add_subcommand("metric", "Security metric of a locked design");
  met->add_option("input", o.input, "Locked .v file")->required();
  met->add_option("--original", o.original, "Unlocked original .v file")->required();
  met->add_option("--trace", o.trace_in, "Lock trace to replay as per-step CSV");
  met->add_option("--trace-out", o.trace_out, "Write the replayed trace here instead of stdout");

  auto* atk = app.add_subcommand("attack", "Run the relocking attack experiment");
  atk->add_option("--config", o.config_path, "Experiment config (JSON)");
  atk->add_option("--benchmark", o.benchmarks, "Bench spec or .v path (repeatable)");
  atk->add_option("--algorithms", o.algorithms, "Comma-separated algorithm list");
  atk->add_option("--budget", o.attack_budget, "Key budget in percent of operations");
  atk->add_option("--budget-bits", o.attack_budget_bits, "Key budget in bits");
  atk->add_option("--copies", o.copies, "Locked test copies per benchmark and algorithm");
  atk->add_option("--train-rounds", o.train_rounds, "Relocking rounds per test copy");
  atk->add_option("--train-bits", o.train_bits, "Key bits per relocking round (default: budget)");
  atk->add_option("--seeds", o.seeds, "Comma-separated seeds");
  atk->add_option("--out-dir", o.out_dir, "Output directory (default $RTLLOCK_OUT_DIR or ./results)");
  atk->add_option("--threads", o.threads, "Worker threads (0 = all cores)");
  atk->add_option("--min-z", o.min_z, "Classifier significance threshold");
  atk->add_flag("--paper-scale", o.paper_scale, "Use 1000 relocking rounds");

  auto* val = app.add_subcommand("validate-pairs", "Check a locking-pair table for leakage");
  val->add_option("file", o.input, "Pair table (JSON)")->required();

  auto* unl = app.add_subcommand("unlock", "Apply a key to a locked design");
  unl->add_option("input", o.input, "Locked .v file")->required();
  unl->add_option("--key", o.key_in, "Key file (hex)")->required();
  unl->add_option("-o,--out", o.output, "Output .v file")->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (gen->parsed()) {
      return cmd_bench_gen(o, out, err);
    }
    if (lk->parsed()) {
      return cmd_lock(o, out);
    }
    if (met->parsed()) {
      return cmd_metric(o, out);
    }
    if (atk->parsed()) {
      return cmd_attack(o, out, err);
    }
    if (val->parsed()) {
      return cmd_validate_pairs(o, out);
    }
    if (unl->parsed()) {
      return cmd_unlock(o, out);
    }
  } catch (const InvariantViolation& e) {
    err << "invariant violation: " << e.what() << '\n';
    return kExitInvariant;
  } catch (const InputError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << '\n';
    return kExitInput;
  } catch (const DesignError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const LockError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return kExitInvariant;
  }
  return kExitUsage;
}

}  // namespace rtllock
