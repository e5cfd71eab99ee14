#include "doctest.h"

#include <sstream>

#include "rtllock/error.hpp"
#include "rtllock/experiment.hpp"

using namespace rtllock;

namespace {

ExperimentConfig small_config() {
  ExperimentConfig c;
  c.benchmarks = {"imbalanced:add:64", "random:60:2"};
  c.algorithms = {Algorithm::AssureSerial, Algorithm::Era};
  c.test_copies = 3;
  c.train_rounds = 10;
  c.seeds = {1, 2};
  return c;
}

std::string runs_csv(const ExperimentResult& r) {
  std::ostringstream os;
  r.write_runs_csv(os);
  return os.str();
}

}  // namespace

TEST_CASE("results do not depend on the thread count") {
  ExperimentConfig one = small_config();
  one.threads = 1;
  ExperimentConfig many = small_config();
  many.threads = 4;
  const ExperimentResult a = run_experiment(one);
  const ExperimentResult b = run_experiment(many);
  CHECK(a.errors.empty());
  CHECK(a.runs.size() == 2 * 2 * 2 * 3);
  CHECK(runs_csv(a) == runs_csv(b));
  for (std::size_t i = 0; i < a.runs.size(); ++i) {
    CHECK(a.runs[i].trial == i);
  }
}

TEST_CASE("summary has per-benchmark rows, grand means and the random-guess row") {
  const ExperimentResult r = run_experiment(small_config());
  const auto rows = r.summary();
  REQUIRE(rows.size() == 4 + 2 + 1);
  CHECK(rows[0].benchmark == "imbalanced:add:64");
  CHECK(rows[0].algorithm == "assure-serial");
  CHECK(rows[0].trials == 6);
  CHECK(rows[4].benchmark == "ALL");
  CHECK(rows[4].mean_kpa == doctest::Approx((rows[0].mean_kpa + rows[2].mean_kpa) / 2));
  CHECK(rows.back().algorithm == "random-guess");
  CHECK(rows.back().mean_kpa == 50.0);
  CHECK(r.mean_kpa("imbalanced:add:64", Algorithm::Era).has_value());
  CHECK_FALSE(r.mean_kpa("imbalanced:add:64", Algorithm::Hra).has_value());

  std::ostringstream os;
  r.write_summary_csv(os);
  CHECK(os.str().rfind(std::string(kSummaryCsvHeader) + "\n", 0) == 0);
  CHECK(os.str().find("ALL,random-guess,0,50.0000") != std::string::npos);
}

TEST_CASE("ERA trials always reach a restricted metric of 100") {
  const ExperimentResult r = run_experiment(small_config());
  for (const TrialResult& t : r.runs) {
    if (t.algorithm == Algorithm::Era) {
      CHECK(t.metric_restricted == 100.0);
    }
    CHECK(t.kpa >= 0.0);
    CHECK(t.kpa <= 100.0);
  }
}

TEST_CASE("failed trials are reported without stopping the rest") {
  ExperimentConfig c = small_config();
  c.benchmarks = {"imbalanced:add:16"};
  c.budget_bits = 0;  // nothing to attack; still valid
  const ExperimentResult r = run_experiment(c);
  CHECK(r.errors.empty());
  for (const TrialResult& t : r.runs) {
    CHECK(t.key_bits == 0);
    CHECK(t.kpa == 100.0);
  }
  c.benchmarks = {"/nonexistent/file.v"};
  CHECK_THROWS_AS(run_experiment(c), InputError);
}

TEST_CASE("config JSON") {
  const ExperimentConfig c = ExperimentConfig::from_json(R"({
    "benchmarks": ["balanced:add-sub:8"],
    "algorithms": ["hra", "era"],
    "budget_percent": 50,
    "test_copies": 2,
    "train_rounds": 5,
    "seeds": [3, 4],
    "output_dir": "out",
    "min_z": 2.0
  })");
  CHECK(c.algorithms.size() == 2);
  CHECK(c.budget_percent == 50.0);
  CHECK(c.seeds == std::vector<std::uint64_t>{3, 4});
  CHECK(c.classifier.min_z == 2.0);

  CHECK_THROWS_AS(ExperimentConfig::from_json(R"({"benchmarks": ["x"], "colour": 1})"), InputError);
  CHECK_THROWS_AS(ExperimentConfig::from_json(R"({"benchmarks": ["x"], "algorithms": ["sat"]})"), InputError);
  CHECK_THROWS_AS(ExperimentConfig::from_json(R"({"benchmarks": ["x"], "budget_percent": 0})"), InputError);
  CHECK_THROWS_AS(ExperimentConfig::from_json(R"({"benchmarks": ["x"], "test_copies": "ten"})"), InputError);
  CHECK_THROWS_AS(ExperimentConfig::from_json(R"({"benchmarks": []})"), InputError);
  CHECK_THROWS_AS(ExperimentConfig::from_json("[1]"), InputError);
}

TEST_CASE("benchmark labels with commas are quoted in CSV") {
  ExperimentConfig c;
  c.benchmarks = {"counts:add=6,shl=2"};
  c.algorithms = {Algorithm::Hra};
  c.test_copies = 1;
  c.train_rounds = 2;
  const std::string csv = runs_csv(run_experiment(c));
  CHECK(csv.find("\"counts:add=6,shl=2\"") != std::string::npos);
}
