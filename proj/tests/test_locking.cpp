#include "doctest.h"

#include <cmath>
#include <cstdlib>
#include <deque>
#include <map>
#include <sstream>

#include "rtllock/benchgen.hpp"
#include "rtllock/error.hpp"
#include "rtllock/locking.hpp"
#include "rtllock/verilog.hpp"

using namespace rtllock;

namespace {

const PairTable& pt() { return PairTable::defaults(); }

Design bench(const std::string& spec) { return generate(parse_bench_spec(spec)); }

std::int64_t odt_of(const LockSession& s, OpType t) { return s.odt().at(t, s.pairs()); }

bool unlocks_to(const LockSession& s, const Design& original) {
  return structural_equal(apply_key(s.design(), s.key()), original);
}

// Minimal number of single insertions that balances a pair starting from
// counts (a, b), found by breadth-first search over count states. An insertion
// adds one operation of the partner type of an existing operation. Returns the
// balanced count reached.
std::size_t bfs_balanced_count(std::size_t a, std::size_t b) {
  if (a == b) {
    return a;
  }
  std::deque<std::pair<std::size_t, std::size_t>> frontier{{a, b}};
  std::map<std::pair<std::size_t, std::size_t>, bool> seen{{{a, b}, true}};
  std::optional<std::size_t> found;
  while (!frontier.empty() && !found) {
    std::deque<std::pair<std::size_t, std::size_t>> next;
    for (const auto& [x, y] : frontier) {
      std::vector<std::pair<std::size_t, std::size_t>> moves;
      if (x > 0) moves.emplace_back(x, y + 1);
      if (y > 0) moves.emplace_back(x + 1, y);
      for (const auto& m : moves) {
        if (m.first == m.second) {
          // Every shortest path ends on the same state; record it once.
          if (found) {
            REQUIRE(*found == m.first);
          }
          found = m.first;
        }
        if (!seen[m] && m.first <= 32 && m.second <= 32) {
          seen[m] = true;
          next.push_back(m);
        }
      }
    }
    frontier = std::move(next);
  }
  REQUIRE(found.has_value());
  return *found;
}

}  // namespace

TEST_CASE("lock_step single case decrements the imbalance") {
  LockSession s(bench("counts:add=2"), 10, 1);
  REQUIRE(odt_of(s, OpType::Add) == 2);
  CHECK(s.lock_step(OpType::Add, false) == 1);
  CHECK(odt_of(s, OpType::Add) == 1);
  CHECK(count_ops(s.design(), OpType::Sub) == 1);
  CHECK(s.used() == 1);
  CHECK(s.design().key_length == 1);
  CHECK(s.trace().size() == 1);
  CHECK_FALSE(s.trace()[0].pair_mode);
  CHECK(s.odt().affected[pt().pair_index(OpType::Add)] == 1);
}

TEST_CASE("lock_step on a negative entry wraps the partner") {
  LockSession s(bench("counts:sub=3"), 10, 1);
  CHECK(odt_of(s, OpType::Add) == -3);
  CHECK(s.lock_step(OpType::Add, false) == 1);
  CHECK(odt_of(s, OpType::Add) == -2);
  CHECK(count_ops(s.design(), OpType::Add) == 1);
}

TEST_CASE("lock_step on a balanced entry inserts both dummies") {
  LockSession s(bench("counts:add=1,sub=1"), 10, 1);
  CHECK(s.lock_step(OpType::Add, false) == 2);
  CHECK(odt_of(s, OpType::Add) == 0);
  CHECK(count_ops(s.design(), OpType::Add) == 2);
  CHECK(count_ops(s.design(), OpType::Sub) == 2);
}

TEST_CASE("pair mode always inserts two dummies") {
  LockSession s(bench("counts:add=3,sub=1"), 10, 1);
  CHECK(s.lock_step(OpType::Add, true) == 2);
  CHECK(odt_of(s, OpType::Add) == 2);
  CHECK(s.trace().back().pair_mode);
}

TEST_CASE("lock_step without an eligible operation names the type") {
  LockSession s(bench("counts:add=2"), 10, 1);
  try {
    s.lock_step(OpType::Shl, false);
    FAIL("expected LockError");
  } catch (const LockError& e) {
    CHECK(std::string(e.what()).find("shl") != std::string::npos);
  }
  CHECK_THROWS_AS(s.lock_step(OpType::Add, true), LockError);  // no sub
  CHECK(s.used() == 0);
  CHECK_FALSE(s.can_lock_step(OpType::Add, true));
  CHECK(s.can_lock_step(OpType::Add, false));
}

TEST_CASE("undo restores the design, key, ODT and trace") {
  const Design original = bench("random:20:3");
  LockSession s(original, 100, 9);
  s.lock_step(OpType::Add, false);
  const std::string before = emit_verilog(s.design());
  const auto odt_before = s.odt().entries;
  const auto affected_before = s.odt().affected;
  const std::size_t used_before = s.used();

  for (OpType t : {OpType::Add, OpType::Mul, OpType::Shl}) {
    for (bool pair_mode : {false, true}) {
      if (!s.can_lock_step(t, pair_mode)) {
        continue;
      }
      s.lock_step(t, pair_mode);
      s.undo_last_step();
      CHECK(emit_verilog(s.design()) == before);
      CHECK(s.odt().entries == odt_before);
      CHECK(s.odt().affected == affected_before);
      CHECK(s.used() == used_before);
      CHECK(s.trace().size() == 1);
    }
  }
  s.undo_last_step();
  CHECK(structural_equal(s.design(), original));
  CHECK_THROWS_AS(s.undo_last_step(), LockError);
}

TEST_CASE("lock_step conservation over random steps") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const Design original = bench("random:40:" + std::to_string(seed));
    LockSession s(original, 1000, seed);
    Rng rng(seed * 7);
    for (int step = 0; step < 60; ++step) {
      const LockingPair pair = s.pairs().pairs()[rng.below(s.pairs().pair_count())];
      const OpType t = rng.coin() ? pair.first : pair.second;
      const bool pair_mode = rng.coin();
      if (!s.can_lock_step(t, pair_mode)) {
        continue;
      }
      const std::int64_t before = std::llabs(odt_of(s, t));
      const std::size_t used = s.used();
      const std::size_t bits = s.lock_step(t, pair_mode);
      const std::int64_t after = std::llabs(odt_of(s, t));
      CHECK(s.used() == used + bits);
      if (bits == 1) {
        CHECK(after == before - 1);
      } else {
        CHECK(bits == 2);
        CHECK(after == before);
      }
      // ODT stays in sync with a fresh count.
      CHECK(build_odt(s.design()).entries == s.odt().entries);
    }
    CHECK(unlocks_to(s, original));
    CHECK(s.trace().size() <= s.used());
  }
}

TEST_CASE("ERA overshoots the budget to balance a pair") {
  const LockSession s = lock_era(bench("counts:add=2"), 1, 5);
  CHECK(s.used() == 2);
  CHECK(odt_of(s, OpType::Add) == 0);
  CHECK(s.report().restricted == 100.0);
}

TEST_CASE("ERA on the fully imbalanced network uses exactly 2046 bits") {
  const Design n2046 = bench("imbalanced:add:2046");
  for (std::size_t budget : {std::size_t{1535}, std::size_t{2046}}) {
    const LockSession s = lock_era(n2046, budget, 3);
    CHECK(s.used() == 2046);
    CHECK(count_ops(s.design(), OpType::Sub) == 2046);
    CHECK(is_learning_resilient(s.design()));
  }
}

TEST_CASE("ERA on a balanced design spends bits in pair mode") {
  const LockSession s = lock_era(bench("balanced:add-sub:16"), 4, 2);
  CHECK(s.used() == 4);
  for (const TraceEntry& e : s.trace()) {
    CHECK(e.pair_mode);
  }
  CHECK(s.report().restricted == 100.0);
  CHECK(s.report().global == 100.0);
}

TEST_CASE("ERA rejects designs without operations") {
  const Design d = parse_verilog("module m(a, y); input a; output y; assign y = a; endmodule");
  CHECK_THROWS_AS(lock_era(d, 1, 1), LockError);
  CHECK(lock_era(d, 0, 1).used() == 0);
}

TEST_CASE("ERA final counts match the exhaustive balancing oracle") {
  const std::vector<std::string> mixes = {"add=1,sub=1,shl=1,xor=1", "add=3,sub=1,lt=1,ge=1", "mul=2,div=1,and=1"};
  int checked = 0;
  for (const std::string& mix : mixes) {
    for (std::uint64_t seed = 1; seed <= 15; ++seed) {
      const Design original = bench("random:" + std::to_string(3 + seed % 6) + ":" + std::to_string(seed) + ":" + mix);
      REQUIRE(total_ops(original) <= 8);
      const std::size_t budget = 1 + seed % 5;
      const LockSession s = lock_era(original, budget, seed);
      const auto before = op_histogram(original);
      const auto after = op_histogram(s.design());
      std::vector<std::size_t> pair_steps(pt().pair_count(), 0);
      for (const TraceEntry& e : s.trace()) {
        pair_steps[e.pair] += e.pair_mode ? 1 : 0;
      }
      for (std::size_t p = 0; p < pt().pair_count(); ++p) {
        const LockingPair pair = pt().pairs()[p];
        const std::size_t a0 = before[index_of(pair.first)];
        const std::size_t b0 = before[index_of(pair.second)];
        const std::size_t a1 = after[index_of(pair.first)];
        const std::size_t b1 = after[index_of(pair.second)];
        if (s.odt().affected[p] == 0) {
          CHECK(a1 == a0);
          CHECK(b1 == b0);
          continue;
        }
        CHECK(a1 == b1);
        CHECK(a1 - pair_steps[p] == bfs_balanced_count(a0, b0));
        ++checked;
      }
    }
  }
  CHECK(checked > 30);
}

TEST_CASE("greedy HRA on the 25/10 setup follows steepest ascent to 100 in 35 bits") {
  const Design d = bench("counts:add=25,shl=10");
  const LockSession s = lock_hra(d, 35, 4, pt(), HraOptions{true});
  REQUIRE(s.used() == 35);
  REQUIRE(s.trace().size() == 35);
  CHECK(s.report().global == 100.0);

  // Replay with an independent metric: at each step the committed pair must
  // be one whose decrement gives the highest global metric.
  double x = 25.0;
  double y = 10.0;
  const double d0 = std::sqrt(x * x + y * y);
  const std::size_t add_pair = pt().pair_index(OpType::Add);
  double previous = 0.0;
  for (const TraceEntry& e : s.trace()) {
    CHECK_FALSE(e.pair_mode);
    CHECK(e.bits == 1);
    const double via_add = x > 0 ? 100.0 * (1.0 - std::sqrt((x - 1) * (x - 1) + y * y) / d0) : -1.0;
    const double via_shl = y > 0 ? 100.0 * (1.0 - std::sqrt(x * x + (y - 1) * (y - 1)) / d0) : -1.0;
    const double best = std::max(via_add, via_shl);
    if (e.pair == add_pair) {
      CHECK(via_add == doctest::Approx(best));
      x -= 1;
    } else {
      CHECK(via_shl == doctest::Approx(best));
      y -= 1;
    }
    CHECK(e.metric_global == doctest::Approx(best));
    CHECK(e.metric_global >= previous);
    previous = e.metric_global;
  }
  CHECK(x == 0.0);
  CHECK(y == 0.0);
  CHECK(s.trace()[33].metric_global < 100.0);
}

TEST_CASE("HRA with budget 0 leaves the design alone") {
  const Design d = bench("random:30:2");
  const LockSession s = lock_hra(d, 0, 1);
  CHECK(s.key().empty());
  CHECK(structural_equal(s.design(), d));
}

TEST_CASE("HRA on N_2046 at 75% stops at the budget") {
  const Design n2046 = bench("imbalanced:add:2046");
  const std::size_t budget = budget_from_percent(75, 2046);
  CHECK(budget == 1535);
  const LockSession greedy = lock_hra(n2046, budget, 6, pt(), HraOptions{true});
  CHECK(greedy.used() == 1535);
  CHECK(odt_of(greedy, OpType::Add) == 511);
  CHECK(greedy.report().global < 100.0);

  const LockSession s = lock_hra(n2046, budget, 6);
  CHECK(s.used() <= budget + 1);
  CHECK(s.used() >= budget);
  CHECK(s.report().global < 100.0);
}

TEST_CASE("HRA overshoots by at most one bit") {
  // Balanced pair: the only greedy move is a 2-bit pair insertion.
  const LockSession s = lock_hra(bench("counts:add=2,sub=2"), 1, 1);
  CHECK(s.used() == 2);
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    const std::size_t budget = seed % 13;
    const LockSession r = lock_hra(bench("random:25:" + std::to_string(seed)), budget, seed);
    CHECK(r.used() <= budget + 1);
    CHECK(r.used() >= budget);
  }
}

TEST_CASE("ASSURE serial locks operations in textual order") {
  const Design chain = parse_verilog(
      "module c(a, b, y); input [7:0] a, b; output [7:0] y; wire [7:0] t0, t1, t2;\n"
      "assign t0 = a + b;\nassign t1 = t0 * b;\nassign t2 = t1 << a;\nassign y = t2 & a;\nendmodule");
  const std::vector<NodeId> order = collect_ops(chain);
  const LockSession s = lock_assure(chain, 2, 1, Selection::Serial);
  CHECK(s.used() == 2);
  CHECK(s.design().nodes[order[0]].kind == NodeKind::KeyMux);
  CHECK(s.design().nodes[order[1]].kind == NodeKind::KeyMux);
  CHECK(s.design().nodes[order[2]].kind == NodeKind::BinOp);
  CHECK(s.design().nodes[order[3]].kind == NodeKind::BinOp);
  CHECK(count_ops(s.design(), OpType::Sub) == 1);
  CHECK(count_ops(s.design(), OpType::Div) == 1);
  CHECK(unlocks_to(s, chain));
  CHECK(s.warnings().empty());
}

TEST_CASE("ASSURE random is deterministic under a seed") {
  const Design d = bench("random:60:4");
  const std::string a = emit_verilog(lock_assure(d, 20, 77, Selection::Random).design());
  const std::string b = emit_verilog(lock_assure(d, 20, 77, Selection::Random).design());
  const std::string c = emit_verilog(lock_assure(d, 20, 78, Selection::Random).design());
  CHECK(a == b);
  CHECK(a != c);
}

TEST_CASE("ASSURE with a budget above the operation count locks all and warns") {
  const Design d = bench("counts:add=3,mul=2");
  const LockSession s = lock_assure(d, 9, 1, Selection::Serial);
  CHECK(s.used() == 5);
  REQUIRE(s.warnings().size() == 1);
  CHECK(s.warnings()[0].find("exceeds") != std::string::npos);
  CHECK(unlocks_to(s, d));
}

TEST_CASE("ASSURE never balances") {
  const LockSession s = lock_assure(bench("imbalanced:add:2046"), 1535, 2, Selection::Serial);
  CHECK(odt_of(s, OpType::Add) == 511);
  CHECK_FALSE(is_learning_resilient(s.design()));
}

TEST_CASE("relock appends fresh bits and nests muxes") {
  const Design original = bench("random:12:5");
  const LockSession locked = lock_assure(original, 6, 3, Selection::Random);
  CHECK(relock(locked.design(), 0, 5, 1).empty());

  const auto samples = relock(locked.design(), 20, 10, 8);
  REQUIRE(samples.size() == 20);
  bool nested = false;
  for (const RelockedSample& r : samples) {
    CHECK(r.key.size() == 10);
    CHECK(r.design.key_length == 16);
    // Old bits keep their indices: the combined key unlocks to the original.
    CHECK(structural_equal(apply_key(r.design, concat(locked.key(), r.key)), original));
    for (const Node& n : r.design.nodes) {
      if (n.kind == NodeKind::KeyMux &&
          (r.design.nodes[n.lhs].kind == NodeKind::KeyMux || r.design.nodes[n.rhs].kind == NodeKind::KeyMux)) {
        nested = true;
      }
    }
  }
  CHECK(nested);
  // Rounds are independent streams.
  CHECK(emit_verilog(samples[0].design) != emit_verilog(samples[1].design));
}

TEST_CASE("learning resilience predicate") {
  CHECK(is_learning_resilient(bench("imbalanced:add:10")));
  CHECK(is_learning_resilient(lock_era(bench("random:80:9"), 40, 9).design()));
  CHECK_FALSE(is_learning_resilient(lock_assure(bench("imbalanced:add:2046"), 1535, 1, Selection::Serial).design()));
}

TEST_CASE("algorithm names and budget rounding") {
  for (Algorithm a : {Algorithm::AssureSerial, Algorithm::AssureRandom, Algorithm::Hra, Algorithm::Era}) {
    CHECK(algorithm_from_name(algorithm_name(a)) == a);
  }
  CHECK_FALSE(algorithm_from_name("sarlock").has_value());
  CHECK(budget_from_percent(75, 2046) == 1535);
  CHECK(budget_from_percent(75, 4) == 3);
  CHECK(budget_from_percent(100, 7) == 7);
  CHECK(budget_from_percent(0, 7) == 0);
}

TEST_CASE("trace CSV") {
  const LockSession s = lock_hra(bench("counts:add=3,shl=1"), 2, 1, pt(), HraOptions{true});
  std::ostringstream os;
  s.write_trace_csv(os);
  const std::string csv = os.str();
  CHECK(csv.rfind("step,pair,P,bits,metric_global\n", 0) == 0);
  CHECK(csv.find("0,add-sub,0,1,") != std::string::npos);
}

TEST_CASE("sessions reject non-three-address input") {
  Design d;
  const auto a = d.add_signal("a", SignalKind::Input, 8);
  const auto y = d.add_signal("y", SignalKind::Output, 8);
  d.assign(y, d.binop(OpType::Add, d.binop(OpType::Mul, d.var(a), d.var(a)), d.var(a)));
  CHECK_THROWS_AS(LockSession(d, 1, 1), LockError);
}
