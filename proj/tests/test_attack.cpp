#include "doctest.h"

#include <numeric>

#include "rtllock/attack.hpp"
#include "rtllock/benchgen.hpp"
#include "rtllock/error.hpp"
#include "rtllock/locking.hpp"
#include "rtllock/verilog.hpp"

using namespace rtllock;

namespace {

int code(OpType op) { return PairTable::defaults().code(op); }

Design bench(const std::string& spec) { return generate(parse_bench_spec(spec)); }

// Swaps the branches of every mux and flips the matching key bits. The
// result is functionally the same locked design under the flipped key.
RelockedSample mirror(const RelockedSample& s) {
  RelockedSample m = s;
  for (Node& n : m.design.nodes) {
    if (n.kind == NodeKind::KeyMux) {
      std::swap(n.lhs, n.rhs);
    }
  }
  Key flipped;
  for (std::size_t i = 0; i < s.key.size(); ++i) {
    flipped.push_back(!s.key[i]);
  }
  m.key = flipped;
  return m;
}

}  // namespace

TEST_CASE("locality of a single locked operation") {
  const Design d = parse_verilog(
      "module m(b, c, a, lock_key); input [7:0] b, c; output [7:0] a; input lock_key;\n"
      "assign a = lock_key[0] ? (b + c) : (b - c);\nendmodule");
  const auto ls = extract_localities(d);
  REQUIRE(ls.size() == 1);
  CHECK(ls[0] == Locality{0, code(OpType::Add), code(OpType::Sub)});
}

TEST_CASE("nested mux branches encode as 0") {
  const Design d = parse_verilog(
      "module m(a, b, y, lock_key); input [7:0] a, b; output [7:0] y; input [2:0] lock_key;\n"
      "assign y = lock_key[2] ? (lock_key[1] ? (a + b) : (a - b)) : (lock_key[0] ? (a - b) : (a + b));\n"
      "endmodule");
  const auto ls = extract_localities(d);
  REQUIRE(ls.size() == 3);
  CHECK(ls[0] == Locality{0, code(OpType::Sub), code(OpType::Add)});
  CHECK(ls[1] == Locality{1, code(OpType::Add), code(OpType::Sub)});
  CHECK(ls[2] == Locality{2, 0, 0});

  const Design one_sided = parse_verilog(
      "module m(a, b, y, lock_key); input [7:0] a, b; output [7:0] y; input [1:0] lock_key;\n"
      "assign y = lock_key[1] ? (a - b) : (lock_key[0] ? (a + b) : (a - b));\nendmodule");
  CHECK(extract_localities(one_sided)[1] == Locality{1, code(OpType::Sub), 0});
}

TEST_CASE("unlocked design has no localities") {
  CHECK(extract_localities(bench("random:30:1")).empty());
}

TEST_CASE("training counts key values per cell") {
  // Every real add sits in the when-one branch: (add, sub) always carries 1.
  std::vector<RelockedSample> corpus;
  const Design d = bench("imbalanced:add:8");
  for (int i = 0; i < 5; ++i) {
    RelockedSample s{d, {}};
    for (NodeId op : collect_ops(d)) {
      const Node real = s.design.nodes[op];
      const NodeId r = s.design.binop(real.op, real.lhs, real.rhs);
      const NodeId dummy = s.design.binop(OpType::Sub, real.lhs, real.rhs);
      s.design.nodes[op] = s.design.nodes[s.design.key_mux(static_cast<std::uint32_t>(s.design.key_length), r, dummy)];
      s.key.push_back(true);
    }
    corpus.push_back(std::move(s));
  }
  const ObservationTable t = train(corpus);
  CHECK(t.total() == 40);
  const CellCounts* c = t.find({code(OpType::Add), code(OpType::Sub)});
  REQUIRE(c != nullptr);
  CHECK(c->zero == 0);
  CHECK(c->one == 40);
  CHECK(train({}).empty());
}

TEST_CASE("training rejects a key longer than the design's") {
  ObservationTable t;
  Key k;
  k.push_back(true);
  CHECK_THROWS_AS(train_into(t, bench("imbalanced:add:3"), k), InputError);
}

TEST_CASE("majority vote with confidence") {
  ObservationTable t;
  t.add({code(OpType::Add), code(OpType::Sub)}, false, 10);
  t.add({code(OpType::Add), code(OpType::Sub)}, true, 90);
  const Design target = parse_verilog(
      "module m(b, c, a, lock_key); input [7:0] b, c; output [7:0] a; input lock_key;\n"
      "assign a = lock_key[0] ? (b + c) : (b - c);\nendmodule");
  const AttackReport r = predict(t, target, 1);
  REQUIRE(r.bits.size() == 1);
  CHECK(r.bits[0].bit);
  CHECK(r.bits[0].confidence == doctest::Approx(0.9));
  CHECK(r.bits[0].basis == DecisionBasis::Majority);
  CHECK_FALSE(r.kpa.has_value());

  Key truth;
  truth.push_back(true);
  CHECK(predict(t, target, 1, truth).kpa == 100.0);
}

TEST_CASE("ties and unseen cells fall back to a seeded coin") {
  ObservationTable t;
  t.add({code(OpType::Add), code(OpType::Sub)}, false, 50);
  t.add({code(OpType::Add), code(OpType::Sub)}, true, 50);
  const Design target = lock_assure(bench("imbalanced:add:64"), 64, 3, Selection::Serial).design();
  const AttackReport r = predict(t, target, 5);
  for (const BitPrediction& b : r.bits) {
    CHECK(b.confidence == 0.5);
    CHECK(b.basis != DecisionBasis::Majority);
  }
  // Deterministic given (table, target, seed).
  CHECK(predict(t, target, 5).predicted_key() == r.predicted_key());
  CHECK_FALSE(predict(t, target, 6).predicted_key() == r.predicted_key());
}

TEST_CASE("significance gate treats near splits as ties") {
  ObservationTable t;
  t.add({1, 2}, false, 4950);
  t.add({1, 2}, true, 5050);  // z = 1
  const Design target = parse_verilog(
      "module m(b, c, a, lock_key); input [7:0] b, c; output [7:0] a; input lock_key;\n"
      "assign a = lock_key[0] ? (b + c) : (b - c);\nendmodule");
  CHECK(predict(t, target, 1).bits[0].basis == DecisionBasis::Tie);
  CHECK(predict(t, target, 1, PairTable::defaults(), ClassifierOptions{0.0}).bits[0].basis ==
        DecisionBasis::Majority);
}

TEST_CASE("kpa") {
  Key truth;
  Rng rng(2);
  for (int i = 0; i < 100; ++i) {
    truth.push_back(rng.coin());
  }
  std::vector<std::uint8_t> same(truth.bits().begin(), truth.bits().end());
  std::vector<std::uint8_t> flipped;
  for (auto b : same) {
    flipped.push_back(b ? 0 : 1);
  }
  CHECK(kpa(same, truth) == 100.0);
  CHECK(kpa(flipped, truth) == 0.0);
  CHECK_THROWS_AS(kpa(std::vector<std::uint8_t>(99, 0), truth), InputError);

  // Fair-coin guesses on 1000-bit keys average 50 +- 5 over 10 seeds.
  double sum = 0.0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    Rng key_rng(seed);
    Rng guess_rng(seed + 1000);
    Key k;
    std::vector<std::uint8_t> guess;
    for (int i = 0; i < 1000; ++i) {
      k.push_back(key_rng.coin());
      guess.push_back(guess_rng.coin() ? 1 : 0);
    }
    sum += kpa(guess, k);
  }
  CHECK(sum / 10 == doctest::Approx(50.0).epsilon(0.1));
}

TEST_CASE("exactly balanced training yields chance-level accuracy") {
  double sum = 0.0;
  const int seeds = 12;
  for (int seed = 1; seed <= seeds; ++seed) {
    const LockSession locked = lock_era(bench("random:200:" + std::to_string(seed)), 150, seed);
    // Every cell the target can hit gets identical zero/one counts.
    ObservationTable t;
    for (const Locality& l : extract_localities(locked.design())) {
      t.add({l.c1, l.c2}, false, 100);
      t.add({l.c1, l.c2}, true, 100);
    }
    sum += *predict(t, locked.design(), seed, locked.key()).kpa;
  }
  CHECK(sum / seeds == doctest::Approx(50.0).epsilon(0.1));
}

TEST_CASE("mirroring every training mux swaps cell labels and key values") {
  const LockSession locked = lock_assure(bench("random:80:3"), 60, 3, Selection::Random);
  const auto corpus = relock(locked.design(), 30, 40, 17);
  std::vector<RelockedSample> mirrored;
  for (const RelockedSample& s : corpus) {
    mirrored.push_back(mirror(s));
  }
  const ObservationTable a = train(corpus);
  const ObservationTable b = train(mirrored);
  CHECK(a.total() == b.total());
  for (const auto& [cell, counts] : a.cells()) {
    const CellCounts* m = b.find({cell.second, cell.first});
    REQUIRE(m != nullptr);
    CHECK(m->zero == counts.one);
    CHECK(m->one == counts.zero);
  }

  // Same decisions on the mirrored target, with flipped bits.
  RelockedSample target{locked.design(), locked.key()};
  const RelockedSample mirrored_target = mirror(target);
  const AttackReport ra = predict(a, target.design, 4);
  const AttackReport rb = predict(b, mirrored_target.design, 4);
  REQUIRE(ra.bits.size() == rb.bits.size());
  for (std::size_t i = 0; i < ra.bits.size(); ++i) {
    CHECK(ra.bits[i].basis == rb.bits[i].basis);
    if (ra.bits[i].basis == DecisionBasis::Majority) {
      CHECK(ra.bits[i].bit != rb.bits[i].bit);
      CHECK(ra.bits[i].confidence == doctest::Approx(rb.bits[i].confidence));
    }
  }
}

TEST_CASE("table merge is associative and commutative") {
  const auto corpus = relock(bench("random:50:2"), 12, 20, 5);
  ObservationTable whole = train(corpus);
  ObservationTable x = train(std::span(corpus).subspan(0, 4));
  ObservationTable y = train(std::span(corpus).subspan(4, 4));
  ObservationTable z = train(std::span(corpus).subspan(8));
  ObservationTable left = x;
  left.merge(y);
  left.merge(z);
  ObservationTable right = z;
  right.merge(y);
  right.merge(x);
  CHECK(left == whole);
  CHECK(right == whole);
}

TEST_CASE("report serialization") {
  ObservationTable t;
  t.add({code(OpType::Add), code(OpType::Sub)}, true, 3);
  CHECK(t.to_json().find("\"label\": \"add,sub\"") != std::string::npos);
  const LockSession locked = lock_assure(bench("imbalanced:add:4"), 4, 1, Selection::Serial);
  const AttackReport r = predict(t, locked.design(), 1, locked.key());
  CHECK(r.to_json().find("\"kpa\"") != std::string::npos);
  const std::string line = r.csv_line("imbalanced:add:4", "assure-serial", 1);
  CHECK(line.rfind("imbalanced:add:4,assure-serial,1,", 0) == 0);
}
