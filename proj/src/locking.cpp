#include "rtllock/locking.hpp"

#include <cassert>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <ostream>

#include "rtllock/error.hpp"

namespace rtllock {

std::string_view algorithm_name(Algorithm algo) {
  switch (algo) {
    case Algorithm::AssureSerial: return "assure-serial";
    case Algorithm::AssureRandom: return "assure-random";
    case Algorithm::Hra: return "hra";
    case Algorithm::Era: return "era";
  }
  return "?";
}

std::optional<Algorithm> algorithm_from_name(std::string_view name) {
  for (Algorithm a : {Algorithm::AssureSerial, Algorithm::AssureRandom, Algorithm::Hra, Algorithm::Era}) {
    if (algorithm_name(a) == name) {
      return a;
    }
  }
  return std::nullopt;
}

namespace {

constexpr std::uint32_t kUntracked = std::numeric_limits<std::uint32_t>::max();

double squared_norm(const std::vector<std::int64_t>& entries, const std::vector<std::uint8_t>* mask) {
  double sum = 0.0;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (mask == nullptr || (*mask)[i] != 0) {
      const auto v = static_cast<double>(entries[i]);
      sum += v * v;
    }
  }
  return sum;
}

}  // namespace

// ---------------------------------------------------------------------------
// LockSession
// ---------------------------------------------------------------------------

LockSession::LockSession(Design design, std::size_t budget, std::uint64_t seed, const PairTable& pairs)
    : design_(std::move(design)), pairs_(pairs), budget_(budget), seed_(seed), rng_(seed) {
  try {
    validate(design_);
  } catch (const DesignError& e) {
    throw LockError(std::string("cannot lock an invalid design: ") + e.what());
  }
  if (!is_three_address(design_)) {
    throw LockError("cannot lock: design is not in three-address form");
  }
  odt_ = build_odt(design_, pairs_);
  initial_ = DistributionVector::from_odt(odt_);
  initial_global_ = distance(initial_, DistributionVector::optimum(initial_.values.size()));
  pos_in_type_.assign(design_.nodes.size(), kUntracked);
  pos_in_all_.assign(design_.nodes.size(), kUntracked);
  for (NodeId id : collect_ops(design_)) {
    track(id);
  }
}

void LockSession::track(NodeId id) {
  if (pos_in_type_.size() <= id) {
    pos_in_type_.resize(id + 1, kUntracked);
    pos_in_all_.resize(id + 1, kUntracked);
  }
  auto& list = ops_[index_of(design_.nodes[id].op)];
  pos_in_type_[id] = static_cast<std::uint32_t>(list.size());
  list.push_back(id);
  pos_in_all_[id] = static_cast<std::uint32_t>(all_ops_.size());
  all_ops_.push_back(id);
}

void LockSession::untrack_last(NodeId id) {
  auto& list = ops_[index_of(design_.nodes[id].op)];
  assert(!list.empty() && list.back() == id);
  assert(!all_ops_.empty() && all_ops_.back() == id);
  list.pop_back();
  all_ops_.pop_back();
  pos_in_type_[id] = kUntracked;
  pos_in_all_[id] = kUntracked;
}

// Moves the list slots of operation `from` to `to` (same type).
void LockSession::retarget(NodeId from, NodeId to) {
  if (pos_in_type_.size() <= to) {
    pos_in_type_.resize(to + 1, kUntracked);
    pos_in_all_.resize(to + 1, kUntracked);
  }
  const OpType t = design_.nodes[to].op;
  ops_[index_of(t)][pos_in_type_[from]] = to;
  all_ops_[pos_in_all_[from]] = to;
  pos_in_type_[to] = pos_in_type_[from];
  pos_in_all_[to] = pos_in_all_[from];
  pos_in_type_[from] = kUntracked;
  pos_in_all_[from] = kUntracked;
}

void LockSession::insert(NodeId site, bool key_bit) {
  const Node real = design_.nodes[site];
  assert(real.kind == NodeKind::BinOp);
  const OpType dummy_type = pairs_.partner(real.op);

  design_.nodes.push_back(real);
  const auto real_id = static_cast<NodeId>(design_.nodes.size() - 1);
  Node dummy = real;
  dummy.op = dummy_type;
  design_.nodes.push_back(dummy);
  const auto dummy_id = static_cast<NodeId>(design_.nodes.size() - 1);

  Node mux;
  mux.kind = NodeKind::KeyMux;
  mux.ref = static_cast<std::uint32_t>(design_.key_length);
  mux.lhs = key_bit ? real_id : dummy_id;
  mux.rhs = key_bit ? dummy_id : real_id;
  design_.nodes[site] = mux;
  ++design_.key_length;
  key_.push_back(key_bit);

  retarget(site, real_id);
  track(dummy_id);

  const std::size_t pair = pairs_.pair_index(real.op);
  odt_.entries[pair] += pairs_.is_first(dummy_type) ? 1 : -1;
  journal_.push_back(Insertion{site, real_id, dummy_id, pair, odt_.affected[pair]});
  odt_.affected[pair] = 1;
}

void LockSession::undo_insertion(const Insertion& ins) {
  assert(ins.dummy + 1 == design_.nodes.size() && ins.real + 1 == ins.dummy);
  const OpType dummy_type = design_.nodes[ins.dummy].op;
  untrack_last(ins.dummy);
  design_.nodes[ins.site] = design_.nodes[ins.real];
  retarget(ins.real, ins.site);
  design_.nodes.pop_back();
  design_.nodes.pop_back();
  --design_.key_length;
  key_.pop_back();
  odt_.entries[ins.pair] -= pairs_.is_first(dummy_type) ? 1 : -1;
  odt_.affected[ins.pair] = ins.was_affected;
}

void LockSession::record_step(std::size_t pair, bool pair_mode, std::size_t bits, std::size_t journal_start) {
  step_starts_.push_back(journal_start);
  trace_.push_back(TraceEntry{trace_.size(), pair, pair_mode, bits, global_metric()});
}

bool LockSession::can_lock_step(OpType t, bool pair_mode) const {
  const std::int64_t imbalance = odt_.at(t, pairs_);
  const OpType partner = pairs_.partner(t);
  if (!pair_mode && imbalance > 0) {
    return op_count(t) > 0;
  }
  if (!pair_mode && imbalance < 0) {
    return op_count(partner) > 0;
  }
  return op_count(t) > 0 && op_count(partner) > 0;
}

std::size_t LockSession::lock_step(OpType t, bool pair_mode) {
  const OpType partner = pairs_.partner(t);
  const std::int64_t imbalance = odt_.at(t, pairs_);
  const bool need_t = pair_mode || imbalance >= 0;
  const bool need_partner = pair_mode || imbalance <= 0;
  if (need_t && op_count(t) == 0) {
    throw LockError("no operation of type '" + std::string(op_name(t)) + "' to lock");
  }
  if (need_partner && op_count(partner) == 0) {
    throw LockError("no operation of type '" + std::string(op_name(partner)) + "' to lock");
  }
  // Both candidates are drawn before anything is inserted.
  std::optional<NodeId> on_t;
  std::optional<NodeId> on_partner;
  if (need_t) {
    const auto& list = ops_[index_of(t)];
    on_t = list[rng_.below(list.size())];
  }
  if (need_partner) {
    const auto& list = ops_[index_of(partner)];
    on_partner = list[rng_.below(list.size())];
  }
  const std::size_t start = journal_.size();
  std::size_t bits = 0;
  if (on_t) {
    insert(*on_t, rng_.coin());
    ++bits;
  }
  if (on_partner) {
    insert(*on_partner, rng_.coin());
    ++bits;
  }
  record_step(pairs_.pair_index(t), pair_mode, bits, start);
  return bits;
}

void LockSession::lock_operation(NodeId op) {
  if (op >= design_.nodes.size() || design_.nodes[op].kind != NodeKind::BinOp) {
    throw LockError("lock_operation: node is not an operation");
  }
  const std::size_t start = journal_.size();
  insert(op, rng_.coin());
  record_step(pairs_.pair_index(design_.nodes[journal_.back().real].op), false, 1, start);
}

void LockSession::undo_last_step() {
  if (step_starts_.empty()) {
    throw LockError("undo_last_step: nothing to undo");
  }
  const std::size_t start = step_starts_.back();
  while (journal_.size() > start) {
    undo_insertion(journal_.back());
    journal_.pop_back();
  }
  step_starts_.pop_back();
  trace_.pop_back();
}

double LockSession::global_metric() const {
  return security_score(initial_global_, std::sqrt(squared_norm(odt_.entries, nullptr)));
}

double LockSession::restricted_metric() const { return report().restricted; }

MetricReport LockSession::report() const {
  return metric(initial_, DistributionVector::from_odt(odt_), odt_);
}

void LockSession::write_trace_csv(std::ostream& os) const {
  os << "step,pair,P,bits,metric_global\n";
  for (const TraceEntry& e : trace_) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4f", e.metric_global);
    os << e.step << ',' << pairs_.pair_label(e.pair) << ',' << (e.pair_mode ? 1 : 0) << ','
       << e.bits << ',' << buf << '\n';
  }
}

// ---------------------------------------------------------------------------
// Algorithms
// ---------------------------------------------------------------------------

namespace {

void require_operations(const LockSession& s) {
  if (s.budget() > 0 && s.all_ops().empty()) {
    throw LockError("design has no lockable operations");
  }
}

}  // namespace

LockSession lock_era(Design design, std::size_t budget, std::uint64_t seed, const PairTable& pairs) {
  LockSession s(std::move(design), budget, seed, pairs);
  require_operations(s);
  const auto table = s.pairs().pairs();
  while (s.used() < budget) {
    const LockingPair& pair = table[s.rng().below(table.size())];
    const OpType t = s.rng().coin() ? pair.second : pair.first;
    if (s.op_count(t) + s.op_count(pair.first == t ? pair.second : pair.first) == 0) {
      continue;
    }
    if (s.odt().at(t, s.pairs()) == 0) {
      // Balanced already: spend a pair-mode step so the loop makes progress.
      s.lock_step(t, true);
      continue;
    }
    while (s.odt().at(t, s.pairs()) != 0) {
      s.lock_step(t, false);
    }
  }
  return s;
}

LockSession lock_hra(Design design, std::size_t budget, std::uint64_t seed, const PairTable& pairs,
                     HraOptions options) {
  LockSession s(std::move(design), budget, seed, pairs);
  require_operations(s);
  const auto table = s.pairs().pairs();
  std::vector<std::size_t> order(table.size());
  std::iota(order.begin(), order.end(), 0);

  while (s.used() < budget) {
    const bool pair_mode = !options.greedy_only && s.rng().coin();
    if (pair_mode) {
      const OpType t = table[order[s.rng().below(order.size())]].first;
      if (s.can_lock_step(t, true)) {
        s.lock_step(t, true);
        continue;
      }
    }
    s.rng().shuffle(std::span<std::size_t>(order));
    double best = -1.0;
    std::optional<std::size_t> chosen;
    for (std::size_t i = 0; i < order.size(); ++i) {
      const OpType t = table[order[i]].first;
      if (!s.can_lock_step(t, false)) {
        continue;
      }
      s.lock_step(t, false);
      const double m = s.global_metric();
      s.undo_last_step();
      if (m > best) {
        best = m;
        chosen = i;
      }
    }
    if (!chosen) {
      throw LockError("no locking pair can be locked in this design");
    }
    s.lock_step(table[order[*chosen]].first, false);
  }
  return s;
}

LockSession lock_assure(Design design, std::size_t budget, std::uint64_t seed, Selection selection,
                        const PairTable& pairs) {
  std::vector<NodeId> candidates = collect_ops(design);
  LockSession s(std::move(design), budget, seed, pairs);
  if (selection == Selection::Random) {
    s.rng().shuffle(std::span<NodeId>(candidates));
  }
  if (budget > candidates.size()) {
    s.warn("key budget " + std::to_string(budget) + " exceeds the " +
           std::to_string(candidates.size()) + " lockable operations; locking all of them");
  }
  const std::size_t n = std::min(budget, candidates.size());
  for (std::size_t i = 0; i < n; ++i) {
    s.lock_operation(candidates[i]);
  }
  return s;
}

LockSession lock(Algorithm algo, Design design, std::size_t budget, std::uint64_t seed,
                 const PairTable& pairs) {
  switch (algo) {
    case Algorithm::AssureSerial:
      return lock_assure(std::move(design), budget, seed, Selection::Serial, pairs);
    case Algorithm::AssureRandom:
      return lock_assure(std::move(design), budget, seed, Selection::Random, pairs);
    case Algorithm::Hra:
      return lock_hra(std::move(design), budget, seed, pairs);
    case Algorithm::Era:
      return lock_era(std::move(design), budget, seed, pairs);
  }
  throw LockError("unknown algorithm");
}

void relock_each(const Design& design, std::size_t rounds, std::size_t bits_per_round,
                 std::uint64_t seed, const PairTable& pairs,
                 const std::function<void(const Design&, const Key&)>& sink) {
  for (std::size_t round = 0; round < rounds; ++round) {
    LockSession s(design, bits_per_round, mix_seed(seed, round), pairs);
    if (bits_per_round > 0 && s.all_ops().empty()) {
      throw LockError("design has no lockable operations");
    }
    for (std::size_t b = 0; b < bits_per_round; ++b) {
      const auto ops = s.all_ops();
      s.lock_operation(ops[s.rng().below(ops.size())]);
    }
    sink(s.design(), s.key());
  }
}

std::vector<RelockedSample> relock(const Design& design, std::size_t rounds,
                                   std::size_t bits_per_round, std::uint64_t seed,
                                   const PairTable& pairs) {
  std::vector<RelockedSample> out;
  out.reserve(rounds);
  relock_each(design, rounds, bits_per_round, seed, pairs,
              [&](const Design& d, const Key& k) { out.push_back(RelockedSample{d, k}); });
  return out;
}

bool is_learning_resilient(const Design& design, const PairTable& pairs) {
  const DistributionTable odt = build_odt(design, pairs);
  for (std::size_t p = 0; p < odt.entries.size(); ++p) {
    if (odt.affected[p] != 0 && odt.entries[p] != 0) {
      return false;
    }
  }
  return true;
}

std::size_t budget_from_percent(double percent, std::size_t op_count) {
  const double exact = percent / 100.0 * static_cast<double>(op_count);
  return static_cast<std::size_t>(std::ceil(exact - 1e-9));
}

}  // namespace rtllock
