#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "rtllock/ir.hpp"
#include "rtllock/odt.hpp"
#include "rtllock/random.hpp"

namespace rtllock {

enum class Algorithm { AssureSerial, AssureRandom, Hra, Era };

std::string_view algorithm_name(Algorithm algo);
std::optional<Algorithm> algorithm_from_name(std::string_view name);

struct TraceEntry {
  std::size_t step = 0;
  std::size_t pair = 0;
  bool pair_mode = false;
  std::size_t bits = 0;
  double metric_global = 0.0;
};

/// Mutable locking state for one design: the design under transformation,
/// its ODT, the key bits inserted so far and a journal that lets the last
/// step be undone.
///
/// Every insertion wraps an existing BinOp in a KeyMux whose other branch is
/// the partner operation over the same operands. The correct bit is drawn at
/// random, so the real operation is equally likely to sit in either branch.
/// New bits take the next free key indices; bits already in the design keep
/// theirs. The session is single-threaded.
class LockSession {
 public:
  /// Throws LockError unless `design` is valid and in three-address form.
  LockSession(Design design, std::size_t budget, std::uint64_t seed,
              const PairTable& pairs = PairTable::defaults());

  /// One Lock step for type `t`:
  ///  - ODT[t] > 0 and not pair mode: a t'-dummy on a random t operation (1 bit)
  ///  - ODT[t] < 0 and not pair mode: a t-dummy on a random t' operation (1 bit)
  ///  - otherwise both insertions (2 bits)
  /// Operations are drawn uniformly from all of that type, including ones
  /// already inside mux branches. Returns the bits used; throws LockError if
  /// a required operation type is absent.
  std::size_t lock_step(OpType t, bool pair_mode);
  bool can_lock_step(OpType t, bool pair_mode) const;

  /// Wraps the given operation with a single insertion, recorded as one step.
  void lock_operation(NodeId op);

  /// Reverts the most recent step (lock_step or lock_operation).
  void undo_last_step();

  const Design& design() const { return design_; }
  Design take_design() && { return std::move(design_); }
  const PairTable& pairs() const { return pairs_; }
  const DistributionTable& odt() const { return odt_; }
  const DistributionVector& initial_vector() const { return initial_; }
  const Key& key() const { return key_; }
  std::size_t budget() const { return budget_; }
  std::size_t used() const { return key_.size(); }
  std::uint64_t seed() const { return seed_; }
  const std::vector<TraceEntry>& trace() const { return trace_; }
  const std::vector<std::string>& warnings() const { return warnings_; }
  void warn(std::string message) { warnings_.push_back(std::move(message)); }
  Rng& rng() { return rng_; }

  std::size_t op_count(OpType t) const { return ops_[index_of(t)].size(); }
  /// Every BinOp currently in the design, real or dummy.
  std::span<const NodeId> all_ops() const { return all_ops_; }

  double global_metric() const;
  double restricted_metric() const;
  MetricReport report() const;

  /// CSV with header `step,pair,P,bits,metric_global`.
  void write_trace_csv(std::ostream& os) const;

 private:
  struct Insertion {
    NodeId site;
    NodeId real;
    NodeId dummy;
    std::size_t pair;
    std::uint8_t was_affected;
  };

  void insert(NodeId site, bool key_bit);
  void undo_insertion(const Insertion& ins);
  void track(NodeId id);
  void untrack_last(NodeId id);
  void retarget(NodeId from, NodeId to);
  void record_step(std::size_t pair, bool pair_mode, std::size_t bits, std::size_t journal_start);

  Design design_;
  PairTable pairs_;
  DistributionTable odt_;
  DistributionVector initial_;
  double initial_global_ = 0.0;
  Key key_;
  std::size_t budget_;
  std::uint64_t seed_;
  Rng rng_;
  std::vector<TraceEntry> trace_;
  std::vector<std::string> warnings_;

  std::array<std::vector<NodeId>, kOpTypeCount> ops_;
  std::vector<NodeId> all_ops_;
  std::vector<std::uint32_t> pos_in_type_;
  std::vector<std::uint32_t> pos_in_all_;
  std::vector<Insertion> journal_;
  std::vector<std::size_t> step_starts_;
};

/// Exact balancing: repeatedly picks a random pair and a random member T and
/// locks until ODT[T] = 0. An already balanced pick gets one pair-mode step
/// instead, and picks of pairs absent from the design are redrawn. May exceed
/// the budget; every pair it touches ends balanced.
LockSession lock_era(Design design, std::size_t budget, std::uint64_t seed,
                     const PairTable& pairs = PairTable::defaults());

struct HraOptions {
  /// Never take the random pair-mode branch (pure steepest ascent).
  bool greedy_only = false;
};

/// Heuristic balancing under a key budget. Each iteration flips a coin: heads
/// locks a random pair in pair mode (falling back to the greedy scan when
/// that pair's types are missing from the design); tails tentatively locks
/// each pair's first member in shuffled order, keeps the one with the highest
/// global metric (first wins ties) and commits it. Overshoots the budget by
/// at most one bit.
LockSession lock_hra(Design design, std::size_t budget, std::uint64_t seed,
                     const PairTable& pairs = PairTable::defaults(), HraOptions options = {});

enum class Selection { Serial, Random };

/// Baseline operation locking: `budget` distinct operations, one insertion
/// each. Serial takes them in declaration order (leftmost-innermost first),
/// Random uniformly without replacement. No balancing.
LockSession lock_assure(Design design, std::size_t budget, std::uint64_t seed, Selection selection,
                        const PairTable& pairs = PairTable::defaults());

LockSession lock(Algorithm algo, Design design, std::size_t budget, std::uint64_t seed,
                 const PairTable& pairs = PairTable::defaults());

/// One self-referencing round result: the relocked design and the newly
/// inserted key bits, which occupy the highest key indices.
struct RelockedSample {
  Design design;
  Key key;
};

/// Produces `rounds` independent relocked copies of `design`. Each of the
/// `bits_per_round` insertions wraps an operation drawn uniformly from every
/// BinOp present at that moment, including dummies and operations already
/// under muxes, so relocked copies contain nested mux trees.
std::vector<RelockedSample> relock(const Design& design, std::size_t rounds,
                                   std::size_t bits_per_round, std::uint64_t seed,
                                   const PairTable& pairs = PairTable::defaults());

/// Streaming form of relock: `sink` sees each sample once, in round order.
void relock_each(const Design& design, std::size_t rounds, std::size_t bits_per_round,
                 std::uint64_t seed, const PairTable& pairs,
                 const std::function<void(const Design&, const Key&)>& sink);

/// True iff every pair with a locked operation has equal counts of both types.
bool is_learning_resilient(const Design& design, const PairTable& pairs = PairTable::defaults());

/// ceil(percent / 100 * op_count).
std::size_t budget_from_percent(double percent, std::size_t op_count);

}  // namespace rtllock
