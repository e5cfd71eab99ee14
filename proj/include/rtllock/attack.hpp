#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "rtllock/ir.hpp"
#include "rtllock/locking.hpp"

namespace rtllock {

/// Attack feature for one key bit: the id-codes of the top-level constructs
/// of the mux's when-one (c1) and when-zero (c2) branches. A branch whose top
/// is another mux, a variable or a constant encodes as 0.
struct Locality {
  std::size_t key_index = 0;
  int c1 = 0;
  int c2 = 0;

  bool operator==(const Locality&) const = default;
};

/// One locality per key index, in index order.
std::vector<Locality> extract_localities(const Design& design,
                                         const PairTable& pairs = PairTable::defaults());

struct CellCounts {
  std::uint64_t zero = 0;
  std::uint64_t one = 0;

  std::uint64_t total() const { return zero + one; }
  bool operator==(const CellCounts&) const = default;
};

/// Key-value counts per (c1, c2) cell: the learned state of the attack.
class ObservationTable {
 public:
  using Cell = std::pair<int, int>;

  void add(Cell cell, bool key_bit, std::uint64_t n = 1);
  void merge(const ObservationTable& other);

  const CellCounts* find(Cell cell) const;
  const std::map<Cell, CellCounts>& cells() const { return cells_; }
  std::uint64_t total() const { return total_; }
  bool empty() const { return total_ == 0; }

  std::string to_json(const PairTable& pairs = PairTable::defaults()) const;

  bool operator==(const ObservationTable&) const = default;

 private:
  std::map<Cell, CellCounts> cells_;
  std::uint64_t total_ = 0;
};

/// Adds the localities of one training sample. `key` holds the known bits,
/// which are the trailing key.size() indices of the design (relocking appends
/// its bits after any existing ones). Throws InputError when the key is longer
/// than the design's key.
void train_into(ObservationTable& table, const Design& design, const Key& key,
                const PairTable& pairs = PairTable::defaults());

ObservationTable train(std::span<const RelockedSample> training,
                       const PairTable& pairs = PairTable::defaults());

struct ClassifierOptions {
  /// A cell decides by majority only when |n1 - n0| > min_z * sqrt(n1 + n0);
  /// closer splits are treated as ties. 0 treats only exact ties as ties.
  double min_z = 3.29;
};

enum class DecisionBasis { Majority, Tie, Unseen };

std::string_view decision_basis_name(DecisionBasis basis);

struct BitPrediction {
  Locality locality;
  bool bit = false;
  double confidence = 0.5;
  DecisionBasis basis = DecisionBasis::Unseen;
};

struct AttackReport {
  std::vector<BitPrediction> bits;
  std::optional<double> kpa;

  std::vector<std::uint8_t> predicted_bits() const;
  Key predicted_key() const;

  std::string to_json(const PairTable& pairs = PairTable::defaults()) const;
  /// `benchmark,algorithm,seed,kpa` (kpa empty when no ground truth).
  std::string csv_line(std::string_view benchmark, std::string_view algorithm,
                       std::uint64_t seed) const;
};

/// Predicts every key bit of `target`. Decided cells give their majority bit
/// with the majority fraction as confidence; ties and unseen cells get a bit
/// drawn from `seed` with confidence 0.5.
AttackReport predict(const ObservationTable& table, const Design& target, std::uint64_t seed,
                     const PairTable& pairs = PairTable::defaults(), ClassifierOptions options = {});

/// As above, with kpa filled in from the ground truth.
AttackReport predict(const ObservationTable& table, const Design& target, std::uint64_t seed,
                     const Key& truth, const PairTable& pairs = PairTable::defaults(),
                     ClassifierOptions options = {});

/// 100 * fraction of matching bits. Throws InputError on length mismatch.
double kpa(std::span<const std::uint8_t> predicted, const Key& truth);

}  // namespace rtllock
