#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rtllock/ir.hpp"

namespace rtllock {

/// Operation distribution table: one signed imbalance per locking pair
/// (count(first) - count(second), in PairTable order) plus whether any
/// operation of the pair sits under a key mux.
struct DistributionTable {
  std::vector<std::int64_t> entries;
  std::vector<std::uint8_t> affected;

  /// ODT[op], negated for the second member of its pair.
  std::int64_t at(OpType op, const PairTable& pairs) const;
  bool all_affected() const;
};

DistributionTable build_odt(const Design& design, const PairTable& pairs = PairTable::defaults());

/// |ODT| per pair with a per-entry mask; a false mask entry is an excluded
/// ('x') position when the vector is used as a distance target.
struct DistributionVector {
  std::vector<std::uint64_t> values;
  std::vector<std::uint8_t> mask;

  static DistributionVector from_odt(const DistributionTable& odt);
  /// All-zero optimum. With `restrict_to`, pairs not affected are masked out.
  static DistributionVector optimum(std::size_t pairs);
  static DistributionVector optimum(const DistributionTable& restrict_to);
};

/// Euclidean distance over the positions where `target.mask` is set. Throws
/// std::invalid_argument on length mismatch.
double distance(const DistributionVector& v, const DistributionVector& target);

/// 100 * (1 - current / initial), clamped to [0, 100]. A zero initial
/// distance yields 100 when the current distance is zero too, 0 otherwise.
double security_score(double initial_distance, double current_distance);

struct MetricReport {
  double global = 0.0;
  double restricted = 0.0;
  double initial_distance = 0.0;
  double current_distance_global = 0.0;
  double current_distance_restricted = 0.0;

  /// JSON object with fields global, restricted, initialDistance,
  /// currentDistanceGlobal, currentDistanceRestricted; values rounded to 2 decimals.
  std::string to_json() const;
};

/// Global metric against the unmasked optimum, restricted metric against the
/// optimum masked by `odt.affected`.
MetricReport metric(const DistributionVector& initial, const DistributionVector& current,
                    const DistributionTable& odt);

/// Convenience: metric of `locked` relative to the unlocked `original`.
MetricReport metric(const Design& original, const Design& locked,
                    const PairTable& pairs = PairTable::defaults());

}  // namespace rtllock
