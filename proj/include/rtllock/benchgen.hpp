#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "rtllock/ir.hpp"

namespace rtllock {

enum class BenchKind { Imbalanced, Balanced, RandomMixed, Counted };

/// Synthetic benchmark description.
///
///   Imbalanced   op_count operations of `ops.first` in a reduction tree
///   Balanced     op_count of each pair member in the same tree shape
///   RandomMixed  op_count operations drawn from `mix` into a random forest
///   Counted      exactly the counts in `mix`, in seeded random order
struct BenchSpec {
  BenchKind kind = BenchKind::Imbalanced;
  std::size_t op_count = 1;
  LockingPair ops{OpType::Add, OpType::Sub};
  std::vector<std::pair<OpType, double>> mix;
  std::uint64_t seed = 1;
  std::uint32_t width = 8;
};

/// Parses CLI spec strings:
///   imbalanced:add:2046        imbalanced:2046 (add)
///   balanced:add-sub:1023
///   random:500[:seed[:add=3,sub=1,...]]
///   counts:add=25,shl=10[:seed]
/// Throws InputError with a description of what is wrong.
BenchSpec parse_bench_spec(std::string_view text);

/// Throws InputError when the spec is invalid (zero operations, empty mix, ...).
Design generate(const BenchSpec& spec);

/// Default weights for random-mixed designs. Each pair has a dominant member
/// so that unbalanced locking leaves a learnable bias.
std::vector<std::pair<OpType, double>> default_op_mix();

}  // namespace rtllock
