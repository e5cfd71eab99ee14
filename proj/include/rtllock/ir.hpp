#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace rtllock {

// ---------------------------------------------------------------------------
// Operation types and locking pairs
// ---------------------------------------------------------------------------

enum class OpType : std::uint8_t {
  Add,
  Sub,
  Mul,
  Div,
  Mod,
  Pow,
  Shl,
  Shr,
  And,
  Or,
  Xor,
  Xnor,
  Lt,
  Gt,
  Le,
  Ge,
  Eq,
  Ne,
};

inline constexpr std::size_t kOpTypeCount = 18;

inline constexpr std::array<OpType, kOpTypeCount> kAllOpTypes = {
    OpType::Add, OpType::Sub, OpType::Mul, OpType::Div, OpType::Mod, OpType::Pow,
    OpType::Shl, OpType::Shr, OpType::And, OpType::Or,  OpType::Xor, OpType::Xnor,
    OpType::Lt,  OpType::Gt,  OpType::Le,  OpType::Ge,  OpType::Eq,  OpType::Ne,
};

constexpr std::size_t index_of(OpType op) { return static_cast<std::size_t>(op); }

/// Short identifier used in files and spec strings ("add", "xnor", ...).
std::string_view op_name(OpType op);
/// Verilog operator token ("+", "~^", ...).
std::string_view op_symbol(OpType op);
std::optional<OpType> op_from_name(std::string_view name);

/// A locking pair (T, T'). `first` is the canonical member: ODT entries are
/// stored as count(first) - count(second).
struct LockingPair {
  OpType first;
  OpType second;
};

/// Involutive partner mapping over all operation types plus the integer code
/// each type gets in attack features. Code 0 is reserved.
class PairTable {
 public:
  /// add/sub, mul/div, mod/pow, shl/shr, and/or, xor/xnor, lt/ge, gt/le, eq/ne.
  static const PairTable& defaults();

  /// Throws InputError unless `partner` is an involution without fixed points
  /// and the codes are distinct positive integers.
  static PairTable from_partners(const std::array<OpType, kOpTypeCount>& partner,
                                 const std::array<int, kOpTypeCount>& codes);

  OpType partner(OpType op) const { return partner_[index_of(op)]; }
  int code(OpType op) const { return codes_[index_of(op)]; }
  std::optional<OpType> op_for_code(int code) const;

  std::span<const LockingPair> pairs() const { return pairs_; }
  std::size_t pair_count() const { return pairs_.size(); }
  std::size_t pair_index(OpType op) const { return pair_of_[index_of(op)]; }
  bool is_first(OpType op) const { return pairs_[pair_index(op)].first == op; }
  std::string pair_label(std::size_t pair) const;

 private:
  PairTable() = default;

  std::array<OpType, kOpTypeCount> partner_{};
  std::array<int, kOpTypeCount> codes_{};
  std::array<std::size_t, kOpTypeCount> pair_of_{};
  std::vector<LockingPair> pairs_;
};

// ---------------------------------------------------------------------------
// Design
// ---------------------------------------------------------------------------

using NodeId = std::uint32_t;
using SignalId = std::uint32_t;

enum class NodeKind : std::uint8_t { Const, Var, BinOp, KeyMux };

/// Expression node stored in the design's arena.
///
/// BinOp:  op(lhs, rhs)
/// KeyMux: lock_key[ref] ? lhs : rhs   (lhs is the when-one branch)
/// Var:    signal `ref`
/// Const:  value with bit width (0 = unsized) and the radix it was written in
struct Node {
  NodeKind kind = NodeKind::Const;
  OpType op = OpType::Add;
  NodeId lhs = 0;
  NodeId rhs = 0;
  std::uint32_t ref = 0;
  std::uint64_t value = 0;
  std::uint32_t width = 0;
  char base = 'd';
};

enum class SignalKind : std::uint8_t { Input, Output, Wire };

struct Signal {
  std::string name;
  SignalKind kind = SignalKind::Wire;
  std::uint32_t width = 1;
};

struct Assign {
  SignalId target = 0;
  NodeId root = 0;
};

/// A Verilog-subset module: ports, wires and continuous assignments whose
/// right-hand sides are expression trees with key-controlled ternaries.
///
/// Designs produced by the parser, the generators and the lockers are in
/// three-address form: every BinOp operand is a Var or Const. KeyMux branches
/// may hold BinOps, leaves or further KeyMux nodes.
struct Design {
  std::string name = "top";
  std::vector<Signal> signals;
  std::vector<SignalId> port_order;
  std::vector<Assign> assigns;
  std::vector<Node> nodes;
  std::size_t key_length = 0;

  SignalId add_signal(std::string signal_name, SignalKind kind, std::uint32_t width);
  std::optional<SignalId> find_signal(std::string_view signal_name) const;

  NodeId constant(std::uint64_t value, std::uint32_t width = 0, char base = 'd');
  NodeId var(SignalId signal);
  NodeId binop(OpType op, NodeId lhs, NodeId rhs);
  /// Adds a mux on key bit `key_index` and counts it in key_length. Use
  /// key_length as the index to take the next free bit.
  NodeId key_mux(std::uint32_t key_index, NodeId when_one, NodeId when_zero);
  void assign(SignalId target, NodeId root);

  const Node& node(NodeId id) const { return nodes[id]; }
  const Signal& signal(SignalId id) const { return signals[id]; }
};

/// Correct key: bit i drives the mux with key index i.
class Key {
 public:
  Key() = default;
  explicit Key(std::vector<std::uint8_t> bits);

  std::size_t size() const { return bits_.size(); }
  bool empty() const { return bits_.empty(); }
  bool operator[](std::size_t i) const { return bits_[i] != 0; }
  void push_back(bool bit) { bits_.push_back(bit ? 1 : 0); }
  void pop_back() { bits_.pop_back(); }
  std::span<const std::uint8_t> bits() const { return bits_; }

  /// Hex string, most-significant (highest index) bit first.
  std::string to_hex() const;
  static Key from_hex(std::string_view hex, std::size_t length);

  bool operator==(const Key&) const = default;

 private:
  std::vector<std::uint8_t> bits_;
};

/// Concatenation: `low` keeps its indices, `high` is appended after it.
Key concat(const Key& low, const Key& high);

// ---------------------------------------------------------------------------
// Queries and transforms
// ---------------------------------------------------------------------------

/// Number of BinOp nodes of type `op` reachable from the assigns, including
/// dummy operations inside KeyMux branches.
std::size_t count_ops(const Design& design, OpType op);
std::array<std::size_t, kOpTypeCount> op_histogram(const Design& design);
std::size_t total_ops(const Design& design);

/// BinOp nodes in serial order: assigns in declaration order, and within each
/// tree a left-to-right post-order (leftmost-innermost first).
std::vector<NodeId> collect_ops(const Design& design);

/// KeyMux node for every key index (size == key_length).
std::vector<NodeId> collect_key_muxes(const Design& design);

/// Resolves every KeyMux according to `key`. Throws DesignError when the key
/// length differs from the design's key length.
Design apply_key(const Design& design, const Key& key);

/// Tree equality with signals compared by name, ports and wires compared as
/// ordered lists.
bool structural_equal(const Design& a, const Design& b);

/// Throws DesignError describing the first violated invariant.
void validate(const Design& design);

bool is_three_address(const Design& design);

}  // namespace rtllock
