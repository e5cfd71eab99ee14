#include "rtllock/ir.hpp"

#include <algorithm>
#include <unordered_set>

#include "rtllock/error.hpp"

namespace rtllock {

namespace {

struct OpInfo {
  std::string_view name;
  std::string_view symbol;
};

constexpr std::array<OpInfo, kOpTypeCount> kOpInfo = {{
    {"add", "+"},
    {"sub", "-"},
    {"mul", "*"},
    {"div", "/"},
    {"mod", "%"},
    {"pow", "**"},
    {"shl", "<<"},
    {"shr", ">>"},
    {"and", "&"},
    {"or", "|"},
    {"xor", "^"},
    {"xnor", "~^"},
    {"lt", "<"},
    {"gt", ">"},
    {"le", "<="},
    {"ge", ">="},
    {"eq", "=="},
    {"ne", "!="},
}};

}  // namespace

std::string_view op_name(OpType op) { return kOpInfo[index_of(op)].name; }

std::string_view op_symbol(OpType op) { return kOpInfo[index_of(op)].symbol; }

std::optional<OpType> op_from_name(std::string_view name) {
  for (OpType op : kAllOpTypes) {
    if (kOpInfo[index_of(op)].name == name) {
      return op;
    }
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Design builders
// ---------------------------------------------------------------------------

SignalId Design::add_signal(std::string signal_name, SignalKind kind, std::uint32_t width) {
  const auto id = static_cast<SignalId>(signals.size());
  signals.push_back(Signal{std::move(signal_name), kind, width});
  if (kind != SignalKind::Wire) {
    port_order.push_back(id);
  }
  return id;
}

std::optional<SignalId> Design::find_signal(std::string_view signal_name) const {
  for (std::size_t i = 0; i < signals.size(); ++i) {
    if (signals[i].name == signal_name) {
      return static_cast<SignalId>(i);
    }
  }
  return std::nullopt;
}

NodeId Design::constant(std::uint64_t value, std::uint32_t width, char base) {
  Node n;
  n.kind = NodeKind::Const;
  n.value = value;
  n.width = width;
  n.base = base;
  nodes.push_back(n);
  return static_cast<NodeId>(nodes.size() - 1);
}

NodeId Design::var(SignalId signal) {
  Node n;
  n.kind = NodeKind::Var;
  n.ref = signal;
  nodes.push_back(n);
  return static_cast<NodeId>(nodes.size() - 1);
}

NodeId Design::binop(OpType op, NodeId lhs, NodeId rhs) {
  Node n;
  n.kind = NodeKind::BinOp;
  n.op = op;
  n.lhs = lhs;
  n.rhs = rhs;
  nodes.push_back(n);
  return static_cast<NodeId>(nodes.size() - 1);
}

NodeId Design::key_mux(std::uint32_t key_index, NodeId when_one, NodeId when_zero) {
  Node n;
  n.kind = NodeKind::KeyMux;
  n.ref = key_index;
  n.lhs = when_one;
  n.rhs = when_zero;
  nodes.push_back(n);
  ++key_length;
  return static_cast<NodeId>(nodes.size() - 1);
}

void Design::assign(SignalId target, NodeId root) { assigns.push_back(Assign{target, root}); }

// ---------------------------------------------------------------------------
// Key
// ---------------------------------------------------------------------------

Key::Key(std::vector<std::uint8_t> bits) : bits_(std::move(bits)) {
  for (auto& b : bits_) {
    b = b != 0 ? 1 : 0;
  }
}

std::string Key::to_hex() const {
  static constexpr char kDigits[] = "0123456789abcdef";
  const std::size_t nibbles = (bits_.size() + 3) / 4;
  std::string out;
  out.reserve(nibbles);
  for (std::size_t n = nibbles; n-- > 0;) {
    unsigned v = 0;
    for (std::size_t b = 4; b-- > 0;) {
      const std::size_t i = n * 4 + b;
      v = (v << 1) | (i < bits_.size() ? bits_[i] : 0U);
    }
    out.push_back(kDigits[v]);
  }
  return out;
}

Key Key::from_hex(std::string_view hex, std::size_t length) {
  const std::size_t nibbles = (length + 3) / 4;
  if (hex.size() != nibbles) {
    throw InputError("key hex string has " + std::to_string(hex.size()) + " digits, expected " +
                     std::to_string(nibbles) + " for " + std::to_string(length) + " bits");
  }
  std::vector<std::uint8_t> bits(length, 0);
  for (std::size_t pos = 0; pos < hex.size(); ++pos) {
    const char c = hex[pos];
    unsigned v = 0;
    if (c >= '0' && c <= '9') {
      v = static_cast<unsigned>(c - '0');
    } else if (c >= 'a' && c <= 'f') {
      v = static_cast<unsigned>(c - 'a' + 10);
    } else if (c >= 'A' && c <= 'F') {
      v = static_cast<unsigned>(c - 'A' + 10);
    } else {
      throw InputError(std::string("invalid hex digit '") + c + "' in key");
    }
    const std::size_t n = nibbles - 1 - pos;
    for (std::size_t b = 0; b < 4; ++b) {
      const std::size_t i = n * 4 + b;
      const bool set = ((v >> b) & 1U) != 0;
      if (i < length) {
        bits[i] = set ? 1 : 0;
      } else if (set) {
        throw InputError("key hex string sets bits beyond its length");
      }
    }
  }
  return Key(std::move(bits));
}

Key concat(const Key& low, const Key& high) {
  std::vector<std::uint8_t> bits(low.bits().begin(), low.bits().end());
  bits.insert(bits.end(), high.bits().begin(), high.bits().end());
  return Key(std::move(bits));
}

// ---------------------------------------------------------------------------
// Queries
// ---------------------------------------------------------------------------

namespace {

template <class Visit>
void visit_tree(const Design& d, NodeId root, Visit&& visit) {
  // Explicit stack: mux nesting from repeated relocking can get deep.
  std::vector<NodeId> stack{root};
  while (!stack.empty()) {
    const NodeId id = stack.back();
    stack.pop_back();
    const Node& n = d.nodes[id];
    visit(id, n);
    if (n.kind == NodeKind::BinOp || n.kind == NodeKind::KeyMux) {
      stack.push_back(n.rhs);
      stack.push_back(n.lhs);
    }
  }
}

template <class Visit>
void visit_all(const Design& d, Visit&& visit) {
  for (const Assign& a : d.assigns) {
    visit_tree(d, a.root, visit);
  }
}

void collect_post_order(const Design& d, NodeId id, std::vector<NodeId>& out) {
  const Node& n = d.nodes[id];
  if (n.kind == NodeKind::BinOp || n.kind == NodeKind::KeyMux) {
    collect_post_order(d, n.lhs, out);
    collect_post_order(d, n.rhs, out);
  }
  if (n.kind == NodeKind::BinOp) {
    out.push_back(id);
  }
}

}  // namespace

std::size_t count_ops(const Design& design, OpType op) {
  std::size_t count = 0;
  visit_all(design, [&](NodeId, const Node& n) {
    if (n.kind == NodeKind::BinOp && n.op == op) {
      ++count;
    }
  });
  return count;
}

std::array<std::size_t, kOpTypeCount> op_histogram(const Design& design) {
  std::array<std::size_t, kOpTypeCount> hist{};
  visit_all(design, [&](NodeId, const Node& n) {
    if (n.kind == NodeKind::BinOp) {
      ++hist[index_of(n.op)];
    }
  });
  return hist;
}

std::size_t total_ops(const Design& design) {
  const auto hist = op_histogram(design);
  std::size_t total = 0;
  for (auto c : hist) {
    total += c;
  }
  return total;
}

std::vector<NodeId> collect_ops(const Design& design) {
  std::vector<NodeId> out;
  for (const Assign& a : design.assigns) {
    collect_post_order(design, a.root, out);
  }
  return out;
}

std::vector<NodeId> collect_key_muxes(const Design& design) {
  std::vector<NodeId> muxes(design.key_length, 0);
  std::vector<std::uint8_t> seen(design.key_length, 0);
  visit_all(design, [&](NodeId id, const Node& n) {
    if (n.kind != NodeKind::KeyMux) {
      return;
    }
    if (n.ref >= design.key_length || seen[n.ref] != 0) {
      throw DesignError("key index " + std::to_string(n.ref) +
                        " is out of range or used by more than one mux");
    }
    seen[n.ref] = 1;
    muxes[n.ref] = id;
  });
  for (std::size_t i = 0; i < seen.size(); ++i) {
    if (seen[i] == 0) {
      throw DesignError("key bit " + std::to_string(i) + " drives no mux");
    }
  }
  return muxes;
}

// ---------------------------------------------------------------------------
// apply_key
// ---------------------------------------------------------------------------

namespace {

NodeId copy_resolved(const Design& src, NodeId id, const Key& key, Design& dst) {
  for (;;) {
    const Node& n = src.nodes[id];
    if (n.kind != NodeKind::KeyMux) {
      break;
    }
    id = key[n.ref] ? n.lhs : n.rhs;
  }
  const Node& n = src.nodes[id];
  switch (n.kind) {
    case NodeKind::BinOp: {
      const NodeId l = copy_resolved(src, n.lhs, key, dst);
      const NodeId r = copy_resolved(src, n.rhs, key, dst);
      return dst.binop(n.op, l, r);
    }
    case NodeKind::Var:
      return dst.var(n.ref);
    case NodeKind::Const:
      return dst.constant(n.value, n.width, n.base);
    case NodeKind::KeyMux:
      break;
  }
  return 0;  // unreachable
}

}  // namespace

Design apply_key(const Design& design, const Key& key) {
  if (key.size() != design.key_length) {
    throw DesignError("key has " + std::to_string(key.size()) + " bits but the design expects " +
                      std::to_string(design.key_length));
  }
  Design out;
  out.name = design.name;
  out.signals = design.signals;
  out.port_order = design.port_order;
  out.nodes.reserve(design.nodes.size());
  for (const Assign& a : design.assigns) {
    const NodeId root = copy_resolved(design, a.root, key, out);
    out.assign(a.target, root);
  }
  return out;
}

// ---------------------------------------------------------------------------
// structural_equal
// ---------------------------------------------------------------------------

namespace {

bool tree_equal(const Design& a, NodeId ia, const Design& b, NodeId ib) {
  const Node& x = a.nodes[ia];
  const Node& y = b.nodes[ib];
  if (x.kind != y.kind) {
    return false;
  }
  switch (x.kind) {
    case NodeKind::Const:
      return x.value == y.value && x.width == y.width;
    case NodeKind::Var:
      return a.signals[x.ref].name == b.signals[y.ref].name;
    case NodeKind::BinOp:
      return x.op == y.op && tree_equal(a, x.lhs, b, y.lhs) && tree_equal(a, x.rhs, b, y.rhs);
    case NodeKind::KeyMux:
      return x.ref == y.ref && tree_equal(a, x.lhs, b, y.lhs) && tree_equal(a, x.rhs, b, y.rhs);
  }
  return false;
}

bool signal_equal(const Signal& x, const Signal& y) {
  return x.name == y.name && x.kind == y.kind && x.width == y.width;
}

std::vector<const Signal*> wires_of(const Design& d) {
  std::vector<const Signal*> out;
  for (const Signal& s : d.signals) {
    if (s.kind == SignalKind::Wire) {
      out.push_back(&s);
    }
  }
  return out;
}

}  // namespace

bool structural_equal(const Design& a, const Design& b) {
  if (a.name != b.name || a.key_length != b.key_length || a.assigns.size() != b.assigns.size() ||
      a.port_order.size() != b.port_order.size()) {
    return false;
  }
  for (std::size_t i = 0; i < a.port_order.size(); ++i) {
    if (!signal_equal(a.signals[a.port_order[i]], b.signals[b.port_order[i]])) {
      return false;
    }
  }
  const auto wa = wires_of(a);
  const auto wb = wires_of(b);
  if (wa.size() != wb.size()) {
    return false;
  }
  for (std::size_t i = 0; i < wa.size(); ++i) {
    if (!signal_equal(*wa[i], *wb[i])) {
      return false;
    }
  }
  for (std::size_t i = 0; i < a.assigns.size(); ++i) {
    const Assign& x = a.assigns[i];
    const Assign& y = b.assigns[i];
    if (a.signals[x.target].name != b.signals[y.target].name ||
        !tree_equal(a, x.root, b, y.root)) {
      return false;
    }
  }
  return true;
}

// ---------------------------------------------------------------------------
// validate
// ---------------------------------------------------------------------------

void validate(const Design& design) {
  std::unordered_set<std::string_view> names;
  for (const Signal& s : design.signals) {
    if (!names.insert(s.name).second) {
      throw DesignError("signal '" + s.name + "' declared twice");
    }
    if (s.width == 0) {
      throw DesignError("signal '" + s.name + "' has zero width");
    }
  }
  for (SignalId p : design.port_order) {
    if (p >= design.signals.size() || design.signals[p].kind == SignalKind::Wire) {
      throw DesignError("port list refers to a non-port signal");
    }
  }
  // Each node reachable at most once keeps the trees acyclic. Leaves may be
  // shared between a real operation and its dummy.
  std::vector<std::uint8_t> seen(design.nodes.size(), 0);
  for (const Assign& a : design.assigns) {
    if (a.target >= design.signals.size()) {
      throw DesignError("assign targets an undeclared signal");
    }
    if (design.signals[a.target].kind == SignalKind::Input) {
      throw DesignError("assign drives input '" + design.signals[a.target].name + "'");
    }
    std::vector<NodeId> stack{a.root};
    while (!stack.empty()) {
      const NodeId id = stack.back();
      stack.pop_back();
      if (id >= design.nodes.size()) {
        throw DesignError("dangling node reference");
      }
      const Node& n = design.nodes[id];
      if (n.kind == NodeKind::BinOp || n.kind == NodeKind::KeyMux) {
        if (seen[id] != 0) {
          throw DesignError("expression node reached twice (cycle or shared subtree)");
        }
        seen[id] = 1;
        stack.push_back(n.lhs);
        stack.push_back(n.rhs);
      } else if (n.kind == NodeKind::Var && n.ref >= design.signals.size()) {
        throw DesignError("variable refers to an undeclared signal");
      }
    }
  }
  collect_key_muxes(design);
}

bool is_three_address(const Design& design) {
  bool ok = true;
  visit_all(design, [&](NodeId, const Node& n) {
    if (n.kind != NodeKind::BinOp) {
      return;
    }
    for (NodeId child : {n.lhs, n.rhs}) {
      const NodeKind k = design.nodes[child].kind;
      if (k != NodeKind::Var && k != NodeKind::Const) {
        ok = false;
      }
    }
  });
  return ok;
}

}  // namespace rtllock
