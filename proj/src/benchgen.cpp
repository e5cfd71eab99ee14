#include "rtllock/benchgen.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <optional>

#include "rtllock/error.hpp"
#include "rtllock/random.hpp"

namespace rtllock {

namespace {

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = s.find(sep, start);
    out.push_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) {
      return out;
    }
    start = pos + 1;
  }
}

std::uint64_t parse_uint(std::string_view s, std::string_view what) {
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) {
    throw InputError("bench spec: " + std::string(what) + " '" + std::string(s) + "' is not a non-negative integer");
  }
  return v;
}

OpType parse_op(std::string_view s) {
  const auto op = op_from_name(s);
  if (!op) {
    throw InputError("bench spec: unknown operation '" + std::string(s) + "'");
  }
  return *op;
}

std::vector<std::pair<OpType, double>> parse_mix(std::string_view s) {
  std::vector<std::pair<OpType, double>> mix;
  for (std::string_view item : split(s, ',')) {
    const std::size_t eq = item.find('=');
    if (eq == std::string_view::npos) {
      throw InputError("bench spec: mix entry '" + std::string(item) + "' must look like op=weight");
    }
    const std::string weight(item.substr(eq + 1));
    char* end = nullptr;
    const double w = std::strtod(weight.c_str(), &end);
    if (weight.empty() || *end != '\0' || !std::isfinite(w) || w < 0) {
      throw InputError("bench spec: weight '" + weight + "' is not a non-negative number");
    }
    mix.emplace_back(parse_op(item.substr(0, eq)), w);
  }
  return mix;
}

// Builds a balanced binary reduction tree over op_types.size() + 1 inputs.
// Operation k (in creation order) gets op_types[k]; every operation drives
// its own wire except the root, which drives output y.
Design reduction_tree(const std::vector<OpType>& op_types, std::uint32_t width) {
  Design d;
  const std::size_t n_inputs = op_types.size() + 1;
  std::vector<SignalId> level;
  level.reserve(n_inputs);
  for (std::size_t i = 0; i < n_inputs; ++i) {
    level.push_back(d.add_signal("x" + std::to_string(i), SignalKind::Input, width));
  }
  const SignalId y = d.add_signal("y", SignalKind::Output, width);
  std::size_t created = 0;
  while (level.size() > 1) {
    std::vector<SignalId> next;
    next.reserve(level.size() / 2 + 1);
    for (std::size_t i = 0; i + 1 < level.size(); i += 2) {
      const bool root = created + 1 == op_types.size();
      const SignalId target = root ? y : d.add_signal("n" + std::to_string(created), SignalKind::Wire, width);
      d.assign(target, d.binop(op_types[created], d.var(level[i]), d.var(level[i + 1])));
      next.push_back(target);
      ++created;
    }
    if (level.size() % 2 == 1) {
      next.push_back(level.back());
    }
    level = std::move(next);
  }
  return d;
}

// Random three-address forest. Each operand reuses a not-yet-consumed earlier
// result with probability 1/2, otherwise an input. Results never consumed
// become outputs.
Design random_forest(const std::vector<OpType>& op_types, std::uint32_t width, Rng& rng) {
  struct Pending {
    OpType op;
    std::size_t lhs;  // < n_inputs: input index, otherwise n_inputs + op index
    std::size_t rhs;
  };
  const std::size_t n_ops = op_types.size();
  const std::size_t n_inputs = std::max<std::size_t>(4, n_ops / 8);
  std::vector<Pending> ops;
  ops.reserve(n_ops);
  std::vector<std::size_t> open;  // results not yet used as operands
  std::vector<std::uint8_t> consumed(n_ops, 0);

  auto draw_operand = [&]() -> std::size_t {
    if (!open.empty() && rng.coin()) {
      const std::size_t at = rng.below(open.size());
      const std::size_t r = open[at];
      open[at] = open.back();
      open.pop_back();
      consumed[r] = 1;
      return n_inputs + r;
    }
    return rng.below(n_inputs);
  };
  for (std::size_t k = 0; k < n_ops; ++k) {
    const std::size_t lhs = draw_operand();
    const std::size_t rhs = draw_operand();
    ops.push_back(Pending{op_types[k], lhs, rhs});
    open.push_back(k);
  }

  Design d;
  std::vector<SignalId> sig(n_inputs + n_ops);
  for (std::size_t i = 0; i < n_inputs; ++i) {
    sig[i] = d.add_signal("x" + std::to_string(i), SignalKind::Input, width);
  }
  std::size_t outputs = 0;
  for (std::size_t k = 0; k < n_ops; ++k) {
    if (consumed[k] == 0) {
      sig[n_inputs + k] = d.add_signal("y" + std::to_string(outputs++), SignalKind::Output, width);
    }
  }
  for (std::size_t k = 0; k < n_ops; ++k) {
    if (consumed[k] != 0) {
      sig[n_inputs + k] = d.add_signal("n" + std::to_string(k), SignalKind::Wire, width);
    }
  }
  for (std::size_t k = 0; k < n_ops; ++k) {
    d.assign(sig[n_inputs + k], d.binop(ops[k].op, d.var(sig[ops[k].lhs]), d.var(sig[ops[k].rhs])));
  }
  return d;
}

OpType draw_weighted(const std::vector<std::pair<OpType, double>>& mix, double total, Rng& rng) {
  // 53-bit uniform in [0, total).
  const double u = static_cast<double>(rng.next() >> 11) * 0x1.0p-53 * total;
  double acc = 0.0;
  for (const auto& [op, w] : mix) {
    acc += w;
    if (u < acc) {
      return op;
    }
  }
  for (auto it = mix.rbegin(); it != mix.rend(); ++it) {
    if (it->second > 0) {
      return it->first;
    }
  }
  return mix.back().first;
}

}  // namespace

std::vector<std::pair<OpType, double>> default_op_mix() {
  return {
      {OpType::Add, 32}, {OpType::Sub, 3},    {OpType::Mul, 14}, {OpType::Div, 1.5},
      {OpType::Mod, 0.3}, {OpType::Pow, 1.5}, {OpType::Shl, 11}, {OpType::Shr, 1.2},
      {OpType::And, 11}, {OpType::Or, 1.2},   {OpType::Xor, 9},  {OpType::Xnor, 1},
      {OpType::Lt, 4},   {OpType::Ge, 0.5},   {OpType::Gt, 0.4}, {OpType::Le, 3},
      {OpType::Eq, 5},   {OpType::Ne, 0.6},
  };
}

BenchSpec parse_bench_spec(std::string_view text) {
  const std::vector<std::string_view> parts = split(text, ':');
  const std::string_view kind = parts[0];
  BenchSpec spec;
  if (kind == "imbalanced") {
    spec.kind = BenchKind::Imbalanced;
    if (parts.size() == 2) {
      spec.op_count = parse_uint(parts[1], "operation count");
    } else if (parts.size() == 3) {
      spec.ops.first = parse_op(parts[1]);
      spec.op_count = parse_uint(parts[2], "operation count");
    } else {
      throw InputError("bench spec: expected imbalanced:<op>:<count>");
    }
  } else if (kind == "balanced") {
    spec.kind = BenchKind::Balanced;
    if (parts.size() != 3) {
      throw InputError("bench spec: expected balanced:<op>-<op>:<count>");
    }
    const auto members = split(parts[1], '-');
    if (members.size() != 2) {
      throw InputError("bench spec: '" + std::string(parts[1]) + "' should name two operations as a-b");
    }
    spec.ops = {parse_op(members[0]), parse_op(members[1])};
    spec.op_count = parse_uint(parts[2], "operation count");
  } else if (kind == "random") {
    spec.kind = BenchKind::RandomMixed;
    if (parts.size() < 2 || parts.size() > 4) {
      throw InputError("bench spec: expected random:<count>[:<seed>[:<mix>]]");
    }
    spec.op_count = parse_uint(parts[1], "operation count");
    if (parts.size() >= 3) {
      spec.seed = parse_uint(parts[2], "seed");
    }
    spec.mix = parts.size() == 4 ? parse_mix(parts[3]) : default_op_mix();
  } else if (kind == "counts") {
    spec.kind = BenchKind::Counted;
    if (parts.size() < 2 || parts.size() > 3) {
      throw InputError("bench spec: expected counts:<op>=<n>,...[:<seed>]");
    }
    spec.mix = parse_mix(parts[1]);
    spec.op_count = 0;
    for (const auto& [op, n] : spec.mix) {
      if (n != std::floor(n)) {
        throw InputError("bench spec: count for '" + std::string(op_name(op)) + "' must be an integer");
      }
      spec.op_count += static_cast<std::size_t>(n);
    }
    if (parts.size() == 3) {
      spec.seed = parse_uint(parts[2], "seed");
    }
  } else {
    throw InputError("bench spec: unknown kind '" + std::string(kind) +
                     "' (expected imbalanced, balanced, random or counts)");
  }
  return spec;
}

Design generate(const BenchSpec& spec) {
  if (spec.op_count == 0) {
    throw InputError("bench spec: operation count must be at least 1");
  }
  if (spec.width == 0) {
    throw InputError("bench spec: width must be at least 1");
  }
  Rng rng(spec.seed);
  std::vector<OpType> types;
  Design d;
  switch (spec.kind) {
    case BenchKind::Imbalanced:
      types.assign(spec.op_count, spec.ops.first);
      d = reduction_tree(types, spec.width);
      break;
    case BenchKind::Balanced:
      if (spec.ops.first == spec.ops.second) {
        throw InputError("bench spec: a balanced network needs two different operations");
      }
      for (std::size_t k = 0; k < 2 * spec.op_count; ++k) {
        types.push_back(k % 2 == 0 ? spec.ops.first : spec.ops.second);
      }
      d = reduction_tree(types, spec.width);
      break;
    case BenchKind::RandomMixed: {
      double total = 0.0;
      for (const auto& [op, w] : spec.mix) {
        total += w;
      }
      if (spec.mix.empty() || total <= 0.0) {
        throw InputError("bench spec: operation mix has no positive weight");
      }
      for (std::size_t k = 0; k < spec.op_count; ++k) {
        types.push_back(draw_weighted(spec.mix, total, rng));
      }
      d = random_forest(types, spec.width, rng);
      break;
    }
    case BenchKind::Counted:
      for (const auto& [op, n] : spec.mix) {
        types.insert(types.end(), static_cast<std::size_t>(n), op);
      }
      if (types.size() != spec.op_count) {
        throw InputError("bench spec: counts do not add up to the operation count");
      }
      rng.shuffle(std::span<OpType>(types));
      d = random_forest(types, spec.width, rng);
      break;
  }
  return d;
}

}  // namespace rtllock
