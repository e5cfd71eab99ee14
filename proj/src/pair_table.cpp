#include "rtllock/pair_table.hpp"

#include <fstream>
#include <map>
#include <sstream>

#include "json.hpp"
#include "rtllock/error.hpp"

namespace rtllock {

namespace {

constexpr std::array<std::pair<OpType, OpType>, kOpTypeCount / 2> kDefaultPairs = {{
    {OpType::Add, OpType::Sub},
    {OpType::Mul, OpType::Div},
    {OpType::Mod, OpType::Pow},
    {OpType::Shl, OpType::Shr},
    {OpType::And, OpType::Or},
    {OpType::Xor, OpType::Xnor},
    {OpType::Lt, OpType::Ge},
    {OpType::Gt, OpType::Le},
    {OpType::Eq, OpType::Ne},
}};

}  // namespace

PairingSpec default_pairing_spec() {
  PairingSpec spec;
  for (auto [a, b] : kDefaultPairs) {
    spec.partner[index_of(a)] = b;
    spec.partner[index_of(b)] = a;
  }
  for (OpType op : kAllOpTypes) {
    spec.codes[index_of(op)] = static_cast<int>(index_of(op)) + 1;
  }
  return spec;
}

std::vector<PairingFinding> check_pairing(const PairingSpec& spec) {
  std::vector<PairingFinding> findings;
  std::map<int, OpType> code_owner;
  for (OpType op : kAllOpTypes) {
    const std::string name(op_name(op));
    const auto& partner = spec.partner[index_of(op)];
    if (!partner) {
      findings.push_back({PairingIssue::Unpaired, op, name + " has no locking partner"});
    } else if (*partner == op) {
      findings.push_back({PairingIssue::SelfPair, op, name + " is paired with itself"});
    } else {
      const auto& back = spec.partner[index_of(*partner)];
      if (!back || *back != op) {
        const std::string partner_name(op_name(*partner));
        std::string msg = name + " is paired with " + partner_name + ", but " + partner_name;
        msg += back ? " is paired with " + std::string(op_name(*back)) : " has no partner";
        msg += "; a locked (" + name + ", " + partner_name + ") exposes " + name +
               " as the real operation";
        findings.push_back({PairingIssue::Leak, op, std::move(msg)});
      }
    }
    const int code = spec.codes[index_of(op)];
    if (code <= 0) {
      findings.push_back({PairingIssue::InvalidCode, op,
                          name + " has non-positive code " + std::to_string(code) +
                              " (0 is reserved for nested muxes)"});
    } else if (auto [it, inserted] = code_owner.emplace(code, op); !inserted) {
      findings.push_back({PairingIssue::DuplicateCode, op,
                          name + " reuses code " + std::to_string(code) + " of " +
                              std::string(op_name(it->second))});
    }
  }
  return findings;
}

PairingSpec parse_pairing_json(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw InputError(std::string("pair table: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("pairs") || !doc["pairs"].is_object()) {
    throw InputError("pair table: expected an object with a \"pairs\" object");
  }
  auto lookup = [](const std::string& name) {
    auto op = op_from_name(name);
    if (!op) {
      throw InputError("pair table: unknown operation '" + name + "'");
    }
    return *op;
  };
  PairingSpec spec;
  for (OpType op : kAllOpTypes) {
    spec.codes[index_of(op)] = static_cast<int>(index_of(op)) + 1;
  }
  for (const auto& [name, partner] : doc["pairs"].items()) {
    if (!partner.is_string()) {
      throw InputError("pair table: partner of '" + name + "' must be a string");
    }
    spec.partner[index_of(lookup(name))] = lookup(partner.get<std::string>());
  }
  if (doc.contains("codes")) {
    if (!doc["codes"].is_object()) {
      throw InputError("pair table: \"codes\" must be an object");
    }
    for (const auto& [name, code] : doc["codes"].items()) {
      if (!code.is_number_integer()) {
        throw InputError("pair table: code of '" + name + "' must be an integer");
      }
      spec.codes[index_of(lookup(name))] = code.get<int>();
    }
  }
  return spec;
}

PairTable pair_table_from_spec(const PairingSpec& spec) {
  const auto findings = check_pairing(spec);
  if (!findings.empty()) {
    std::string msg = "invalid pair table:";
    for (const auto& f : findings) {
      msg += "\n  " + f.message;
    }
    throw InputError(msg);
  }
  std::array<OpType, kOpTypeCount> partner{};
  for (OpType op : kAllOpTypes) {
    partner[index_of(op)] = *spec.partner[index_of(op)];
  }
  return PairTable::from_partners(partner, spec.codes);
}

PairTable load_pair_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw InputError("cannot read pair table '" + path + "'");
  }
  std::stringstream buf;
  buf << in.rdbuf();
  return pair_table_from_spec(parse_pairing_json(buf.str()));
}

std::string pair_table_to_json(const PairTable& table) {
  nlohmann::ordered_json doc;
  for (OpType op : kAllOpTypes) {
    doc["pairs"][std::string(op_name(op))] = std::string(op_name(table.partner(op)));
  }
  for (OpType op : kAllOpTypes) {
    doc["codes"][std::string(op_name(op))] = table.code(op);
  }
  return doc.dump(2);
}

// ---------------------------------------------------------------------------
// PairTable
// ---------------------------------------------------------------------------

const PairTable& PairTable::defaults() {
  static const PairTable table = pair_table_from_spec(default_pairing_spec());
  return table;
}

PairTable PairTable::from_partners(const std::array<OpType, kOpTypeCount>& partner,
                                   const std::array<int, kOpTypeCount>& codes) {
  PairingSpec spec;
  for (OpType op : kAllOpTypes) {
    spec.partner[index_of(op)] = partner[index_of(op)];
  }
  spec.codes = codes;
  const auto findings = check_pairing(spec);
  if (!findings.empty()) {
    throw InputError("invalid pair table: " + findings.front().message);
  }
  PairTable t;
  t.partner_ = partner;
  t.codes_ = codes;
  // Pairs are ordered by their canonical (lower-valued) member.
  for (OpType op : kAllOpTypes) {
    const OpType other = partner[index_of(op)];
    if (index_of(op) < index_of(other)) {
      t.pair_of_[index_of(op)] = t.pairs_.size();
      t.pair_of_[index_of(other)] = t.pairs_.size();
      t.pairs_.push_back(LockingPair{op, other});
    }
  }
  return t;
}

std::optional<OpType> PairTable::op_for_code(int code) const {
  for (OpType op : kAllOpTypes) {
    if (codes_[index_of(op)] == code) {
      return op;
    }
  }
  return std::nullopt;
}

std::string PairTable::pair_label(std::size_t pair) const {
  const LockingPair& p = pairs_.at(pair);
  return std::string(op_name(p.first)) + "-" + std::string(op_name(p.second));
}

}  // namespace rtllock
