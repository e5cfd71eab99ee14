#include "rtllock/attack.hpp"

#include <cmath>
#include <cstdio>

#include "json.hpp"
#include "rtllock/error.hpp"
#include "rtllock/random.hpp"

namespace rtllock {

namespace {

int branch_code(const Design& design, NodeId branch, const PairTable& pairs) {
  const Node& n = design.nodes[branch];
  return n.kind == NodeKind::BinOp ? pairs.code(n.op) : 0;
}

std::string code_label(int code, const PairTable& pairs) {
  if (code == 0) {
    return "nested";
  }
  const auto op = pairs.op_for_code(code);
  return op ? std::string(op_name(*op)) : std::to_string(code);
}

}  // namespace

std::vector<Locality> extract_localities(const Design& design, const PairTable& pairs) {
  const std::vector<NodeId> muxes = collect_key_muxes(design);
  std::vector<Locality> out;
  out.reserve(muxes.size());
  for (std::size_t i = 0; i < muxes.size(); ++i) {
    const Node& m = design.nodes[muxes[i]];
    out.push_back(Locality{i, branch_code(design, m.lhs, pairs), branch_code(design, m.rhs, pairs)});
  }
  return out;
}

void ObservationTable::add(Cell cell, bool key_bit, std::uint64_t n) {
  CellCounts& c = cells_[cell];
  (key_bit ? c.one : c.zero) += n;
  total_ += n;
}

void ObservationTable::merge(const ObservationTable& other) {
  for (const auto& [cell, counts] : other.cells_) {
    CellCounts& c = cells_[cell];
    c.zero += counts.zero;
    c.one += counts.one;
  }
  total_ += other.total_;
}

const CellCounts* ObservationTable::find(Cell cell) const {
  const auto it = cells_.find(cell);
  return it == cells_.end() ? nullptr : &it->second;
}

std::string ObservationTable::to_json(const PairTable& pairs) const {
  nlohmann::ordered_json doc;
  doc["total"] = total_;
  auto arr = nlohmann::ordered_json::array();
  for (const auto& [cell, counts] : cells_) {
    nlohmann::ordered_json c;
    c["c1"] = cell.first;
    c["c2"] = cell.second;
    c["label"] = code_label(cell.first, pairs) + "," + code_label(cell.second, pairs);
    c["key0"] = counts.zero;
    c["key1"] = counts.one;
    arr.push_back(std::move(c));
  }
  doc["cells"] = std::move(arr);
  return doc.dump(2);
}

void train_into(ObservationTable& table, const Design& design, const Key& key, const PairTable& pairs) {
  if (key.size() > design.key_length) {
    throw InputError("training key has " + std::to_string(key.size()) + " bits but the design has only " +
                     std::to_string(design.key_length));
  }
  const std::size_t offset = design.key_length - key.size();
  const std::vector<Locality> localities = extract_localities(design, pairs);
  for (std::size_t i = 0; i < key.size(); ++i) {
    const Locality& l = localities[offset + i];
    table.add({l.c1, l.c2}, key[i]);
  }
}

ObservationTable train(std::span<const RelockedSample> training, const PairTable& pairs) {
  ObservationTable table;
  for (const RelockedSample& s : training) {
    train_into(table, s.design, s.key, pairs);
  }
  return table;
}

std::string_view decision_basis_name(DecisionBasis basis) {
  switch (basis) {
    case DecisionBasis::Majority: return "majority";
    case DecisionBasis::Tie: return "tie";
    case DecisionBasis::Unseen: return "unseen";
  }
  return "?";
}

AttackReport predict(const ObservationTable& table, const Design& target, std::uint64_t seed,
                     const PairTable& pairs, ClassifierOptions options) {
  Rng rng(seed);
  AttackReport report;
  for (const Locality& l : extract_localities(target, pairs)) {
    BitPrediction p;
    p.locality = l;
    const CellCounts* c = table.find({l.c1, l.c2});
    const double n = c ? static_cast<double>(c->total()) : 0.0;
    const double margin = c ? std::fabs(static_cast<double>(c->one) - static_cast<double>(c->zero)) : 0.0;
    if (c == nullptr || c->total() == 0) {
      p.basis = DecisionBasis::Unseen;
      p.bit = rng.coin();
    } else if (margin == 0.0 || margin <= options.min_z * std::sqrt(n)) {
      p.basis = DecisionBasis::Tie;
      p.bit = rng.coin();
    } else {
      p.basis = DecisionBasis::Majority;
      p.bit = c->one > c->zero;
      p.confidence = static_cast<double>(std::max(c->one, c->zero)) / n;
    }
    report.bits.push_back(p);
  }
  return report;
}

AttackReport predict(const ObservationTable& table, const Design& target, std::uint64_t seed,
                     const Key& truth, const PairTable& pairs, ClassifierOptions options) {
  AttackReport report = predict(table, target, seed, pairs, options);
  report.kpa = kpa(report.predicted_bits(), truth);
  return report;
}

double kpa(std::span<const std::uint8_t> predicted, const Key& truth) {
  if (predicted.size() != truth.size()) {
    throw InputError("kpa: predicted key has " + std::to_string(predicted.size()) +
                     " bits, ground truth has " + std::to_string(truth.size()));
  }
  if (truth.empty()) {
    return 100.0;
  }
  std::size_t hits = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    hits += (predicted[i] != 0) == truth[i] ? 1 : 0;
  }
  return 100.0 * static_cast<double>(hits) / static_cast<double>(truth.size());
}

std::vector<std::uint8_t> AttackReport::predicted_bits() const {
  std::vector<std::uint8_t> out;
  out.reserve(bits.size());
  for (const BitPrediction& b : bits) {
    out.push_back(b.bit ? 1 : 0);
  }
  return out;
}

Key AttackReport::predicted_key() const { return Key(predicted_bits()); }

std::string AttackReport::to_json(const PairTable& pairs) const {
  nlohmann::ordered_json doc;
  doc["keyLength"] = bits.size();
  doc["predictedKey"] = predicted_key().to_hex();
  if (kpa) {
    doc["kpa"] = *kpa;
  } else {
    doc["kpa"] = nullptr;
  }
  auto arr = nlohmann::ordered_json::array();
  for (const BitPrediction& b : bits) {
    nlohmann::ordered_json e;
    e["index"] = b.locality.key_index;
    e["c1"] = code_label(b.locality.c1, pairs);
    e["c2"] = code_label(b.locality.c2, pairs);
    e["bit"] = b.bit ? 1 : 0;
    e["confidence"] = b.confidence;
    e["basis"] = decision_basis_name(b.basis);
    arr.push_back(std::move(e));
  }
  doc["bits"] = std::move(arr);
  return doc.dump(2);
}

std::string AttackReport::csv_line(std::string_view benchmark, std::string_view algorithm,
                                   std::uint64_t seed) const {
  std::string line = std::string(benchmark) + "," + std::string(algorithm) + "," + std::to_string(seed) + ",";
  if (kpa) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4f", *kpa);
    line += buf;
  }
  return line;
}

}  // namespace rtllock
