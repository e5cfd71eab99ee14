#include "rtllock/odt.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "json.hpp"

namespace rtllock {

std::int64_t DistributionTable::at(OpType op, const PairTable& pairs) const {
  const std::int64_t v = entries[pairs.pair_index(op)];
  return pairs.is_first(op) ? v : -v;
}

bool DistributionTable::all_affected() const {
  return std::all_of(affected.begin(), affected.end(), [](std::uint8_t a) { return a != 0; });
}

DistributionTable build_odt(const Design& design, const PairTable& pairs) {
  DistributionTable odt;
  odt.entries.assign(pairs.pair_count(), 0);
  odt.affected.assign(pairs.pair_count(), 0);
  const auto hist = op_histogram(design);
  for (std::size_t p = 0; p < pairs.pair_count(); ++p) {
    const LockingPair& pair = pairs.pairs()[p];
    odt.entries[p] = static_cast<std::int64_t>(hist[index_of(pair.first)]) -
                     static_cast<std::int64_t>(hist[index_of(pair.second)]);
  }
  for (NodeId mux : collect_key_muxes(design)) {
    const Node& m = design.nodes[mux];
    for (NodeId branch : {m.lhs, m.rhs}) {
      const Node& b = design.nodes[branch];
      if (b.kind == NodeKind::BinOp) {
        odt.affected[pairs.pair_index(b.op)] = 1;
      }
    }
  }
  return odt;
}

DistributionVector DistributionVector::from_odt(const DistributionTable& odt) {
  DistributionVector v;
  v.values.reserve(odt.entries.size());
  for (std::int64_t e : odt.entries) {
    v.values.push_back(static_cast<std::uint64_t>(e < 0 ? -e : e));
  }
  v.mask.assign(odt.entries.size(), 1);
  return v;
}

DistributionVector DistributionVector::optimum(std::size_t pairs) {
  DistributionVector v;
  v.values.assign(pairs, 0);
  v.mask.assign(pairs, 1);
  return v;
}

DistributionVector DistributionVector::optimum(const DistributionTable& restrict_to) {
  DistributionVector v;
  v.values.assign(restrict_to.affected.size(), 0);
  v.mask = restrict_to.affected;
  return v;
}

double distance(const DistributionVector& v, const DistributionVector& target) {
  if (v.values.size() != target.values.size() || target.mask.size() != target.values.size()) {
    throw std::invalid_argument("distance: vectors have different lengths");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < target.values.size(); ++i) {
    if (target.mask[i] != 0) {
      const double d = static_cast<double>(target.values[i]) - static_cast<double>(v.values[i]);
      sum += d * d;
    }
  }
  return std::sqrt(sum);
}

double security_score(double initial_distance, double current_distance) {
  if (initial_distance == 0.0) {
    return current_distance == 0.0 ? 100.0 : 0.0;
  }
  const double m = 100.0 * (1.0 - current_distance / initial_distance);
  return std::clamp(m, 0.0, 100.0);
}

MetricReport metric(const DistributionVector& initial, const DistributionVector& current,
                    const DistributionTable& odt) {
  const auto global_target = DistributionVector::optimum(initial.values.size());
  const auto restricted_target = DistributionVector::optimum(odt);
  MetricReport r;
  r.initial_distance = distance(initial, global_target);
  r.current_distance_global = distance(current, global_target);
  r.current_distance_restricted = distance(current, restricted_target);
  r.global = security_score(r.initial_distance, r.current_distance_global);
  r.restricted = security_score(distance(initial, restricted_target), r.current_distance_restricted);
  return r;
}

MetricReport metric(const Design& original, const Design& locked, const PairTable& pairs) {
  const auto initial = DistributionVector::from_odt(build_odt(original, pairs));
  const auto odt = build_odt(locked, pairs);
  return metric(initial, DistributionVector::from_odt(odt), odt);
}

std::string MetricReport::to_json() const {
  auto round2 = [](double v) { return std::round(v * 100.0) / 100.0; };
  nlohmann::ordered_json doc;
  doc["global"] = round2(global);
  doc["restricted"] = round2(restricted);
  doc["initialDistance"] = round2(initial_distance);
  doc["currentDistanceGlobal"] = round2(current_distance_global);
  doc["currentDistanceRestricted"] = round2(current_distance_restricted);
  return doc.dump(2);
}

}  // namespace rtllock
