#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rtllock/ir.hpp"

namespace rtllock {

enum class PairingIssue {
  SelfPair,       // T -> T
  Unpaired,       // T has no partner entry
  Leak,           // T -> U but U -> V with V != T
  DuplicateCode,  // two types share an id-code
  InvalidCode,    // non-positive id-code
};

struct PairingFinding {
  PairingIssue issue;
  OpType op;
  std::string message;
};

/// Partner map and codes as written in an override file, before validation.
struct PairingSpec {
  std::array<std::optional<OpType>, kOpTypeCount> partner{};
  std::array<int, kOpTypeCount> codes{};
};

/// Checks involution and code uniqueness. A type whose partner pairs back to
/// someone else is reported as a leak: seeing the locked pair (T, U) reveals
/// T as the real operation because (U, T) can never be produced.
std::vector<PairingFinding> check_pairing(const PairingSpec& spec);

PairingSpec default_pairing_spec();

/// Parses the JSON override format:
///   {"pairs": {"add": "sub", "sub": "add", ...}, "codes": {"add": 1, ...}}
/// "codes" is optional and defaults to declaration order starting at 1.
/// Throws InputError on malformed JSON or unknown operation names.
PairingSpec parse_pairing_json(std::string_view text);

/// Loads and validates an override file; throws InputError listing findings.
PairTable load_pair_table(const std::string& path);
PairTable pair_table_from_spec(const PairingSpec& spec);

std::string pair_table_to_json(const PairTable& table);

}  // namespace rtllock
