#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace rtllock {

enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,
  kExitInput = 2,
  kExitInvariant = 3,
};

/// Entry point of the `rtllock` tool. `args` excludes the program name.
///
///   bench-gen <spec> -o <out.v>
///   lock <in.v> --algo <name> [--budget <pct> | --budget-bits <n>] --seed <s> -o <out.v>
///        [--key-out <file>] [--trace-out <file>]
///   metric <locked.v> --original <orig.v> [--trace <trace.csv>]
///   attack [--config <cfg.json>] [--benchmark <b>]... [--algorithms a,b] ...
///   validate-pairs <pairs.json>
///   unlock <locked.v> --key <key.hex> -o <out.v>
///
/// Every subcommand accepts --pairs <file> to override the locking pairs.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace rtllock
