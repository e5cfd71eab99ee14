#pragma once

#include <cstddef>
#include <string>
#include <string_view>

#include "rtllock/error.hpp"
#include "rtllock/ir.hpp"

namespace rtllock {

/// Name of the key input port. Key bits appear as lock_key[i].
inline constexpr std::string_view kKeyPortName = "lock_key";

struct SourceSpan {
  std::size_t line = 1;
  std::size_t column = 1;
};

class ParseError : public Error {
 public:
  ParseError(SourceSpan span, const std::string& message, const std::string& file = {})
      : Error((file.empty() ? "" : file + ":") + std::to_string(span.line) + ":" +
              std::to_string(span.column) + ": " + message),
        span_(span), message_(message) {}

  SourceSpan span() const { return span_; }
  const std::string& message() const { return message_; }
  ParseError in_file(const std::string& file) const { return ParseError(span_, message_, file); }

 private:
  SourceSpan span_;
  std::string message_;
};

/// Parses one module of the supported subset:
///
///   module m(a, b, y[, lock_key]);
///     input [7:0] a, b;  output [7:0] y;  wire [7:0] t;
///     input [K-1:0] lock_key;
///     assign y = lock_key[0] ? (a + b) : (a - b);
///   endmodule
///
/// Right-hand sides use identifiers, constants, parentheses, the 18 binary
/// operators and ternaries conditioned on a single lock_key bit. Operands that
/// are themselves expressions are hoisted into fresh wires, named `_h<n>`, so
/// the result is in three-address form. Anything else is a ParseError.
Design parse_verilog(std::string_view text);

/// Deterministic text: port declarations in header order, the key port, then
/// wires in declaration order, one assign per line, binary expressions fully
/// parenthesized.
std::string emit_verilog(const Design& design);

Design read_verilog_file(const std::string& path);
void write_text_file(const std::string& path, std::string_view text);

}  // namespace rtllock
