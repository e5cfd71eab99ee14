#include "rtllock/verilog.hpp"

#include <cctype>
#include <fstream>
#include <memory>
#include <optional>
#include <sstream>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace rtllock {

namespace {

// ---------------------------------------------------------------------------
// Lexer
// ---------------------------------------------------------------------------

enum class Tok { Ident, Number, Punct, End };

struct Token {
  Tok kind = Tok::End;
  std::string text;
  SourceSpan span;
};

bool is_ident_start(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_';
}

bool is_ident_char(char c) { return is_ident_start(c) || (c >= '0' && c <= '9') || c == '$'; }

bool is_digit(char c) { return c >= '0' && c <= '9'; }

class Lexer {
 public:
  explicit Lexer(std::string_view text) : text_(text) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    for (;;) {
      skip_space_and_comments();
      Token t;
      t.span = here();
      if (pos_ >= text_.size()) {
        out.push_back(t);
        return out;
      }
      const char c = text_[pos_];
      if (is_ident_start(c)) {
        t.kind = Tok::Ident;
        while (pos_ < text_.size() && is_ident_char(text_[pos_])) {
          t.text.push_back(text_[pos_]);
          advance();
        }
      } else if (is_digit(c) || c == '\'') {
        t.kind = Tok::Number;
        lex_number(t);
      } else {
        t.kind = Tok::Punct;
        t.text = lex_punct(t.span);
      }
      out.push_back(std::move(t));
    }
  }

 private:
  SourceSpan here() const { return SourceSpan{line_, column_}; }

  void advance() {
    if (text_[pos_] == '\n') {
      ++line_;
      column_ = 1;
    } else {
      ++column_;
    }
    ++pos_;
  }

  bool starts_with(std::string_view s) const { return text_.substr(pos_, s.size()) == s; }

  void skip_space_and_comments() {
    while (pos_ < text_.size()) {
      const char c = text_[pos_];
      if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
        advance();
      } else if (starts_with("//")) {
        while (pos_ < text_.size() && text_[pos_] != '\n') {
          advance();
        }
      } else if (starts_with("/*")) {
        const SourceSpan start = here();
        advance();
        advance();
        while (pos_ < text_.size() && !starts_with("*/")) {
          advance();
        }
        if (pos_ >= text_.size()) {
          throw ParseError(start, "unterminated block comment");
        }
        advance();
        advance();
      } else {
        return;
      }
    }
  }

  void lex_number(Token& t) {
    while (pos_ < text_.size() && (is_digit(text_[pos_]) || text_[pos_] == '_')) {
      t.text.push_back(text_[pos_]);
      advance();
    }
    if (pos_ < text_.size() && text_[pos_] == '\'') {
      t.text.push_back('\'');
      advance();
      if (pos_ < text_.size() && (text_[pos_] == 's' || text_[pos_] == 'S')) {
        throw ParseError(here(), "signed constants are not supported");
      }
      if (pos_ >= text_.size()) {
        throw ParseError(t.span, "truncated based constant");
      }
      t.text.push_back(text_[pos_]);
      advance();
      while (pos_ < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) != 0 ||
                                     text_[pos_] == '_')) {
        t.text.push_back(text_[pos_]);
        advance();
      }
    }
  }

  std::string lex_punct(SourceSpan span) {
    static constexpr std::string_view kTwo[] = {"**", "<<", ">>", "<=", ">=",
                                                "==", "!=", "~^", "^~"};
    for (std::string_view p : kTwo) {
      if (starts_with(p)) {
        advance();
        advance();
        // <<<, >>>, ===, !== are outside the subset.
        if (pos_ < text_.size() && (text_[pos_] == '<' || text_[pos_] == '>' || text_[pos_] == '=')) {
          throw ParseError(span, "unsupported operator '" + std::string(p) + text_[pos_] + "'");
        }
        return std::string(p);
      }
    }
    static constexpr std::string_view kOne = "+-*/%&|^<>?:()[];,=~!@";
    const char c = text_[pos_];
    if (kOne.find(c) == std::string_view::npos) {
      throw ParseError(span, std::string("unexpected character '") + c + "'");
    }
    advance();
    return std::string(1, c);
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t column_ = 1;
};

// ---------------------------------------------------------------------------
// Syntax tree
// ---------------------------------------------------------------------------

struct PExpr {
  enum class Kind { Const, Ident, KeyBit, Bin, Ternary };
  Kind kind = Kind::Const;
  SourceSpan span;
  std::string name;
  std::uint64_t value = 0;
  std::uint32_t width = 0;
  char base = 'd';
  OpType op = OpType::Add;
  std::uint32_t key_index = 0;
  std::unique_ptr<PExpr> a;
  std::unique_ptr<PExpr> b;
};

using PExprPtr = std::unique_ptr<PExpr>;

struct PDecl {
  std::string name;
  SignalKind kind;
  std::uint32_t width;
  SourceSpan span;
};

struct PAssign {
  std::string target;
  SourceSpan span;
  PExprPtr rhs;
};

struct PModule {
  std::string name;
  std::vector<std::pair<std::string, SourceSpan>> header;
  std::vector<PDecl> decls;
  std::vector<PAssign> assigns;
};

struct BinaryOpInfo {
  OpType op;
  int precedence;
};

std::optional<BinaryOpInfo> binary_op(std::string_view tok) {
  static const std::unordered_map<std::string_view, BinaryOpInfo> kOps = {
      {"**", {OpType::Pow, 10}}, {"*", {OpType::Mul, 9}},  {"/", {OpType::Div, 9}},
      {"%", {OpType::Mod, 9}},   {"+", {OpType::Add, 8}},  {"-", {OpType::Sub, 8}},
      {"<<", {OpType::Shl, 7}},  {">>", {OpType::Shr, 7}}, {"<", {OpType::Lt, 6}},
      {"<=", {OpType::Le, 6}},   {">", {OpType::Gt, 6}},   {">=", {OpType::Ge, 6}},
      {"==", {OpType::Eq, 5}},   {"!=", {OpType::Ne, 5}},  {"&", {OpType::And, 4}},
      {"^", {OpType::Xor, 3}},   {"~^", {OpType::Xnor, 3}}, {"^~", {OpType::Xnor, 3}},
      {"|", {OpType::Or, 2}},
  };
  auto it = kOps.find(tok);
  if (it == kOps.end()) {
    return std::nullopt;
  }
  return it->second;
}

std::uint64_t parse_digits(std::string_view digits, unsigned radix, SourceSpan span) {
  std::uint64_t value = 0;
  bool any = false;
  for (char ch : digits) {
    if (ch == '_') {
      continue;
    }
    unsigned d = 0;
    if (ch >= '0' && ch <= '9') {
      d = static_cast<unsigned>(ch - '0');
    } else if (ch >= 'a' && ch <= 'f') {
      d = static_cast<unsigned>(ch - 'a' + 10);
    } else if (ch >= 'A' && ch <= 'F') {
      d = static_cast<unsigned>(ch - 'A' + 10);
    } else {
      throw ParseError(span, std::string("invalid digit '") + ch + "' in constant");
    }
    if (d >= radix) {
      throw ParseError(span, std::string("digit '") + ch + "' out of range for the constant's base");
    }
    if (value > (UINT64_MAX - d) / radix) {
      throw ParseError(span, "constant does not fit in 64 bits");
    }
    value = value * radix + d;
    any = true;
  }
  if (!any) {
    throw ParseError(span, "constant has no digits");
  }
  return value;
}

// ---------------------------------------------------------------------------
// Parser
// ---------------------------------------------------------------------------

class Parser {
 public:
  explicit Parser(std::vector<Token> tokens) : toks_(std::move(tokens)) {}

  PModule parse_module() {
    PModule m;
    expect_keyword("module");
    m.name = expect_ident("module name").text;
    expect("(");
    if (!peek_is(")")) {
      for (;;) {
        const Token& t = expect_ident("port name");
        m.header.emplace_back(t.text, t.span);
        if (!accept(",")) {
          break;
        }
      }
    }
    expect(")");
    expect(";");
    for (;;) {
      const Token& t = peek();
      if (t.kind == Tok::End) {
        throw ParseError(t.span, "missing 'endmodule'");
      }
      if (t.kind != Tok::Ident) {
        throw ParseError(t.span, "expected a declaration, 'assign' or 'endmodule'");
      }
      if (t.text == "endmodule") {
        next();
        break;
      }
      if (t.text == "input" || t.text == "output" || t.text == "wire") {
        parse_decl(m);
      } else if (t.text == "assign") {
        parse_assign(m);
      } else {
        throw ParseError(t.span, "unsupported construct '" + t.text + "'");
      }
    }
    if (peek().kind != Tok::End) {
      throw ParseError(peek().span, "only one module per file is supported");
    }
    return m;
  }

 private:
  const Token& peek() const { return toks_[pos_]; }
  const Token& next() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }

  bool peek_is(std::string_view punct) const {
    return peek().kind == Tok::Punct && peek().text == punct;
  }

  bool accept(std::string_view punct) {
    if (peek_is(punct)) {
      next();
      return true;
    }
    return false;
  }

  void expect(std::string_view punct) {
    if (!accept(punct)) {
      throw ParseError(peek().span, "expected '" + std::string(punct) + "'" + found());
    }
  }

  std::string found() const {
    const Token& t = peek();
    if (t.kind == Tok::End) {
      return " but reached end of input";
    }
    return " but found '" + t.text + "'";
  }

  void expect_keyword(std::string_view kw) {
    if (peek().kind != Tok::Ident || peek().text != kw) {
      throw ParseError(peek().span, "expected '" + std::string(kw) + "'" + found());
    }
    next();
  }

  const Token& expect_ident(std::string_view what) {
    if (peek().kind != Tok::Ident) {
      throw ParseError(peek().span, "expected " + std::string(what) + found());
    }
    return next();
  }

  std::uint64_t expect_plain_number() {
    const Token& t = peek();
    if (t.kind != Tok::Number || t.text.find('\'') != std::string::npos) {
      throw ParseError(t.span, "expected a decimal number" + found());
    }
    next();
    return parse_digits(t.text, 10, t.span);
  }

  void parse_decl(PModule& m) {
    const Token& kw = next();
    const SignalKind kind = kw.text == "input"    ? SignalKind::Input
                            : kw.text == "output" ? SignalKind::Output
                                                  : SignalKind::Wire;
    std::uint32_t width = 1;
    if (accept("[")) {
      const auto msb = expect_plain_number();
      expect(":");
      const auto lsb = expect_plain_number();
      expect("]");
      width = static_cast<std::uint32_t>((msb > lsb ? msb - lsb : lsb - msb) + 1);
    }
    for (;;) {
      const Token& t = expect_ident("signal name");
      m.decls.push_back(PDecl{t.text, kind, width, t.span});
      if (!accept(",")) {
        break;
      }
    }
    expect(";");
  }

  void parse_assign(PModule& m) {
    next();
    const Token& target = expect_ident("assignment target");
    if (peek_is("[")) {
      throw ParseError(peek().span, "part-select assignment targets are not supported");
    }
    PAssign a;
    a.target = target.text;
    a.span = target.span;
    expect("=");
    a.rhs = parse_ternary();
    expect(";");
    m.assigns.push_back(std::move(a));
  }

  PExprPtr parse_ternary() {
    PExprPtr cond = parse_binary(0);
    if (!peek_is("?")) {
      return cond;
    }
    const SourceSpan qspan = peek().span;
    next();
    if (cond->kind != PExpr::Kind::KeyBit) {
      throw ParseError(cond->span,
                       "ternary condition must be a single " + std::string(kKeyPortName) +
                           " bit (conditions on data signals are outside the supported subset)");
    }
    auto e = std::make_unique<PExpr>();
    e->kind = PExpr::Kind::Ternary;
    e->span = qspan;
    e->key_index = cond->key_index;
    e->a = parse_ternary();
    expect(":");
    e->b = parse_ternary();
    return e;
  }

  PExprPtr parse_binary(int min_prec) {
    PExprPtr lhs = parse_primary();
    for (;;) {
      const Token& t = peek();
      if (t.kind != Tok::Punct) {
        return lhs;
      }
      const auto info = binary_op(t.text);
      if (!info || info->precedence < min_prec) {
        return lhs;
      }
      const SourceSpan span = t.span;
      next();
      PExprPtr rhs = parse_binary(info->precedence + 1);
      auto e = std::make_unique<PExpr>();
      e->kind = PExpr::Kind::Bin;
      e->span = span;
      e->op = info->op;
      e->a = std::move(lhs);
      e->b = std::move(rhs);
      lhs = std::move(e);
    }
  }

  PExprPtr parse_primary() {
    const Token& t = peek();
    if (t.kind == Tok::Punct && t.text == "(") {
      next();
      PExprPtr inner = parse_ternary();
      expect(")");
      return inner;
    }
    if (t.kind == Tok::Number) {
      next();
      return parse_constant(t);
    }
    if (t.kind == Tok::Ident) {
      next();
      auto e = std::make_unique<PExpr>();
      e->span = t.span;
      e->name = t.text;
      if (peek_is("[")) {
        if (t.text != kKeyPortName) {
          throw ParseError(peek().span, "bit-selects are only supported on " +
                                            std::string(kKeyPortName));
        }
        next();
        e->kind = PExpr::Kind::KeyBit;
        e->key_index = static_cast<std::uint32_t>(expect_plain_number());
        expect("]");
      } else {
        e->kind = PExpr::Kind::Ident;
      }
      return e;
    }
    if (t.kind == Tok::Punct && (t.text == "-" || t.text == "~" || t.text == "!" ||
                                 t.text == "&" || t.text == "|" || t.text == "^")) {
      throw ParseError(t.span, "unary operators are not supported");
    }
    throw ParseError(t.span, "expected an expression" + found());
  }

  static PExprPtr parse_constant(const Token& t) {
    auto e = std::make_unique<PExpr>();
    e->kind = PExpr::Kind::Const;
    e->span = t.span;
    const auto tick = t.text.find('\'');
    if (tick == std::string::npos) {
      e->value = parse_digits(t.text, 10, t.span);
      e->base = 'd';
      return e;
    }
    if (tick > 0) {
      const auto w = parse_digits(std::string_view(t.text).substr(0, tick), 10, t.span);
      if (w == 0 || w > 64) {
        throw ParseError(t.span, "constant width must be between 1 and 64");
      }
      e->width = static_cast<std::uint32_t>(w);
    }
    if (tick + 1 >= t.text.size()) {
      throw ParseError(t.span, "missing base in constant");
    }
    const char base = static_cast<char>(std::tolower(static_cast<unsigned char>(t.text[tick + 1])));
    unsigned radix = 0;
    switch (base) {
      case 'b': radix = 2; break;
      case 'o': radix = 8; break;
      case 'd': radix = 10; break;
      case 'h': radix = 16; break;
      default:
        throw ParseError(t.span, std::string("unknown constant base '") + base + "'");
    }
    e->base = base;
    e->value = parse_digits(std::string_view(t.text).substr(tick + 2), radix, t.span);
    if (e->width > 0 && e->width < 64 && (e->value >> e->width) != 0) {
      throw ParseError(t.span, "constant value does not fit its declared width");
    }
    return e;
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

// ---------------------------------------------------------------------------
// Lowering into the IR
// ---------------------------------------------------------------------------

class Lowering {
 public:
  explicit Lowering(Design& design) : d_(design) {}

  void run(PModule& m) {
    d_.name = m.name;
    std::unordered_map<std::string, std::size_t> header_pos;
    for (std::size_t i = 0; i < m.header.size(); ++i) {
      if (!header_pos.emplace(m.header[i].first, i).second) {
        throw ParseError(m.header[i].second, "port '" + m.header[i].first + "' listed twice");
      }
    }
    std::vector<std::optional<SignalId>> port_ids(m.header.size());
    std::optional<SourceSpan> key_decl;
    std::uint32_t key_width = 0;

    for (const PDecl& decl : m.decls) {
      if (decl.name == kKeyPortName) {
        if (decl.kind != SignalKind::Input) {
          throw ParseError(decl.span, std::string(kKeyPortName) + " must be an input");
        }
        if (key_decl) {
          throw ParseError(decl.span, std::string(kKeyPortName) + " declared twice");
        }
        if (!header_pos.contains(decl.name)) {
          throw ParseError(decl.span, std::string(kKeyPortName) + " is not in the port list");
        }
        key_decl = decl.span;
        key_width = decl.width;
        continue;
      }
      if (ids_.contains(decl.name)) {
        throw ParseError(decl.span, "'" + decl.name + "' declared twice");
      }
      const auto hp = header_pos.find(decl.name);
      if (decl.kind == SignalKind::Wire) {
        if (hp != header_pos.end()) {
          throw ParseError(decl.span, "port '" + decl.name + "' declared as a wire");
        }
      } else if (hp == header_pos.end()) {
        throw ParseError(decl.span, "'" + decl.name + "' is declared as a port but not listed in the module header");
      }
      // Signals are added in declaration order; port order is fixed below.
      Signal s{decl.name, decl.kind, decl.width};
      const auto id = static_cast<SignalId>(d_.signals.size());
      d_.signals.push_back(std::move(s));
      ids_.emplace(decl.name, id);
      if (hp != header_pos.end()) {
        port_ids[hp->second] = id;
      }
    }
    for (std::size_t i = 0; i < m.header.size(); ++i) {
      const auto& [name, span] = m.header[i];
      if (name == kKeyPortName) {
        if (!key_decl) {
          throw ParseError(span, std::string(kKeyPortName) + " is listed but never declared");
        }
        continue;
      }
      if (!port_ids[i]) {
        throw ParseError(span, "port '" + name + "' has no input/output declaration");
      }
      d_.port_order.push_back(*port_ids[i]);
    }

    std::unordered_set<SignalId> driven;
    for (PAssign& a : m.assigns) {
      if (a.target == kKeyPortName) {
        throw ParseError(a.span, "cannot assign to " + std::string(kKeyPortName));
      }
      const auto it = ids_.find(a.target);
      if (it == ids_.end()) {
        throw ParseError(a.span, "assignment to undeclared identifier '" + a.target + "'");
      }
      if (d_.signals[it->second].kind == SignalKind::Input) {
        throw ParseError(a.span, "assignment to input '" + a.target + "'");
      }
      if (!driven.insert(it->second).second) {
        throw ParseError(a.span, "'" + a.target + "' is assigned more than once");
      }
      const std::uint32_t width = d_.signals[it->second].width;
      const NodeId root = lower_top(*a.rhs, width);
      d_.assign(it->second, root);
    }

    if (d_.key_length != key_width && (key_decl || d_.key_length > 0)) {
      const SourceSpan span = key_decl.value_or(SourceSpan{});
      throw ParseError(span, std::string(kKeyPortName) + " has " + std::to_string(key_width) +
                                 " bits but the design contains " +
                                 std::to_string(d_.key_length) + " key-controlled ternaries");
    }
    try {
      collect_key_muxes(d_);
    } catch (const DesignError& e) {
      throw ParseError(key_decl.value_or(SourceSpan{}), e.what());
    }
  }

 private:
  NodeId lower_top(const PExpr& e, std::uint32_t width) {
    switch (e.kind) {
      case PExpr::Kind::Ternary: {
        const NodeId one = lower_top(*e.a, width);
        const NodeId zero = lower_top(*e.b, width);
        return d_.key_mux(e.key_index, one, zero);
      }
      case PExpr::Kind::Bin: {
        const NodeId l = lower_operand(*e.a, width);
        const NodeId r = lower_operand(*e.b, width);
        return d_.binop(e.op, l, r);
      }
      default:
        return lower_leaf(e);
    }
  }

  NodeId lower_operand(const PExpr& e, std::uint32_t width) {
    if (e.kind == PExpr::Kind::Bin || e.kind == PExpr::Kind::Ternary) {
      // Lower first so hoisted names follow definition order.
      const NodeId root = lower_top(e, width);
      const SignalId wire = fresh_wire(width);
      d_.assign(wire, root);
      return d_.var(wire);
    }
    return lower_leaf(e);
  }

  NodeId lower_leaf(const PExpr& e) {
    switch (e.kind) {
      case PExpr::Kind::Const:
        return d_.constant(e.value, e.width, e.base);
      case PExpr::Kind::Ident: {
        if (e.name == kKeyPortName) {
          throw ParseError(e.span, std::string(kKeyPortName) +
                                       " may only appear as a single-bit ternary condition");
        }
        const auto it = ids_.find(e.name);
        if (it == ids_.end()) {
          throw ParseError(e.span, "undeclared identifier '" + e.name + "'");
        }
        return d_.var(it->second);
      }
      case PExpr::Kind::KeyBit:
        throw ParseError(e.span, std::string(kKeyPortName) +
                                     " bits may only be used as ternary conditions");
      default:
        break;
    }
    throw ParseError(e.span, "internal: unexpected expression kind");
  }

  SignalId fresh_wire(std::uint32_t width) {
    std::string name;
    do {
      name = "_h" + std::to_string(next_hoist_++);
    } while (ids_.contains(name));
    const SignalId id = d_.add_signal(name, SignalKind::Wire, width);
    ids_.emplace(std::move(name), id);
    return id;
  }

  Design& d_;
  std::unordered_map<std::string, SignalId> ids_;
  std::size_t next_hoist_ = 0;
};

// ---------------------------------------------------------------------------
// Emitter
// ---------------------------------------------------------------------------

void emit_range(std::ostream& os, std::uint32_t width) {
  if (width > 1) {
    os << '[' << (width - 1) << ":0] ";
  }
}

void emit_const(std::ostream& os, const Node& n) {
  if (n.width > 0) {
    os << n.width;
  }
  if (n.width == 0 && n.base == 'd') {
    os << n.value;
    return;
  }
  os << '\'' << n.base;
  switch (n.base) {
    case 'b': {
      std::string digits;
      std::uint64_t v = n.value;
      do {
        digits.insert(digits.begin(), static_cast<char>('0' + (v & 1U)));
        v >>= 1U;
      } while (v != 0);
      os << digits;
      break;
    }
    case 'o':
      os << std::oct << n.value << std::dec;
      break;
    case 'h':
      os << std::hex << n.value << std::dec;
      break;
    default:
      os << n.value;
      break;
  }
}

void emit_expr(std::ostream& os, const Design& d, NodeId id, bool top) {
  const Node& n = d.nodes[id];
  switch (n.kind) {
    case NodeKind::Const:
      emit_const(os, n);
      break;
    case NodeKind::Var:
      os << d.signals[n.ref].name;
      break;
    case NodeKind::BinOp:
      os << '(';
      emit_expr(os, d, n.lhs, false);
      os << ' ' << op_symbol(n.op) << ' ';
      emit_expr(os, d, n.rhs, false);
      os << ')';
      break;
    case NodeKind::KeyMux:
      if (!top) {
        os << '(';
      }
      os << kKeyPortName << '[' << n.ref << "] ? ";
      emit_expr(os, d, n.lhs, false);
      os << " : ";
      emit_expr(os, d, n.rhs, false);
      if (!top) {
        os << ')';
      }
      break;
  }
}

}  // namespace

Design parse_verilog(std::string_view text) {
  Parser parser(Lexer(text).run());
  PModule m = parser.parse_module();
  Design d;
  Lowering(d).run(m);
  return d;
}

std::string emit_verilog(const Design& design) {
  std::ostringstream os;
  os << "module " << design.name << '(';
  bool first = true;
  for (SignalId p : design.port_order) {
    os << (first ? "" : ", ") << design.signals[p].name;
    first = false;
  }
  if (design.key_length > 0) {
    os << (first ? "" : ", ") << kKeyPortName;
  }
  os << ");\n";
  for (SignalId p : design.port_order) {
    const Signal& s = design.signals[p];
    os << "  " << (s.kind == SignalKind::Input ? "input " : "output ");
    emit_range(os, s.width);
    os << s.name << ";\n";
  }
  if (design.key_length > 0) {
    os << "  input [" << (design.key_length - 1) << ":0] " << kKeyPortName << ";\n";
  }
  for (const Signal& s : design.signals) {
    if (s.kind == SignalKind::Wire) {
      os << "  wire ";
      emit_range(os, s.width);
      os << s.name << ";\n";
    }
  }
  for (const Assign& a : design.assigns) {
    os << "  assign " << design.signals[a.target].name << " = ";
    emit_expr(os, design, a.root, true);
    os << ";\n";
  }
  os << "endmodule\n";
  return os.str();
}

Design read_verilog_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw InputError("cannot read '" + path + "'");
  }
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return parse_verilog(buf.str());
  } catch (const ParseError& e) {
    throw e.in_file(path);
  }
}

void write_text_file(const std::string& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw InputError("cannot write '" + path + "'");
  }
  out << text;
}

}  // namespace rtllock
