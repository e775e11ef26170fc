#include "symdiff/mir/text.hpp"

#include <cctype>
#include <charconv>
#include <set>
#include <sstream>

#include "symdiff/mir/verify.hpp"

namespace symdiff::mir {

namespace {

struct Token {
  enum class Kind { Ident, Int, Punct, End } kind = Kind::End;
  std::string text;
  std::int64_t value = 0;
  SourceLoc loc;
};

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    while (true) {
      skip_space();
      Token t;
      t.loc = {line_, col_};
      if (pos_ >= src_.size()) {
        out.push_back(t);
        return out;
      }
      const char c = src_[pos_];
      if (c == '-' && peek(1) == '>') {
        t.kind = Token::Kind::Punct;
        t.text = "->";
        advance(2);
      } else if (std::isdigit(static_cast<unsigned char>(c)) ||
                 (c == '-' && std::isdigit(static_cast<unsigned char>(peek(1))))) {
        t.kind = Token::Kind::Int;
        t.value = lex_int(t.loc);
      } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        t.kind = Token::Kind::Ident;
        const std::size_t start = pos_;
        while (pos_ < src_.size()) {
          const char d = src_[pos_];
          if (d == '-' && peek(1) == '>') break;
          if (std::isalnum(static_cast<unsigned char>(d)) || d == '_' || d == '.' || d == '-')
            advance(1);
          else
            break;
        }
        t.text = std::string(src_.substr(start, pos_ - start));
      } else if (std::string_view("(){}<>[],:=;").find(c) != std::string_view::npos) {
        t.kind = Token::Kind::Punct;
        t.text = std::string(1, c);
        advance(1);
      } else {
        throw IrError(IrError::Kind::Syntax, t.loc, std::string("unexpected character '") + c + "'");
      }
      out.push_back(std::move(t));
    }
  }

 private:
  char peek(std::size_t k) const { return pos_ + k < src_.size() ? src_[pos_ + k] : '\0'; }

  void advance(std::size_t n) {
    for (std::size_t i = 0; i < n && pos_ < src_.size(); ++i, ++pos_) {
      if (src_[pos_] == '\n') {
        ++line_;
        col_ = 1;
      } else {
        ++col_;
      }
    }
  }

  void skip_space() {
    while (pos_ < src_.size()) {
      const char c = src_[pos_];
      if (c == '#') {
        while (pos_ < src_.size() && src_[pos_] != '\n') advance(1);
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance(1);
      } else {
        break;
      }
    }
  }

  std::int64_t lex_int(SourceLoc loc) {
    bool neg = false;
    if (src_[pos_] == '-') {
      neg = true;
      advance(1);
    }
    int base = 10;
    if (src_[pos_] == '0' && (peek(1) == 'x' || peek(1) == 'X')) {
      base = 16;
      advance(2);
    }
    const std::size_t start = pos_;
    while (pos_ < src_.size() && std::isxdigit(static_cast<unsigned char>(src_[pos_]))) {
      if (base == 10 && !std::isdigit(static_cast<unsigned char>(src_[pos_]))) break;
      advance(1);
    }
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(src_.data() + start, src_.data() + pos_, v, base);
    if (ec != std::errc() || ptr != src_.data() + pos_ || start == pos_)
      throw IrError(IrError::Kind::Syntax, loc, "malformed integer literal");
    return neg ? -static_cast<std::int64_t>(v) : static_cast<std::int64_t>(v);
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

class Parser {
 public:
  explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

  Program program() {
    Program p;
    skip_separators();
    while (!at_end()) {
      if (is_ident("type")) {
        RecordDef def = record_def();
        const SourceLoc loc = cur().loc;
        if (!p.types.emplace(def.name, def).second)
          throw IrError(IrError::Kind::Syntax, loc, "duplicate record type '" + def.name + "'");
      } else if (is_ident("fn")) {
        p.functions.push_back(function());
      } else {
        fail("expected 'type' or 'fn'");
      }
      skip_separators();
    }
    return p;
  }

 private:
  const Token& cur() const { return toks_[pos_]; }
  const Token& ahead(std::size_t k) const {
    return toks_[std::min(pos_ + k, toks_.size() - 1)];
  }
  bool at_end() const { return cur().kind == Token::Kind::End; }
  bool is_ident(std::string_view s) const { return cur().kind == Token::Kind::Ident && cur().text == s; }
  bool is_punct(std::string_view s) const { return cur().kind == Token::Kind::Punct && cur().text == s; }

  [[noreturn]] void fail(const std::string& msg) const {
    std::string found = at_end() ? "end of input" : "'" + (cur().kind == Token::Kind::Int ? std::to_string(cur().value) : cur().text) + "'";
    throw IrError(IrError::Kind::Syntax, cur().loc, msg + ", found " + found);
  }

  void expect_punct(std::string_view s) {
    if (!is_punct(s)) fail("expected '" + std::string(s) + "'");
    ++pos_;
  }

  void expect_ident(std::string_view s) {
    if (!is_ident(s)) fail("expected '" + std::string(s) + "'");
    ++pos_;
  }

  std::string ident(const char* what) {
    if (cur().kind != Token::Kind::Ident) fail(std::string("expected ") + what);
    return toks_[pos_++].text;
  }

  std::int64_t integer() {
    if (cur().kind != Token::Kind::Int) fail("expected integer");
    return toks_[pos_++].value;
  }

  void skip_separators() {
    while (is_punct(";")) ++pos_;
  }

  IrType type() {
    const Token& t = cur();
    if (t.kind == Token::Kind::Punct && t.text == "[") {
      ++pos_;
      const std::int64_t n = integer();
      if (n < 0) fail("negative array length");
      expect_ident("x");
      IrType elem = type();
      expect_punct("]");
      return IrType::array(std::move(elem), static_cast<std::uint64_t>(n));
    }
    const std::string name = ident("type");
    if (name == "ptr" || name == "opt") {
      expect_punct("<");
      IrType inner = type();
      expect_punct(">");
      return name == "ptr" ? IrType::address(std::move(inner)) : IrType::optional(std::move(inner));
    }
    if (name == "str") return IrType::str_slice();
    if (name == "vec") return IrType::byte_vector();
    if (name == "unit") return IrType::unit();
    if (name.size() > 1 && name[0] == 'i' &&
        name.find_first_not_of("0123456789", 1) == std::string::npos) {
      const unsigned bits = static_cast<unsigned>(std::stoul(name.substr(1)));
      if (bits != 1 && bits != 8 && bits != 16 && bits != 32 && bits != 64)
        throw IrError(IrError::Kind::Syntax, t.loc, "unsupported integer width " + name);
      return IrType::integer(bits);
    }
    return IrType::record(name);
  }

  RecordDef record_def() {
    expect_ident("type");
    RecordDef def;
    def.name = ident("record name");
    expect_punct("=");
    expect_punct("{");
    while (!is_punct("}")) {
      RecordField f;
      f.name = ident("field name");
      expect_punct(":");
      f.type = type();
      def.fields.push_back(std::move(f));
      if (!is_punct(",")) break;
      ++pos_;
    }
    expect_punct("}");
    return def;
  }

  Operand operand() {
    if (cur().kind == Token::Kind::Int) return Operand::lit(integer());
    return Operand::value(ident("operand"));
  }

  IrFunction function() {
    expect_ident("fn");
    IrFunction fn;
    const SourceLoc dloc = cur().loc;
    const std::string d = ident("dialect");
    if (d == "c")
      fn.dialect = Dialect::C;
    else if (d == "rust")
      fn.dialect = Dialect::Rust;
    else
      throw IrError(IrError::Kind::Syntax, dloc, "unknown dialect '" + d + "'");
    fn.name = ident("function name");
    expect_punct("(");
    while (!is_punct(")")) {
      Param p;
      if (is_ident("out") && ahead(1).kind == Token::Kind::Ident) {
        p.out = true;
        ++pos_;
      }
      p.name = ident("parameter name");
      expect_punct(":");
      p.type = type();
      fn.params.push_back(std::move(p));
      if (!is_punct(",")) break;
      ++pos_;
    }
    expect_punct(")");
    expect_punct("->");
    fn.ret = type();
    expect_punct("{");
    skip_separators();
    while (!is_punct("}")) {
      fn.blocks.push_back(block());
      skip_separators();
    }
    expect_punct("}");
    return fn;
  }

  bool at_block_end() const {
    return is_punct("}") || (cur().kind == Token::Kind::Ident && ahead(1).kind == Token::Kind::Punct &&
                             ahead(1).text == ":");
  }

  Block block() {
    Block b;
    b.label = ident("block label");
    expect_punct(":");
    while (true) {
      skip_separators();
      if (at_end() || at_block_end()) fail("block '" + b.label + "' has no terminator");
      const SourceLoc loc = cur().loc;
      if (is_ident("ret") || is_ident("jmp") || is_ident("br") || is_ident("panic")) {
        b.term = terminator();
        b.term.loc = loc;
        return b;
      }
      Instr in = instruction();
      in.loc = loc;
      b.instrs.push_back(std::move(in));
    }
  }

  Terminator terminator() {
    Terminator t;
    const std::string kw = ident("terminator");
    if (kw == "ret") {
      t.kind = TermKind::Return;
      skip_separators();
      if (!at_block_end()) t.value = operand();
    } else if (kw == "jmp") {
      t.kind = TermKind::Jump;
      t.target = ident("label");
    } else if (kw == "br") {
      t.kind = TermKind::Branch;
      t.value = operand();
      expect_punct(",");
      t.target = ident("label");
      expect_punct(",");
      t.else_target = ident("label");
    } else {
      t.kind = TermKind::Panic;
      if (cur().kind == Token::Kind::Int)
        t.code = std::to_string(integer());
      else
        t.code = ident("panic code");
    }
    return t;
  }

  void call_tail(Instr& in) {
    in.symbol = ident("callee");
    expect_punct("(");
    while (!is_punct(")")) {
      in.operands.push_back(operand());
      if (!is_punct(",")) break;
      ++pos_;
    }
    expect_punct(")");
  }

  Instr instruction() {
    Instr in;
    if (is_ident("store")) {
      ++pos_;
      in.op = Opcode::Store;
      in.operands.push_back(operand());
      expect_punct(",");
      in.operands.push_back(operand());
      return in;
    }
    if (is_ident("call") && !(ahead(1).kind == Token::Kind::Punct && ahead(1).text == "=")) {
      ++pos_;
      in.op = Opcode::Call;
      call_tail(in);
      return in;
    }
    in.result = ident("instruction");
    expect_punct("=");
    const SourceLoc oploc = cur().loc;
    const std::string opname = ident("opcode");
    auto op = opcode_from(opname);
    if (!op || *op == Opcode::Store)
      throw IrError(IrError::Kind::Syntax, oploc, "unknown opcode '" + opname + "'");
    in.op = *op;
    switch (in.op) {
      case Opcode::Const:
        in.type = type();
        in.operands.push_back(Operand::lit(integer()));
        break;
      case Opcode::ICmp: {
        const std::string p = ident("predicate");
        auto pred = pred_from(p);
        if (!pred) throw IrError(IrError::Kind::Syntax, oploc, "unknown predicate '" + p + "'");
        in.pred = *pred;
        in.operands.push_back(operand());
        expect_punct(",");
        in.operands.push_back(operand());
        break;
      }
      case Opcode::ZExt:
      case Opcode::SExt:
      case Opcode::Trunc:
        in.operands.push_back(operand());
        expect_ident("to");
        in.type = type();
        break;
      case Opcode::Alloc:
        in.type = type();
        break;
      case Opcode::Load:
        in.type = type();
        expect_punct(",");
        in.operands.push_back(operand());
        break;
      case Opcode::FieldAddr:
        in.operands.push_back(operand());
        expect_punct(",");
        in.symbol = ident("field name");
        break;
      case Opcode::Call:
        call_tail(in);
        expect_punct("->");
        in.type = type();
        break;
      case Opcode::CheckedAdd:
      case Opcode::CheckedSub:
      case Opcode::CheckedMul: {
        const std::string s = ident("signedness");
        if (s != "s" && s != "u") fail("expected 's' or 'u'");
        in.is_signed = s == "s";
        in.operands.push_back(operand());
        expect_punct(",");
        in.operands.push_back(operand());
        break;
      }
      case Opcode::OptionUnwrap:
      case Opcode::SliceLen:
        in.operands.push_back(operand());
        break;
      default:  // binary arithmetic, index-addr, bounds-checked-index
        in.operands.push_back(operand());
        expect_punct(",");
        in.operands.push_back(operand());
        break;
    }
    return in;
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

void print_instr(std::ostringstream& os, const Instr& in) {
  os << "  ";
  if (!in.result.empty()) os << in.result << " = ";
  os << mnemonic(in.op);
  auto ops = [&](std::size_t from) {
    for (std::size_t i = from; i < in.operands.size(); ++i) os << (i == from ? " " : ", ") << in.operands[i].to_string();
  };
  switch (in.op) {
    case Opcode::Const:
      os << ' ' << print_type(*in.type) << ' ' << in.operands[0].to_string();
      break;
    case Opcode::ICmp:
      os << ' ' << mnemonic(in.pred);
      ops(0);
      break;
    case Opcode::ZExt:
    case Opcode::SExt:
    case Opcode::Trunc:
      os << ' ' << in.operands[0].to_string() << " to " << print_type(*in.type);
      break;
    case Opcode::Alloc:
      os << ' ' << print_type(*in.type);
      break;
    case Opcode::Load:
      os << ' ' << print_type(*in.type) << ", " << in.operands[0].to_string();
      break;
    case Opcode::FieldAddr:
      os << ' ' << in.operands[0].to_string() << ", " << in.symbol;
      break;
    case Opcode::Call:
      os << ' ' << in.symbol << '(';
      for (std::size_t i = 0; i < in.operands.size(); ++i) os << (i ? ", " : "") << in.operands[i].to_string();
      os << ')';
      if (in.type) os << " -> " << print_type(*in.type);
      break;
    case Opcode::CheckedAdd:
    case Opcode::CheckedSub:
    case Opcode::CheckedMul:
      os << (in.is_signed ? " s" : " u");
      ops(0);
      break;
    default:
      ops(0);
      break;
  }
  os << '\n';
}

void print_term(std::ostringstream& os, const Terminator& t) {
  os << "  ";
  switch (t.kind) {
    case TermKind::Return:
      os << "ret";
      if (t.value) os << ' ' << t.value->to_string();
      break;
    case TermKind::Jump:
      os << "jmp " << t.target;
      break;
    case TermKind::Branch:
      os << "br " << t.value->to_string() << ", " << t.target << ", " << t.else_target;
      break;
    case TermKind::Panic:
      os << "panic " << t.code;
      break;
  }
  os << '\n';
}

}  // namespace

std::string print_type(const IrType& t) {
  switch (t.kind()) {
    case TypeKind::Int: return "i" + std::to_string(t.bits());
    case TypeKind::Address: return "ptr<" + print_type(t.inner()) + ">";
    case TypeKind::Record: return t.record_name();
    case TypeKind::Array: return "[" + std::to_string(t.count()) + " x " + print_type(t.inner()) + "]";
    case TypeKind::StrSlice: return "str";
    case TypeKind::ByteVec: return "vec";
    case TypeKind::Optional: return "opt<" + print_type(t.inner()) + ">";
    case TypeKind::Unit: return "unit";
  }
  return "?";
}

std::string print_function(const IrFunction& fn) {
  std::ostringstream os;
  os << "fn " << to_string(fn.dialect) << ' ' << fn.name << '(';
  for (std::size_t i = 0; i < fn.params.size(); ++i) {
    const auto& p = fn.params[i];
    os << (i ? ", " : "") << (p.out ? "out " : "") << p.name << ": " << print_type(p.type);
  }
  os << ") -> " << print_type(fn.ret) << " {\n";
  for (const auto& b : fn.blocks) {
    os << b.label << ":\n";
    for (const auto& in : b.instrs) print_instr(os, in);
    print_term(os, b.term);
  }
  os << "}\n";
  return os.str();
}

std::string print_ir(const Program& program) {
  std::ostringstream os;
  bool first = true;
  for (const auto& [name, def] : program.types) {
    os << "type " << name << " = {";
    for (std::size_t i = 0; i < def.fields.size(); ++i)
      os << (i ? ", " : " ") << def.fields[i].name << ": " << print_type(def.fields[i].type);
    os << (def.fields.empty() ? "}\n" : " }\n");
    first = false;
  }
  for (const auto& fn : program.functions) {
    if (!first) os << '\n';
    os << print_function(fn);
    first = false;
  }
  return os.str();
}

Program parse_ir(std::string_view text) {
  Program p = Parser(Lexer(text).run()).program();
  verify_types(p.types);
  std::set<std::string> names;
  for (const auto& fn : p.functions) {
    if (!names.insert(fn.name).second)
      throw IrError(IrError::Kind::Structure, {}, "function '" + fn.name + "' defined more than once");
    verify(fn, p.types);
  }
  return p;
}

}  // namespace symdiff::mir
