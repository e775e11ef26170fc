#include "symdiff/symgraph/kquery.hpp"

#include <cctype>
#include <map>
#include <optional>
#include <set>
#include <unordered_set>

namespace symdiff::symgraph {

using sym::ExprRef;
using sym::Op;
using symexec::PathSummary;
using symexec::Terminal;

KQueryError::KQueryError(int line, int column, const std::string& msg)
    : std::runtime_error("kquery " + std::to_string(line) + ":" + std::to_string(column) + ": " + msg),
      line_(line),
      column_(column) {}

namespace {

// ---------------------------------------------------------------- printing

void print(std::string& out, const sym::Expr& e, bool width_known) {
  const std::string w = "w" + std::to_string(e.width());
  switch (e.op()) {
    case Op::Const:
      if (width_known) out += std::to_string(e.value());
      else out += "(" + w + " " + std::to_string(e.value()) + ")";
      return;
    case Op::Sym:
      out += e.name();
      return;
    case Op::ExtCall:
      out += "(Call " + w + " " + e.name() + " " + std::to_string(e.site()) + " " + std::to_string(e.occurrence()) + ")";
      return;
    case Op::Read:
      out += "(Read " + w + " ";
      print(out, *e.kid(0), true);
      out += " " + e.name() + ")";
      return;
    case Op::Ite:
      out += "(Ite ";
      print(out, *e.kid(0), true);
      out += " ";
      print(out, *e.kid(1), width_known || !e.kid(2)->is_const());
      out += " ";
      print(out, *e.kid(2), true);
      out += ")";
      return;
    case Op::Safe:
      out += "(Safe ";
      print(out, *e.kid(0), true);
      out += ")";
      return;
    case Op::ZExt:
    case Op::SExt:
    case Op::Trunc:
      out += std::string("(") + sym::op_name(e.op()) + " " + w + " ";
      print(out, *e.kid(0), false);
      out += ")";
      return;
    case Op::Neg:
    case Op::Not:
      out += std::string("(") + sym::op_name(e.op()) + " " + w + " ";
      print(out, *e.kid(0), true);
      out += ")";
      return;
    default:
      break;
  }
  out += std::string("(") + sym::op_name(e.op()) + " ";
  if (sym::is_compare(e.op())) {
    print(out, *e.kid(0), !e.kid(1)->is_const());
  } else {
    out += w + " ";
    print(out, *e.kid(0), true);
  }
  out += " ";
  print(out, *e.kid(1), true);
  out += ")";
}

void collect_symbols(const ExprRef& e, std::map<std::string, unsigned>& out,
                     std::unordered_set<const sym::Expr*>& seen) {
  if (!seen.insert(e.get()).second) return;
  if (e->op() == Op::Sym) out.emplace(e->name(), e->width());
  for (const auto& k : e->kids()) collect_symbols(k, out, seen);
}

std::vector<std::pair<std::string, unsigned>> symbols_of(const PathSummary& s) {
  std::map<std::string, unsigned> syms;
  std::unordered_set<const sym::Expr*> seen;
  for (const auto& c : s.constraints) collect_symbols(c, syms, seen);
  if (s.ret) collect_symbols(*s.ret, syms, seen);
  for (const auto& [_, e] : s.outputs) collect_symbols(e, syms, seen);
  return {syms.begin(), syms.end()};
}

std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

std::string query_line(const PathSummary& s) {
  std::string out = "(query [";
  for (std::size_t i = 0; i < s.constraints.size(); ++i) {
    if (i) out += " ";
    print(out, *s.constraints[i], true);
  }
  out += "] ";
  switch (s.terminal) {
    case Terminal::Return:
      out += "(outputs";
      if (s.ret) {
        out += " (ret ";
        print(out, **s.ret, false);
        out += ")";
      }
      for (const auto& [path, e] : s.outputs) {
        out += " (out " + quote(path) + " ";
        print(out, *e, false);
        out += ")";
      }
      out += ")";
      break;
    case Terminal::Panic:
      out += "(panic " + quote(s.code) + ")";
      break;
    case Terminal::BudgetExhausted:
      out += s.code.empty() ? "(exhausted)" : "(exhausted " + quote(s.code) + ")";
      break;
    case Terminal::Undefined:
      out += "(undefined " + quote(s.code) + ")";
      break;
  }
  if (s.ub) out += " ub";
  return out + ")";
}

void emit_declarations(std::string& out, const PathSummary& s, std::map<std::string, unsigned>& declared) {
  for (const auto& [name, w] : symbols_of(s)) {
    auto it = declared.find(name);
    if (it != declared.end() && it->second == w) continue;
    declared[name] = w;
    out += "(declare " + name + " w" + std::to_string(w) + ")\n";
  }
}

// ----------------------------------------------------------------- parsing

struct Sx {
  enum Kind { Atom, String, List, Bracket } kind = Atom;
  std::string text;
  std::vector<Sx> items;
  int line = 1;
  int col = 1;
};

class Reader {
 public:
  explicit Reader(std::string_view t) : t_(t) {}

  std::vector<Sx> all() {
    std::vector<Sx> out;
    skip();
    while (pos_ < t_.size()) {
      out.push_back(next());
      skip();
    }
    return out;
  }

 private:
  std::string_view t_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;

  [[noreturn]] void fail(const std::string& msg) const { throw KQueryError(line_, col_, msg); }

  void advance() {
    if (t_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  void skip() {
    while (pos_ < t_.size()) {
      const char c = t_[pos_];
      if (c == '#') {
        while (pos_ < t_.size() && t_[pos_] != '\n') advance();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else {
        break;
      }
    }
  }

  Sx next() {
    Sx n;
    n.line = line_;
    n.col = col_;
    const char c = t_[pos_];
    if (c == '(' || c == '[') {
      const char close = c == '(' ? ')' : ']';
      n.kind = c == '(' ? Sx::List : Sx::Bracket;
      advance();
      skip();
      while (true) {
        if (pos_ >= t_.size()) fail(std::string("missing '") + close + "'");
        if (t_[pos_] == close) break;
        if (t_[pos_] == ')' || t_[pos_] == ']') fail(std::string("unexpected '") + t_[pos_] + "'");
        n.items.push_back(next());
        skip();
      }
      advance();
      return n;
    }
    if (c == ')' || c == ']') fail(std::string("unexpected '") + c + "'");
    if (c == '"') {
      n.kind = Sx::String;
      advance();
      while (true) {
        if (pos_ >= t_.size()) fail("unterminated string");
        char d = t_[pos_];
        if (d == '"') break;
        if (d == '\\') {
          advance();
          if (pos_ >= t_.size()) fail("unterminated string");
          d = t_[pos_];
        }
        n.text += d;
        advance();
      }
      advance();
      return n;
    }
    while (pos_ < t_.size()) {
      const char d = t_[pos_];
      if (std::isspace(static_cast<unsigned char>(d)) || d == '(' || d == ')' || d == '[' || d == ']' || d == '"') break;
      n.text += d;
      advance();
    }
    return n;
  }
};

[[noreturn]] void fail_at(const Sx& n, const std::string& msg) { throw KQueryError(n.line, n.col, msg); }

bool is_number(const std::string& s) {
  if (s.empty()) return false;
  for (char c : s)
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  return true;
}

std::uint64_t number(const Sx& n) {
  if (n.kind != Sx::Atom || !is_number(n.text)) fail_at(n, "expected a number, got '" + n.text + "'");
  try {
    return std::stoull(n.text);
  } catch (const std::exception&) {
    fail_at(n, "number out of range: " + n.text);
  }
}

std::optional<unsigned> width_token(const std::string& s) {
  if (s.size() < 2 || s[0] != 'w' || !is_number(s.substr(1))) return std::nullopt;
  const unsigned w = static_cast<unsigned>(std::stoul(s.substr(1)));
  if (w == 0 || w > 64) return std::nullopt;
  return w;
}

unsigned width_of(const Sx& n) {
  if (n.kind == Sx::Atom)
    if (auto w = width_token(n.text)) return *w;
  fail_at(n, "expected a width like w32, got '" + n.text + "'");
}

std::string atom(const Sx& n, const char* what) {
  if (n.kind != Sx::Atom || n.text.empty()) fail_at(n, std::string("expected ") + what);
  return n.text;
}

std::string string_of(const Sx& n, const char* what) {
  if (n.kind != Sx::String) fail_at(n, std::string("expected a quoted ") + what);
  return n.text;
}

const std::map<std::string, Op>& op_table() {
  static const std::map<std::string, Op> table = [] {
    std::map<std::string, Op> t;
    for (int i = static_cast<int>(Op::ZExt); i <= static_cast<int>(Op::ExtCall); ++i)
      t[sym::op_name(static_cast<Op>(i))] = static_cast<Op>(i);
    return t;
  }();
  return table;
}

class ExprParser {
 public:
  std::map<std::string, unsigned> decls;

  ExprRef parse(const Sx& n, std::optional<unsigned> want) {
    try {
      ExprRef e = build(n, want);
      if (want && e->width() != *want)
        fail_at(n, "width mismatch: expected w" + std::to_string(*want) + ", got w" + std::to_string(e->width()));
      return e;
    } catch (const sym::WidthError& err) {
      fail_at(n, std::string("width mismatch: ") + err.what());
    }
  }

 private:
  std::optional<unsigned> hint(const Sx& n) const {
    if (n.kind == Sx::Atom) {
      if (auto it = decls.find(n.text); it != decls.end()) return it->second;
      return std::nullopt;
    }
    if (n.kind != Sx::List || n.items.empty()) return std::nullopt;
    const std::string& head = n.items[0].text;
    if (auto w = width_token(head)) return w;
    auto it = op_table().find(head);
    if (it == op_table().end()) return std::nullopt;
    const Op op = it->second;
    if (sym::is_compare(op) || op == Op::Safe) return 1;
    if (op == Op::Ite) {
      if (n.items.size() != 4) return std::nullopt;
      if (auto w = hint(n.items[2])) return w;
      return hint(n.items[3]);
    }
    if (n.items.size() > 1 && n.items[1].kind == Sx::Atom) return width_token(n.items[1].text);
    return std::nullopt;
  }

  void arity(const Sx& n, std::size_t args) {
    if (n.items.size() != args + 1)
      fail_at(n, n.items[0].text + " expects " + std::to_string(args) + " arguments, got " +
                     std::to_string(n.items.size() - 1));
  }

  ExprRef build(const Sx& n, std::optional<unsigned> want) {
    if (n.kind == Sx::Atom) {
      if (is_number(n.text)) {
        if (!want) fail_at(n, "cannot infer the width of constant " + n.text + "; write (wN " + n.text + ")");
        return sym::constant(number(n), *want);
      }
      if (auto it = decls.find(n.text); it != decls.end()) return sym::symbol(n.text, it->second);
      if (!want) fail_at(n, "undeclared symbol '" + n.text + "'");
      return sym::symbol(n.text, *want);
    }
    if (n.kind != Sx::List || n.items.empty()) fail_at(n, "expected an expression");
    const Sx& head = n.items[0];
    if (head.kind != Sx::Atom) fail_at(head, "expected an operator");
    if (auto w = width_token(head.text)) {
      arity(n, 1);
      return sym::constant(number(n.items[1]), *w);
    }
    auto it = op_table().find(head.text);
    if (it == op_table().end()) fail_at(head, "unknown opcode '" + head.text + "'");
    const Op op = it->second;
    switch (op) {
      case Op::Read: {
        arity(n, 3);
        return sym::read(atom(n.items[3], "region name"), parse(n.items[2], 64u), width_of(n.items[1]));
      }
      case Op::ExtCall: {
        arity(n, 4);
        return sym::ext_call(atom(n.items[2], "callee"), static_cast<std::uint32_t>(number(n.items[3])),
                             static_cast<std::uint32_t>(number(n.items[4])), width_of(n.items[1]));
      }
      case Op::Ite: {
        arity(n, 3);
        std::optional<unsigned> w = want;
        if (!w) w = hint(n.items[2]);
        if (!w) w = hint(n.items[3]);
        if (!w) fail_at(n, "cannot infer the width of Ite");
        return sym::ite(parse(n.items[1], 1u), parse(n.items[2], w), parse(n.items[3], w));
      }
      case Op::Safe:
        arity(n, 1);
        return sym::safe(parse(n.items[1], 1u));
      case Op::ZExt:
      case Op::SExt:
      case Op::Trunc: {
        arity(n, 2);
        const unsigned w = width_of(n.items[1]);
        const auto cw = hint(n.items[2]);
        if (!cw) fail_at(n.items[2], "cannot infer the operand width");
        return sym::unary(op, w, parse(n.items[2], cw));
      }
      case Op::Neg:
      case Op::Not: {
        arity(n, 2);
        const unsigned w = width_of(n.items[1]);
        return sym::unary(op, w, parse(n.items[2], w));
      }
      default:
        break;
    }
    if (sym::is_compare(op)) {
      arity(n, 2);
      auto w = hint(n.items[1]);
      if (!w) w = hint(n.items[2]);
      if (!w) fail_at(n, "cannot infer the operand width of " + head.text);
      return sym::binary(op, parse(n.items[1], w), parse(n.items[2], w));
    }
    arity(n, 3);
    const unsigned w = width_of(n.items[1]);
    return sym::binary(op, parse(n.items[2], w), parse(n.items[3], w));
  }
};

PathSummary parse_query(const Sx& q, ExprParser& ep) {
  PathSummary s;
  if (q.items.size() < 3 || q.items.size() > 4) fail_at(q, "query expects [constraints] and a result");
  if (q.items[1].kind != Sx::Bracket) fail_at(q.items[1], "expected [constraints]");
  for (const auto& c : q.items[1].items) s.constraints.push_back(ep.parse(c, 1u));
  const Sx& r = q.items[2];
  if (r.kind != Sx::List || r.items.empty()) fail_at(r, "expected a query result");
  const std::string kind = atom(r.items[0], "result kind");
  if (kind == "outputs") {
    s.terminal = Terminal::Return;
    for (std::size_t i = 1; i < r.items.size(); ++i) {
      const Sx& o = r.items[i];
      if (o.kind != Sx::List || o.items.empty()) fail_at(o, "expected (ret e) or (out \"path\" e)");
      const std::string tag = atom(o.items[0], "output tag");
      if (tag == "ret") {
        if (o.items.size() != 2) fail_at(o, "ret expects 1 argument");
        if (s.ret) fail_at(o, "duplicate ret");
        s.ret = ep.parse(o.items[1], std::nullopt);
      } else if (tag == "out") {
        if (o.items.size() != 3) fail_at(o, "out expects a path and an expression");
        const std::string path = string_of(o.items[1], "output path");
        if (!s.outputs.emplace(path, ep.parse(o.items[2], std::nullopt)).second)
          fail_at(o, "duplicate output '" + path + "'");
      } else {
        fail_at(o, "unknown output tag '" + tag + "'");
      }
    }
  } else if (kind == "panic" || kind == "undefined") {
    if (r.items.size() != 2) fail_at(r, kind + " expects a quoted code");
    s.terminal = kind == "panic" ? Terminal::Panic : Terminal::Undefined;
    s.code = string_of(r.items[1], "code");
  } else if (kind == "exhausted") {
    if (r.items.size() > 2) fail_at(r, "exhausted takes at most a quoted reason");
    s.terminal = Terminal::BudgetExhausted;
    if (r.items.size() == 2) s.code = string_of(r.items[1], "reason");
  } else {
    fail_at(r, "unknown query result '" + kind + "'");
  }
  if (q.items.size() == 4) {
    if (q.items[3].kind != Sx::Atom || q.items[3].text != "ub") fail_at(q.items[3], "expected 'ub'");
    s.ub = true;
  }
  return s;
}

}  // namespace

std::string print_expr(const ExprRef& e) {
  std::string out;
  print(out, *e, false);
  return out;
}

std::string to_kquery(const PathSummary& s) {
  std::string out;
  std::map<std::string, unsigned> declared;
  emit_declarations(out, s, declared);
  return out + query_line(s) + "\n";
}

std::string to_kquery(const KQueryDoc& doc) {
  std::string out;
  if (!doc.function.empty()) out += "(function " + quote(doc.function) + ")\n";
  std::map<std::string, unsigned> declared;
  for (const auto& p : doc.paths) {
    emit_declarations(out, p, declared);
    out += query_line(p) + "\n";
  }
  return out;
}

KQueryDoc parse_kquery_doc(std::string_view text) {
  KQueryDoc doc;
  ExprParser ep;
  for (const Sx& top : Reader(text).all()) {
    if (top.kind != Sx::List || top.items.empty()) fail_at(top, "expected a top-level form");
    const std::string head = atom(top.items[0], "form name");
    if (head == "function") {
      if (top.items.size() != 2) fail_at(top, "function expects a quoted name");
      doc.function = string_of(top.items[1], "function name");
    } else if (head == "declare") {
      if (top.items.size() != 3) fail_at(top, "declare expects a name and a width");
      const std::string name = atom(top.items[1], "symbol name");
      if (is_number(name)) fail_at(top.items[1], "symbol names cannot be numbers");
      ep.decls[name] = width_of(top.items[2]);
    } else if (head == "query") {
      doc.paths.push_back(parse_query(top, ep));
    } else {
      fail_at(top.items[0], "unknown form '" + head + "'");
    }
  }
  return doc;
}

PathSummary parse_kquery(std::string_view text) {
  KQueryDoc doc = parse_kquery_doc(text);
  if (doc.paths.size() != 1)
    throw KQueryError(1, 1, "expected exactly one query, found " + std::to_string(doc.paths.size()));
  return std::move(doc.paths.front());
}

ExprRef parse_expr(std::string_view text, std::string_view decls) {
  ExprParser ep;
  for (const Sx& top : Reader(decls).all()) {
    if (top.kind == Sx::List && top.items.size() == 3 && top.items[0].text == "declare")
      ep.decls[atom(top.items[1], "symbol name")] = width_of(top.items[2]);
  }
  const auto forms = Reader(text).all();
  if (forms.size() != 1) throw KQueryError(1, 1, "expected one expression");
  return ep.parse(forms[0], std::nullopt);
}

}  // namespace symdiff::symgraph
