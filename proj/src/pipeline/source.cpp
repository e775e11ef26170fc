#include "symdiff/pipeline/source.hpp"

#include "clex.hpp"

#include <algorithm>
#include <cctype>
#include <optional>
#include <regex>

namespace symdiff::pipeline {

const CFunction* SourceUnit::find(std::string_view name) const {
  for (const auto& f : functions)
    if (f.name == name) return &f;
  return nullptr;
}

const char* to_string(FragmentKind k) {
  switch (k) {
    case FragmentKind::Macro: return "macro";
    case FragmentKind::Typedef: return "typedef";
    case FragmentKind::Record: return "record";
    case FragmentKind::Declaration: return "declaration";
  }
  return "?";
}

namespace {

using clex::Tok;
using clex::Token;
using clex::is;
using clex::lex;
using clex::matching;
using clex::trim;

const std::set<std::string>& keywords() {
  static const std::set<std::string> k{
      "auto",     "break",  "case",    "char",   "const",    "continue", "default",  "do",     "double",
      "else",     "enum",   "extern",  "float",  "for",      "goto",     "if",       "inline", "int",
      "long",     "register", "restrict", "return", "short", "signed",   "sizeof",   "static", "struct",
      "switch",   "typedef", "union",  "unsigned", "void",   "volatile", "while",    "_Bool",  "bool"};
  return k;
}

const std::set<std::string>& builtin_types() {
  static const std::set<std::string> t{"int8_t",  "int16_t",  "int32_t",  "int64_t",   "uint8_t",
                                       "uint16_t", "uint32_t", "uint64_t", "size_t",    "ssize_t",
                                       "ptrdiff_t", "intptr_t", "uintptr_t", "wchar_t", "bool"};
  return t;
}

std::vector<CField> parse_fields(const std::vector<Token>& t, std::size_t open, std::size_t close) {
  std::vector<CField> out;
  std::size_t start = open + 1;
  int depth = 0;
  for (std::size_t j = open + 1; j < close; ++j) {
    if (is(t[j], "{") || is(t[j], "(")) ++depth;
    if (is(t[j], "}") || is(t[j], ")")) --depth;
    if (!is(t[j], ";") || depth != 0) continue;
    // One declaration: base type, then comma-separated declarators.
    std::vector<std::vector<std::size_t>> decls(1);
    for (std::size_t k = start; k < j; ++k) {
      if (is(t[k], ",")) decls.emplace_back();
      else decls.back().push_back(k);
    }
    start = j + 1;
    std::string base;
    for (std::size_t d = 0; d < decls.size(); ++d) {
      const auto& ks = decls[d];
      std::size_t name_at = std::string::npos;
      for (std::size_t k : ks)
        if (t[k].kind == Tok::Ident && !keywords().count(t[k].text)) name_at = k;
      // The name is the last identifier outside an array bound.
      for (std::size_t q = 0; q < ks.size(); ++q)
        if (is(t[ks[q]], "[")) {
          for (std::size_t r = q; r-- > 0;)
            if (t[ks[r]].kind == Tok::Ident) {
              name_at = ks[r];
              break;
            }
          break;
        }
      if (name_at == std::string::npos) continue;
      std::string before, after, stars;
      for (std::size_t k : ks) {
        if (k < name_at) {
          if (is(t[k], "*")) stars += "*";
          else if (d == 0) before += (before.empty() ? "" : " ") + t[k].text;
        } else if (k > name_at) {
          after += t[k].text;
        }
      }
      if (d == 0) base = before;
      CField f;
      f.name = t[name_at].text;
      f.type = base + (stars.empty() ? "" : " " + stars) + (after.empty() ? "" : " " + after);
      const bool charish = base.find("char") != std::string::npos || base.find("uint8_t") != std::string::npos;
      f.bytes = charish && (!stars.empty() || !after.empty());
      out.push_back(std::move(f));
    }
  }
  return out;
}

class Ingestor {
 public:
  explicit Ingestor(std::string_view src) : src_(src), t_(lex(src)) {}

  SourceUnit run() {
    std::size_t i = 0;
    while (i < t_.size()) {
      if (t_[i].kind == Tok::Directive) {
        directive(t_[i]);
        ++i;
        continue;
      }
      i = item(i);
    }
    for (auto& f : u_.functions) references(f);
    return std::move(u_);
  }

 private:
  std::string_view src_;
  std::vector<Token> t_;
  SourceUnit u_;
  struct Pending {
    std::size_t body_open, body_close, first, last;
  };
  std::vector<Pending> bodies_;

  std::string text(std::size_t a, std::size_t b) const { return std::string(src_.substr(t_[a].begin, t_[b].end - t_[a].begin)); }

  void warn(int line, const std::string& msg) { u_.warnings.push_back("line " + std::to_string(line) + ": " + msg); }

  void directive(const Token& d) {
    static const std::regex def(R"(^#\s*define\s+([A-Za-z_]\w*)(\()?)");
    std::smatch m;
    const std::string s = d.text;
    if (!std::regex_search(s, m, def)) return;  // includes and conditionals carry no context
    if (m[2].matched && s.find("##") != std::string::npos) {
      warn(d.line, "skipped token-pasting macro '" + m[1].str() + "'");
      return;
    }
    u_.macros[m[1].str()] = s;
  }

  // Parses one top-level item starting at i; returns the index after it.
  std::size_t item(std::size_t i) {
    const std::size_t first = i;
    const bool typey = t_[i].kind == Tok::Ident &&
                       (t_[i].text == "typedef" || t_[i].text == "struct" || t_[i].text == "union" || t_[i].text == "enum");
    bool saw_eq = false, saw_body = false;
    for (std::size_t j = i; j < t_.size(); ++j) {
      if (t_[j].kind == Tok::Directive) {
        warn(t_[first].line, "unterminated declaration before a directive");
        return j;
      }
      if (is(t_[j], "=")) saw_eq = true;
      if (is(t_[j], "(") || is(t_[j], "[")) {
        const std::size_t k = matching(t_, j);
        if (k == std::string::npos) return fail(first);
        if (is(t_[j], "(") && k + 1 < t_.size() && is(t_[k + 1], "{") && !saw_body && !saw_eq &&
            t_[first].text != "typedef") {
          const std::size_t close = matching(t_, k + 1);
          if (close == std::string::npos) return fail(first);
          function(first, j, k + 1, close);
          return close + 1;
        }
        j = k;
        continue;
      }
      if (is(t_[j], "{")) {
        const std::size_t k = matching(t_, j);
        if (k == std::string::npos) return fail(first);
        if (typey) type_body(first, j, k);
        saw_body = true;
        j = k;
        continue;
      }
      if (is(t_[j], "}")) {
        warn(t_[j].line, "unbalanced '}'");
        return j + 1;
      }
      if (is(t_[j], ";")) {
        declaration(first, j);
        return j + 1;
      }
    }
    return fail(first);
  }

  std::size_t fail(std::size_t first) {
    warn(t_[first].line, "could not parse the remainder of the file");
    return t_.size();
  }

  struct TypeBody {
    std::size_t open, close;
  };
  std::optional<TypeBody> last_body_;

  void type_body(std::size_t, std::size_t open, std::size_t close) { last_body_ = TypeBody{open, close}; }

  void declaration(std::size_t first, std::size_t semi) {
    auto body = last_body_;
    last_body_.reset();
    const std::string full = text(first, semi);
    const bool is_typedef = t_[first].text == "typedef";
    std::size_t k = is_typedef ? first + 1 : first;
    const std::string kind = t_[k].kind == Tok::Ident ? t_[k].text : "";
    if (body && (kind == "struct" || kind == "union" || kind == "enum")) {
      std::string tag = k + 1 < body->open && t_[k + 1].kind == Tok::Ident ? t_[k + 1].text : "";
      std::string alias;
      if (is_typedef)
        for (std::size_t j = body->close + 1; j < semi; ++j)
          if (t_[j].kind == Tok::Ident) alias = t_[j].text;
      const std::string name = !tag.empty() ? tag : alias;
      if (name.empty()) {
        warn(t_[first].line, "anonymous " + kind + " skipped");
        return;
      }
      if (kind == "enum") {
        u_.typedefs[name] = full;
        if (!alias.empty() && alias != name) u_.aliases[alias] = name;
        for (std::size_t j = body->open + 1; j < body->close; ++j)
          if (t_[j].kind == Tok::Ident && (is(t_[j - 1], "{") || is(t_[j - 1], ",")))
            u_.enum_constants[t_[j].text] = name;
        return;
      }
      u_.records[name] = full;
      u_.record_fields[name] = parse_fields(t_, body->open, body->close);
      if (!alias.empty() && alias != name) u_.aliases[alias] = name;
      return;
    }
    if (is_typedef) {
      // typedef <type> NAME;  or  typedef R (*NAME)(args);
      std::string alias;
      for (std::size_t j = first + 1; j < semi; ++j) {
        if (is(t_[j], "(") && j + 2 < semi && is(t_[j + 1], "*") && t_[j + 2].kind == Tok::Ident) {
          alias = t_[j + 2].text;
          break;
        }
        if (t_[j].kind == Tok::Ident) alias = t_[j].text;
      }
      if (alias.empty()) {
        warn(t_[first].line, "typedef without a name skipped");
        return;
      }
      // typedef struct S S_t; names an existing record.
      if (k + 1 < semi && (kind == "struct" || kind == "union") && t_[k + 1].kind == Tok::Ident && k + 2 < semi &&
          t_[k + 2].kind == Tok::Ident && u_.records.count(t_[k + 1].text)) {
        u_.aliases[alias] = t_[k + 1].text;
        return;
      }
      u_.typedefs[alias] = full;
      return;
    }
    // Prototype: a parenthesised parameter list and no initializer.
    for (std::size_t j = first; j < semi; ++j) {
      if (is(t_[j], "=")) return;
      if (is(t_[j], "(") && j > first && t_[j - 1].kind == Tok::Ident) {
        u_.prototypes[t_[j - 1].text] = full;
        return;
      }
    }
  }

  void function(std::size_t first, std::size_t paren, std::size_t open, std::size_t close) {
    if (paren == first || t_[paren - 1].kind != Tok::Ident) {
      warn(t_[first].line, "function without a name skipped");
      return;
    }
    CFunction f;
    f.name = t_[paren - 1].text;
    f.text = text(first, close);
    f.header = trim(src_.substr(t_[first].begin, t_[open].begin - t_[first].begin));
    f.line = t_[first].line;
    u_.functions.push_back(std::move(f));
    bodies_.push_back({open, close, first, close});
  }

  // Canonical name of a type reference, or empty when unknown.
  std::string resolve_type(const std::string& n) const {
    if (u_.records.count(n)) return n;
    if (auto it = u_.aliases.find(n); it != u_.aliases.end()) return it->second;
    if (u_.typedefs.count(n)) return n;
    return {};
  }

  bool defines_function(const std::string& n) const { return u_.find(n) || u_.prototypes.count(n); }

  void references(CFunction& f) {
    const auto& b = bodies_[&f - u_.functions.data()];
    for (std::size_t j = b.first; j <= b.last; ++j) {
      const Token& tk = t_[j];
      if (tk.kind != Tok::Ident || keywords().count(tk.text)) {
        if (tk.kind == Tok::Ident && (tk.text == "struct" || tk.text == "union" || tk.text == "enum") &&
            j + 1 <= b.last && t_[j + 1].kind == Tok::Ident) {
          const std::string& tag = t_[j + 1].text;
          const std::string r = resolve_type(tag);
          if (r.empty()) f.external.insert(tag);
          else f.types.insert(r);
          ++j;
        }
        continue;
      }
      const bool member = j > b.first && (is(t_[j - 1], ".") || is(t_[j - 1], "->"));
      if (member) continue;
      if (u_.macros.count(tk.text)) {
        f.macros.insert(tk.text);
        continue;
      }
      if (auto e = u_.enum_constants.find(tk.text); e != u_.enum_constants.end()) {
        f.types.insert(e->second);
        continue;
      }
      if (const std::string r = resolve_type(tk.text); !r.empty()) {
        f.types.insert(r);
        continue;
      }
      const bool call = j + 1 <= b.last && is(t_[j + 1], "(");
      if (call) {
        if (tk.text == f.name) continue;  // own header, or recursion
        f.callees.insert(tk.text);
        if (!defines_function(tk.text)) f.external.insert(tk.text);
        continue;
      }
      // Unknown identifier in type position: `T x`, `T *x`, `const T x`.
      if (builtin_types().count(tk.text)) continue;
      std::size_t k = j + 1;
      while (k <= b.last && (is(t_[k], "*") || (t_[k].kind == Tok::Ident && t_[k].text == "const"))) ++k;
      if (k <= b.last && t_[k].kind == Tok::Ident && !keywords().count(t_[k].text) && k + 1 <= b.last + 1) {
        const Token* after = k + 1 < t_.size() ? &t_[k + 1] : nullptr;
        const bool decl_end = after && (is(*after, ";") || is(*after, "=") || is(*after, ",") || is(*after, ")") ||
                                        is(*after, "["));
        const bool decl_start = j == b.first || is(t_[j - 1], ";") || is(t_[j - 1], "{") || is(t_[j - 1], "}") ||
                                is(t_[j - 1], "(") || is(t_[j - 1], ",") ||
                                (t_[j - 1].kind == Tok::Ident && (t_[j - 1].text == "const" || t_[j - 1].text == "static"));
        if (decl_end && decl_start) f.external.insert(tk.text);
      }
    }
  }
};

void closure_visit(const SourceUnit& u, FragmentKind kind, const std::string& name,
                   std::set<std::pair<int, std::string>>& seen, std::vector<ContextFragment>& out);

// Names a definition text depends on.
std::vector<std::pair<FragmentKind, std::string>> deps_of(const SourceUnit& u, const std::string& text,
                                                          const std::string& self) {
  std::set<std::pair<int, std::string>> found;
  for (const auto& tk : lex(text)) {
    std::vector<Token> inner;
    if (tk.kind == Tok::Directive) {
      // Macro bodies: skip "#define NAME".
      auto toks = lex(tk.text.substr(1));
      for (std::size_t i = 2; i < toks.size(); ++i) inner.push_back(toks[i]);
    } else {
      inner.push_back(tk);
    }
    for (const auto& t : inner) {
      if (t.kind != Tok::Ident || t.text == self) continue;
      if (u.macros.count(t.text)) found.insert({static_cast<int>(FragmentKind::Macro), t.text});
      else if (u.records.count(t.text)) found.insert({static_cast<int>(FragmentKind::Record), t.text});
      else if (auto a = u.aliases.find(t.text); a != u.aliases.end() && a->second != self)
        found.insert({static_cast<int>(u.records.count(a->second) ? FragmentKind::Record : FragmentKind::Typedef), a->second});
      else if (u.typedefs.count(t.text)) found.insert({static_cast<int>(FragmentKind::Typedef), t.text});
      else if (auto e = u.enum_constants.find(t.text); e != u.enum_constants.end() && e->second != self)
        found.insert({static_cast<int>(FragmentKind::Typedef), e->second});
    }
  }
  std::vector<std::pair<FragmentKind, std::string>> out;
  for (const auto& [k, n] : found) out.push_back({static_cast<FragmentKind>(k), n});
  return out;
}

void closure_visit(const SourceUnit& u, FragmentKind kind, const std::string& name,
                   std::set<std::pair<int, std::string>>& seen, std::vector<ContextFragment>& out) {
  if (!seen.insert({static_cast<int>(kind), name}).second) return;
  const std::map<std::string, std::string>* table =
      kind == FragmentKind::Macro ? &u.macros : kind == FragmentKind::Record ? &u.records : &u.typedefs;
  auto it = table->find(name);
  if (it == table->end()) return;
  for (const auto& [k, n] : deps_of(u, it->second, name)) closure_visit(u, k, n, seen, out);
  out.push_back({kind, name, it->second});
}

}  // namespace

SourceUnit ingest_c(std::string_view source) { return Ingestor(source).run(); }

std::vector<ContextFragment> build_context(const SourceUnit& u, std::string_view fn) {
  const CFunction* f = u.find(fn);
  if (!f) return {};
  std::vector<ContextFragment> out;
  std::set<std::pair<int, std::string>> seen;
  std::vector<std::pair<FragmentKind, std::string>> roots;
  for (const auto& m : f->macros) roots.push_back({FragmentKind::Macro, m});
  for (const auto& t : f->types)
    roots.push_back({u.records.count(t) ? FragmentKind::Record : FragmentKind::Typedef, t});
  std::sort(roots.begin(), roots.end());
  for (const auto& [k, n] : roots) closure_visit(u, k, n, seen, out);
  for (const auto& c : f->callees) {
    if (const CFunction* g = u.find(c)) out.push_back({FragmentKind::Declaration, c, g->header + ";"});
    else if (auto p = u.prototypes.find(c); p != u.prototypes.end())
      out.push_back({FragmentKind::Declaration, c, p->second});
  }
  return out;
}

std::map<std::string, std::vector<FieldUse>> analyze_field_usage(const SourceUnit& u, std::string_view record) {
  std::map<std::string, std::vector<FieldUse>> out;
  auto rf = u.record_fields.find(std::string(record));
  if (rf == u.record_fields.end()) return out;
  std::set<std::string> wanted;
  for (const auto& f : rf->second)
    if (f.bytes) {
      wanted.insert(f.name);
      out[f.name];
    }
  if (wanted.empty()) return out;
  for (const auto& fn : u.functions) {
    const auto toks = lex(fn.text);
    // Statements end at ';' outside parentheses, or at a brace.
    std::size_t start = 0;
    int parens = 0;
    std::set<std::string> hit;
    auto flush = [&](std::size_t end_tok, bool include_end) {
      if (!hit.empty() && start < toks.size()) {
        const std::size_t b = toks[start].begin;
        const std::size_t e = include_end ? toks[end_tok].end : toks[end_tok].begin;
        const std::string snippet = trim(std::string_view(fn.text).substr(b, e - b));
        for (const auto& h : hit) out[h].push_back({fn.name, snippet});
      }
      hit.clear();
      start = end_tok + 1;
    };
    for (std::size_t i = 0; i < toks.size(); ++i) {
      const auto& t = toks[i];
      if (is(t, "(")) ++parens;
      if (is(t, ")")) --parens;
      if ((is(t, ".") || is(t, "->")) && i + 1 < toks.size() && toks[i + 1].kind == Tok::Ident &&
          wanted.count(toks[i + 1].text))
        hit.insert(toks[i + 1].text);
      if (is(t, ";") && parens == 0) flush(i, true);
      else if (is(t, "{") || is(t, "}")) flush(i, false);
    }
  }
  return out;
}

}  // namespace symdiff::pipeline
