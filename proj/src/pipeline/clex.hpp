#pragma once
// Small C lexer shared by the source extractor and the chunker.

#include <algorithm>
#include <cctype>
#include <string>
#include <string_view>
#include <vector>

namespace symdiff::pipeline::clex {

enum class Tok { Ident, Number, String, Punct, Directive };

struct Token {
  Tok kind;
  std::string text;
  std::size_t begin, end;
  int line;
};

inline std::vector<Token> lex(std::string_view s) {
  std::vector<Token> out;
  std::size_t i = 0;
  int line = 1;
  bool line_start = true;
  auto advance_to = [&](std::size_t j) {
    for (; i < j && i < s.size(); ++i)
      if (s[i] == '\n') ++line;
  };
  while (i < s.size()) {
    const char c = s[i];
    if (c == '\n') {
      line_start = true;
      advance_to(i + 1);
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    if (c == '/' && i + 1 < s.size() && s[i + 1] == '/') {
      std::size_t j = s.find('\n', i);
      advance_to(j == std::string_view::npos ? s.size() : j);
      continue;
    }
    if (c == '/' && i + 1 < s.size() && s[i + 1] == '*') {
      std::size_t j = s.find("*/", i + 2);
      advance_to(j == std::string_view::npos ? s.size() : j + 2);
      continue;
    }
    const std::size_t start = i;
    const int at = line;
    if (c == '#' && line_start) {
      std::size_t j = i;
      while (j < s.size() && s[j] != '\n') {
        if (s[j] == '\\' && j + 1 < s.size() && s[j + 1] == '\n') ++j;
        ++j;
      }
      advance_to(j);
      out.push_back({Tok::Directive, std::string(s.substr(start, j - start)), start, j, at});
      continue;
    }
    line_start = false;
    if (c == '"' || c == '\'') {
      std::size_t j = i + 1;
      while (j < s.size() && s[j] != c && s[j] != '\n') j += s[j] == '\\' ? 2 : 1;
      j = std::min(j + 1, s.size());
      advance_to(j);
      out.push_back({Tok::String, std::string(s.substr(start, j - start)), start, j, at});
      continue;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < s.size() && (std::isalnum(static_cast<unsigned char>(s[j])) || s[j] == '_')) ++j;
      advance_to(j);
      out.push_back({Tok::Ident, std::string(s.substr(start, j - start)), start, j, at});
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < s.size() && (std::isalnum(static_cast<unsigned char>(s[j])) || s[j] == '.')) ++j;
      advance_to(j);
      out.push_back({Tok::Number, std::string(s.substr(start, j - start)), start, j, at});
      continue;
    }
    if (c == '-' && i + 1 < s.size() && s[i + 1] == '>') {
      advance_to(i + 2);
      out.push_back({Tok::Punct, "->", start, i, at});
      continue;
    }
    advance_to(i + 1);
    out.push_back({Tok::Punct, std::string(1, c), start, i, at});
  }
  return out;
}

inline std::string trim(std::string_view s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return std::string(s.substr(a, b - a));
}

inline bool is(const Token& t, const char* p) { return t.kind == Tok::Punct && t.text == p; }

// Index of the bracket matching the opener at i, or npos.
inline std::size_t matching(const std::vector<Token>& t, std::size_t i) {
  const std::string open = t[i].text;
  const std::string close = open == "{" ? "}" : open == "(" ? ")" : "]";
  int depth = 0;
  for (std::size_t j = i; j < t.size(); ++j) {
    if (t[j].kind != Tok::Punct) continue;
    if (t[j].text == open) ++depth;
    else if (t[j].text == close && --depth == 0) return j;
  }
  return std::string::npos;
}

}  // namespace symdiff::pipeline::clex
