#include "symdiff/pipeline/chunk.hpp"

#include <algorithm>
#include <cctype>

#include "clex.hpp"

namespace symdiff::pipeline {

using clex::is;
using clex::Tok;
using clex::Token;

std::size_t estimate_tokens(std::string_view text) {
  std::size_t words = 0;
  bool in = false;
  for (char c : text) {
    const bool ws = std::isspace(static_cast<unsigned char>(c));
    if (!ws && !in) ++words;
    in = !ws;
  }
  return (words * 13 + 9) / 10;
}

std::vector<std::string> split_statements(std::string_view fn) {
  const auto t = clex::lex(fn);
  std::size_t open = 0;
  while (open < t.size() && !is(t[open], "{")) {
    if (is(t[open], "(")) {
      const std::size_t k = clex::matching(t, open);
      if (k == std::string::npos) break;
      open = k;
    }
    ++open;
  }
  if (open >= t.size()) return {std::string(fn)};
  const std::size_t close = clex::matching(t, open);
  if (close == std::string::npos) return {std::string(fn)};

  std::vector<std::string> out;
  std::size_t cut = t[open].end;
  out.emplace_back(fn.substr(0, cut));
  int braces = 0, parens = 0;
  bool is_do = false;
  std::size_t stmt_first = open + 1;
  for (std::size_t i = open + 1; i < close; ++i) {
    if (i == stmt_first) is_do = t[i].kind == Tok::Ident && t[i].text == "do";
    bool ends = false;
    if (is(t[i], "(")) ++parens;
    else if (is(t[i], ")")) --parens;
    else if (is(t[i], "{")) ++braces;
    else if (is(t[i], "}")) ends = --braces == 0 && parens == 0;
    else if (is(t[i], ";")) ends = braces == 0 && parens == 0;
    if (!ends) continue;
    // if/else chains and do-while stay in one piece; a brace that closes an
    // initializer or a struct body is not the end of the declaration
    if (is(t[i], "}")) {
      const Token& head = t[stmt_first];
      const bool compound = is(head, "{") || (head.kind == Tok::Ident && (head.text == "if" || head.text == "for" ||
                                                                            head.text == "while" || head.text == "switch" ||
                                                                            head.text == "do" || head.text == "else"));
      const bool more = i + 1 < close && t[i + 1].kind == Tok::Ident &&
                        (t[i + 1].text == "else" || (is_do && t[i + 1].text == "while"));
      if (!compound || more) continue;
    } else if (i + 1 < close && t[i + 1].kind == Tok::Ident && t[i + 1].text == "else") {
      continue;
    }
    out.emplace_back(fn.substr(cut, t[i].end - cut));
    cut = t[i].end;
    stmt_first = i + 1;
  }
  out.emplace_back(fn.substr(cut));
  return out;
}

std::vector<Chunk> chunk_function(std::string_view fn, std::size_t budget, std::size_t context_tokens) {
  if (budget == 0) throw ChunkError("token budget must be positive", 1);
  if (context_tokens + estimate_tokens(fn) <= budget) return {Chunk{std::string(fn), 1}};
  if (context_tokens >= budget)
    throw ChunkError("shared context needs " + std::to_string(context_tokens) + " tokens of a budget of " +
                         std::to_string(budget),
                     1);
  const auto pieces = split_statements(fn);
  std::vector<Chunk> out;
  int line = 1;
  Chunk cur{"", 1};
  bool cur_has_piece = false;
  for (std::size_t i = 0; i < pieces.size(); ++i) {
    const std::string& p = pieces[i];
    // Line of the piece's first non-space character.
    int p_line = line;
    for (char c : p) {
      if (!std::isspace(static_cast<unsigned char>(c))) break;
      if (c == '\n') ++p_line;
    }
    if (context_tokens + estimate_tokens(p) > budget)
      throw ChunkError("statement at line " + std::to_string(p_line) + " exceeds the token budget of " +
                           std::to_string(budget),
                       p_line);
    if (cur_has_piece && context_tokens + estimate_tokens(cur.text + p) > budget) {
      out.push_back(std::move(cur));
      cur = Chunk{"", line};
    }
    if (cur.text.empty()) cur.first_line = line;
    cur.text += p;
    cur_has_piece = true;
    line += static_cast<int>(std::count(p.begin(), p.end(), '\n'));
  }
  if (cur_has_piece) out.push_back(std::move(cur));
  return out;
}

std::string reassemble(const std::vector<std::string>& pieces) {
  std::string out;
  for (const auto& p : pieces) out += p;
  return out;
}

}  // namespace symdiff::pipeline
