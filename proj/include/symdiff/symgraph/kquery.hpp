#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "symdiff/symexec/summary.hpp"

namespace symdiff::symgraph {

class KQueryError : public std::runtime_error {
 public:
  KQueryError(int line, int column, const std::string& msg);
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

/// A serialized set of path summaries for one function.
struct KQueryDoc {
  std::string function;
  std::vector<symexec::PathSummary> paths;
};

/// One expression in canonical form. Constants whose width the surrounding
/// form does not fix are written `(w32 5)`.
std::string print_expr(const sym::ExprRef& e);

/// `(declare ...)` lines for the symbols used, then one `(query ...)` line.
std::string to_kquery(const symexec::PathSummary& s);
std::string to_kquery(const KQueryDoc& doc);

/// Inverse of to_kquery. The single-summary form requires exactly one query.
symexec::PathSummary parse_kquery(std::string_view text);
KQueryDoc parse_kquery_doc(std::string_view text);
/// Parses one expression; symbols need declarations unless the context fixes
/// their width, so `decls` may be given as `(declare ...)` text.
sym::ExprRef parse_expr(std::string_view text, std::string_view decls = {});

}  // namespace symdiff::symgraph
