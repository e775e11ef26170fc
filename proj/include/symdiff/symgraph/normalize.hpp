#pragma once

#include "symdiff/symexec/expr.hpp"
#include "symdiff/symgraph/graph.hpp"

namespace symdiff::symgraph {

/// Rewrite rules, each individually switchable. All of them preserve the value
/// of the expression under every valuation.
struct NormalizeOptions {
  bool collapse_casts = true;   // ext(trunc x) / trunc(ext x) round trips
  bool narrow = true;           // drop extensions the consumer never observes
  bool fold = true;             // constant subtrees
  bool order_operands = true;   // canonical operand order for commutative ops
  bool drop_safety = true;      // Safe(p) -> 1, and(1, x) -> x

  static NormalizeOptions none() { return {false, false, false, false, false}; }
};

/// Applies the enabled rules bottom-up until none fires. Idempotent.
sym::ExprRef normalize(const sym::ExprRef& e, const NormalizeOptions& opts = {});
SymGraph normalize(const SymGraph& g, const NormalizeOptions& opts = {});

}  // namespace symdiff::symgraph
