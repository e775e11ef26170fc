#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "symdiff/symexec/expr.hpp"

namespace symdiff::symgraph {

struct GraphNode {
  std::uint64_t id = 0;  // content hash of the subexpression
  std::string label;     // opcode, width, and payload, e.g. "Const w32 3"
  sym::ExprRef expr;     // the subexpression rooted here
};

struct GraphEdge {
  std::size_t parent = 0;  // node indices
  std::size_t child = 0;
  unsigned index = 0;      // operand position
};

/// Labeled DAG of one or more expressions. Structurally equal subexpressions
/// share a node; nodes are listed in post-order from the roots.
struct SymGraph {
  std::vector<GraphNode> nodes;
  std::vector<GraphEdge> edges;
  std::vector<std::size_t> roots;
  std::vector<sym::ExprRef> root_exprs;

  bool empty() const { return nodes.empty(); }
};

std::string node_label(const sym::Expr& e);
/// DOT identifier of a node, "h" plus 16 hex digits of its id.
std::string node_name(std::uint64_t id);

SymGraph to_graph(const std::vector<sym::ExprRef>& roots);
inline SymGraph to_graph(const sym::ExprRef& root) { return to_graph(std::vector<sym::ExprRef>{root}); }

/// Same nodes, labels, and ordered edges.
bool graph_equal(const SymGraph& a, const SymGraph& b);

/// Deterministic digraph: node names come from content hashes, edges are
/// labeled with operand positions.
std::string to_dot(const SymGraph& g, std::string_view name = "symgraph");

}  // namespace symdiff::symgraph
