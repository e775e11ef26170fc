#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "symdiff/symgraph/graph.hpp"

namespace symdiff::s3 {

struct GedOptions {
  std::size_t exact_limit = 12;            // exact search when both graphs are this small
  std::size_t expansion_budget = 200000;   // A* states before giving up on exactness
};

struct GedResult {
  std::uint64_t distance = 0;     // exact, or the best upper bound when approximate
  std::uint64_t lower_bound = 0;  // admissible; equals distance when exact
  bool approximate = false;
  std::vector<long> mapping;      // a-node -> b-node, -1 for deletion
};

/// Unit-cost edit distance: node insert/delete 1, relabel 1 when labels
/// differ; edge insert/delete 1, operand-index relabel 1.
GedResult ged(const symgraph::SymGraph& a, const symgraph::SymGraph& b, const GedOptions& opts = {});

/// Cost of the edit path induced by a node mapping (a-node -> b-node or -1).
std::uint64_t edit_cost(const symgraph::SymGraph& a, const symgraph::SymGraph& b, const std::vector<long>& mapping);

/// Cost of building g from nothing.
inline std::uint64_t graph_size(const symgraph::SymGraph& g) { return g.nodes.size() + g.edges.size(); }

}  // namespace symdiff::s3
