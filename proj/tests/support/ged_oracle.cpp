#include "ged_oracle.hpp"

#include "gen.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>
#include <vector>

namespace oracle {

using symdiff::symgraph::SymGraph;

namespace {

using Multiset = std::map<unsigned, unsigned>;  // operand index -> count

std::vector<std::vector<Multiset>> edge_matrix(const SymGraph& g) {
  std::vector<std::vector<Multiset>> m(g.nodes.size(), std::vector<Multiset>(g.nodes.size()));
  for (const auto& e : g.edges) ++m[e.parent][e.child][e.index];
  return m;
}

unsigned total(const Multiset& s) {
  unsigned n = 0;
  for (const auto& [k, c] : s) n += c;
  return n;
}

// Turning one bundle of parallel edges into another: matching indices are
// free, the rest pair up as relabels, and the surplus is inserted or deleted.
unsigned bundle_cost(const Multiset& x, const Multiset& y) {
  unsigned common = 0;
  for (const auto& [k, c] : x)
    if (auto it = y.find(k); it != y.end()) common += std::min(c, it->second);
  return std::max(total(x), total(y)) - common;
}

struct Search {
  const SymGraph& a;
  const SymGraph& b;
  std::vector<std::vector<Multiset>> ea, eb;
  std::vector<long> map;
  std::vector<bool> used;
  std::uint64_t best = ~0ull;

  std::uint64_t cost() const {
    std::uint64_t c = 0;
    std::vector<bool> hit(b.nodes.size(), false);
    for (std::size_t u = 0; u < a.nodes.size(); ++u) {
      if (map[u] < 0) ++c;
      else {
        hit[map[u]] = true;
        if (a.nodes[u].label != b.nodes[map[u]].label) ++c;
      }
    }
    for (bool h : hit) c += !h;
    for (std::size_t u = 0; u < a.nodes.size(); ++u)
      for (std::size_t v = 0; v < a.nodes.size(); ++v) {
        if (map[u] >= 0 && map[v] >= 0) c += bundle_cost(ea[u][v], eb[map[u]][map[v]]);
        else c += total(ea[u][v]);
      }
    for (std::size_t x = 0; x < b.nodes.size(); ++x)
      for (std::size_t y = 0; y < b.nodes.size(); ++y)
        if (!hit[x] || !hit[y]) c += total(eb[x][y]);
    return c;
  }

  void go(std::size_t u) {
    if (u == a.nodes.size()) {
      best = std::min(best, cost());
      return;
    }
    map[u] = -1;
    go(u + 1);
    for (std::size_t x = 0; x < b.nodes.size(); ++x) {
      if (used[x]) continue;
      used[x] = true;
      map[u] = static_cast<long>(x);
      go(u + 1);
      used[x] = false;
    }
    map[u] = -1;
  }
};

}  // namespace

std::uint64_t brute_force_ged(const SymGraph& a, const SymGraph& b) {
  if (a.nodes.size() > 6 || b.nodes.size() > 6) throw std::invalid_argument("brute force limited to six nodes");
  Search s{a, b, edge_matrix(a), edge_matrix(b), std::vector<long>(a.nodes.size(), -1),
           std::vector<bool>(b.nodes.size(), false)};
  s.go(0);
  return s.best;
}

std::vector<SymGraph> small_graphs(std::uint64_t seed, std::size_t count, std::size_t max_nodes) {
  ExprGen g(seed, {{"x", 8}, {"y", 8}});
  std::vector<SymGraph> out;
  while (out.size() < count) {
    SymGraph s;
    if (g.rng() % 5 == 0) s = symdiff::symgraph::to_graph(std::vector{g.make(8, 1), g.make(8, 1)});
    else s = symdiff::symgraph::to_graph(g.make(g.rng() % 3 ? 8 : 1, 1 + g.rng() % 3));
    if (s.nodes.size() < 3 && g.rng() % 4) continue;  // mostly single leaves otherwise
    if (s.nodes.size() <= max_nodes) out.push_back(std::move(s));
  }
  return out;
}

}  // namespace oracle
