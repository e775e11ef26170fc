#include "symdiff/s3/ged.hpp"

#include <algorithm>
#include <map>
#include <queue>
#include <string>
#include <unordered_map>

namespace symdiff::s3 {

using symgraph::SymGraph;

namespace {

using Labels = std::vector<unsigned>;  // sorted operand indices of parallel edges

const Labels kNoEdges;

struct Prep {
  std::size_t n = 0;
  std::vector<int> label;  // interned, shared between the two graphs
  std::unordered_map<std::uint64_t, Labels> pairs;  // key u * n + v
  std::vector<std::pair<std::size_t, std::size_t>> edge_pairs;  // distinct (u, v) with edges
  std::size_t edge_count = 0;

  const Labels& at(std::size_t u, std::size_t v) const {
    auto it = pairs.find(static_cast<std::uint64_t>(u) * n + v);
    return it == pairs.end() ? kNoEdges : it->second;
  }
};

Prep prepare(const SymGraph& g, std::map<std::string, int>& interned) {
  Prep p;
  p.n = g.nodes.size();
  for (const auto& node : g.nodes) p.label.push_back(interned.emplace(node.label, interned.size()).first->second);
  for (const auto& e : g.edges) {
    auto& l = p.pairs[static_cast<std::uint64_t>(e.parent) * p.n + e.child];
    if (l.empty()) p.edge_pairs.push_back({e.parent, e.child});
    l.push_back(e.index);
  }
  for (auto& [k, l] : p.pairs) std::sort(l.begin(), l.end());
  std::sort(p.edge_pairs.begin(), p.edge_pairs.end());
  p.edge_count = g.edges.size();
  return p;
}

std::uint64_t pair_cost(const Labels& a, const Labels& b) {
  std::size_t common = 0;
  for (std::size_t i = 0, j = 0; i < a.size() && j < b.size();) {
    if (a[i] == b[j]) {
      ++common, ++i, ++j;
    } else if (a[i] < b[j]) {
      ++i;
    } else {
      ++j;
    }
  }
  return std::max(a.size(), b.size()) - common;
}

std::uint64_t mapping_cost(const Prep& a, const Prep& b, const std::vector<long>& m) {
  std::uint64_t cost = 0;
  std::vector<long> inv(b.n, -1);
  for (std::size_t u = 0; u < a.n; ++u) {
    if (m[u] < 0) {
      ++cost;
    } else {
      inv[m[u]] = static_cast<long>(u);
      if (a.label[u] != b.label[m[u]]) ++cost;
    }
  }
  for (long x : inv)
    if (x < 0) ++cost;
  for (const auto& [u, v] : a.edge_pairs) {
    const Labels& la = a.at(u, v);
    if (m[u] < 0 || m[v] < 0) cost += la.size();
    else cost += pair_cost(la, b.at(m[u], m[v]));
  }
  for (const auto& [x, y] : b.edge_pairs) {
    // Pairs whose preimage carries edges were charged above.
    if (inv[x] >= 0 && inv[y] >= 0 && !a.at(inv[x], inv[y]).empty()) continue;
    cost += b.at(x, y).size();
  }
  return cost;
}

// Node-label and edge-count bound over the unassigned parts of both graphs.
struct Bound {
  const Prep& a;
  const Prep& b;
  std::size_t labels;

  std::uint64_t operator()(const std::vector<char>& a_done, const std::vector<char>& b_used) const {
    std::vector<int> count(labels, 0);
    std::int64_t ra = 0, rb = 0;
    for (std::size_t u = 0; u < a.n; ++u)
      if (!a_done[u]) ++count[a.label[u]], ++ra;
    std::int64_t common = 0;
    for (std::size_t x = 0; x < b.n; ++x)
      if (!b_used[x]) {
        ++rb;
        if (count[b.label[x]] > 0) --count[b.label[x]], ++common;
      }
    std::int64_t ea = 0, eb = 0;
    for (const auto& [u, v] : a.edge_pairs)
      if (!a_done[u] || !a_done[v]) ea += static_cast<std::int64_t>(a.at(u, v).size());
    for (const auto& [x, y] : b.edge_pairs)
      if (!b_used[x] || !b_used[y]) eb += static_cast<std::int64_t>(b.at(x, y).size());
    return static_cast<std::uint64_t>(std::max(ra, rb) - common + std::abs(ea - eb));
  }
};

std::vector<long> greedy(const SymGraph& ga, const SymGraph& gb, const Prep& a, const Prep& b) {
  std::vector<long> m(a.n, -1);
  std::vector<char> used(b.n, 0);
  auto take = [&](std::size_t u, std::size_t x) {
    m[u] = static_cast<long>(x);
    used[x] = 1;
  };
  // Identical subexpressions first.
  std::unordered_map<std::uint64_t, std::size_t> by_id;
  for (std::size_t x = 0; x < b.n; ++x) by_id.emplace(gb.nodes[x].id, x);
  for (std::size_t u = 0; u < a.n; ++u) {
    auto it = by_id.find(ga.nodes[u].id);
    if (it != by_id.end() && !used[it->second] && a.label[u] == b.label[it->second]) take(u, it->second);
  }
  // Children-before-parents order, so structural agreement is known.
  std::vector<std::vector<std::pair<std::size_t, unsigned>>> kids_a(a.n), kids_b(b.n);
  for (const auto& e : ga.edges) kids_a[e.parent].push_back({e.child, e.index});
  for (const auto& e : gb.edges) kids_b[e.parent].push_back({e.child, e.index});
  auto agreement = [&](std::size_t u, std::size_t x) {
    int s = 0;
    for (const auto& [c, i] : kids_a[u])
      for (const auto& [d, j] : kids_b[x])
        if (i == j && m[c] == static_cast<long>(d)) ++s;
    return s;
  };
  for (int pass = 0; pass < 2; ++pass) {
    for (std::size_t u = 0; u < a.n; ++u) {
      if (m[u] >= 0) continue;
      long best = -1;
      int best_score = -1;
      for (std::size_t x = 0; x < b.n; ++x) {
        if (used[x]) continue;
        const bool same = a.label[u] == b.label[x];
        if (pass == 0 && !same) continue;
        const int s = agreement(u, x) * 2 + (same ? 1 : 0);
        if (s > best_score) best = static_cast<long>(x), best_score = s;
      }
      if (best >= 0) take(u, best);
    }
  }
  return m;
}

// Aligns the graphs from the roots down, pairing children by operand index.
std::vector<long> top_down(const SymGraph& ga, const SymGraph& gb, const Prep& a, const Prep& b) {
  std::vector<long> m(a.n, -1);
  std::vector<char> used(b.n, 0);
  std::vector<std::vector<std::pair<unsigned, std::size_t>>> kids_a(a.n), kids_b(b.n);
  for (const auto& e : ga.edges) kids_a[e.parent].push_back({e.index, e.child});
  for (const auto& e : gb.edges) kids_b[e.parent].push_back({e.index, e.child});
  std::vector<std::pair<std::size_t, std::size_t>> work;
  for (std::size_t i = 0; i < std::min(ga.roots.size(), gb.roots.size()); ++i) work.push_back({ga.roots[i], gb.roots[i]});
  for (std::size_t w = 0; w < work.size(); ++w) {
    auto [u, x] = work[w];
    if (m[u] >= 0 || used[x]) continue;
    m[u] = static_cast<long>(x);
    used[x] = 1;
    for (const auto& [i, c] : kids_a[u])
      for (const auto& [j, d] : kids_b[x])
        if (i == j) work.push_back({c, d});
  }
  // Leftovers by label, then by position.
  for (int pass = 0; pass < 2; ++pass)
    for (std::size_t u = 0; u < a.n; ++u) {
      if (m[u] >= 0) continue;
      for (std::size_t x = 0; x < b.n; ++x)
        if (!used[x] && (pass == 1 || a.label[u] == b.label[x])) {
          m[u] = static_cast<long>(x);
          used[x] = 1;
          break;
        }
    }
  return m;
}

std::vector<long> invert(const std::vector<long>& m, std::size_t n) {
  std::vector<long> inv(n, -1);
  for (std::size_t u = 0; u < m.size(); ++u)
    if (m[u] >= 0) inv[m[u]] = static_cast<long>(u);
  return inv;
}

struct SearchNode {
  long parent;
  long image;       // b-node or -1
  std::uint32_t depth;
  std::uint64_t g;
};

// Best-first search over partial mappings in a fixed a-node order. Returns
// false when the budget runs out.
bool astar(const Prep& a, const Prep& b, std::size_t labels, std::size_t budget, GedResult& out) {
  std::vector<std::size_t> order(a.n);
  for (std::size_t i = 0; i < a.n; ++i) order[i] = i;
  std::vector<std::size_t> degree(a.n, 0);
  for (const auto& [u, v] : a.edge_pairs) degree[u] += a.at(u, v).size(), degree[v] += a.at(u, v).size();
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return degree[x] > degree[y]; });

  const Bound bound{a, b, labels};
  std::vector<SearchNode> arena;
  using Entry = std::tuple<std::uint64_t, std::int64_t, long>;  // f, -depth, arena index
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> open;
  std::vector<char> a_done(a.n), b_used(b.n);
  std::vector<long> partial(a.n);

  auto load = [&](long idx) {
    std::fill(a_done.begin(), a_done.end(), 0);
    std::fill(b_used.begin(), b_used.end(), 0);
    std::fill(partial.begin(), partial.end(), -1);
    for (long i = idx; i >= 0 && arena[i].depth > 0; i = arena[i].parent) {
      const std::size_t u = order[arena[i].depth - 1];
      a_done[u] = 1;
      partial[u] = arena[i].image;
      if (arena[i].image >= 0) b_used[arena[i].image] = 1;
    }
  };

  arena.push_back({-1, -1, 0, 0});
  open.push({bound(a_done, b_used), 0, 0});
  const std::uint32_t goal_depth = static_cast<std::uint32_t>(a.n) + 1;
  std::size_t expanded = 0;
  while (!open.empty()) {
    auto [f, negd, idx] = open.top();
    open.pop();
    const SearchNode cur = arena[idx];
    if (cur.depth == goal_depth) {
      load(cur.parent);
      out.distance = out.lower_bound = cur.g;
      out.mapping = partial;
      out.approximate = false;
      return true;
    }
    if (++expanded > budget) return false;
    load(idx);
    if (cur.depth == a.n) {
      // Insert what is left of b.
      std::uint64_t tail = 0;
      for (std::size_t x = 0; x < b.n; ++x) tail += !b_used[x];
      for (const auto& [x, y] : b.edge_pairs)
        if (!b_used[x] || !b_used[y]) tail += b.at(x, y).size();
      arena.push_back({idx, -1, goal_depth, cur.g + tail});
      open.push({cur.g + tail, -static_cast<std::int64_t>(goal_depth), static_cast<long>(arena.size() - 1)});
      continue;
    }
    const std::size_t u = order[cur.depth];
    for (long x = -1; x < static_cast<long>(b.n); ++x) {
      if (x >= 0 && b_used[x]) continue;
      std::uint64_t step = x < 0 ? 1 : (a.label[u] != b.label[x] ? 1 : 0);
      for (std::size_t d = 0; d < cur.depth; ++d) {
        const std::size_t v = order[d];
        const long y = partial[v];
        if (x < 0 || y < 0) {
          step += a.at(u, v).size() + a.at(v, u).size();
        } else {
          step += pair_cost(a.at(u, v), b.at(x, y)) + pair_cost(a.at(v, u), b.at(y, x));
        }
      }
      a_done[u] = 1;
      if (x >= 0) b_used[x] = 1;
      const std::uint64_t g = cur.g + step;
      const std::uint64_t h = bound(a_done, b_used);
      a_done[u] = 0;
      if (x >= 0) b_used[x] = 0;
      arena.push_back({idx, x, cur.depth + 1, g});
      open.push({g + h, -static_cast<std::int64_t>(cur.depth + 1), static_cast<long>(arena.size() - 1)});
    }
  }
  return false;
}

}  // namespace

std::uint64_t edit_cost(const SymGraph& a, const SymGraph& b, const std::vector<long>& mapping) {
  std::map<std::string, int> interned;
  const Prep pa = prepare(a, interned), pb = prepare(b, interned);
  return mapping_cost(pa, pb, mapping);
}

GedResult ged(const SymGraph& a, const SymGraph& b, const GedOptions& opts) {
  GedResult r;
  if (symgraph::graph_equal(a, b)) {
    r.mapping.resize(a.nodes.size());
    for (std::size_t i = 0; i < a.nodes.size(); ++i) r.mapping[i] = static_cast<long>(i);
    return r;
  }
  std::map<std::string, int> interned;
  const Prep pa = prepare(a, interned), pb = prepare(b, interned);
  const std::size_t labels = interned.size();

  if (std::max(pa.n, pb.n) <= opts.exact_limit && astar(pa, pb, labels, opts.expansion_budget, r)) return r;

  std::vector<char> none_a(pa.n, 0), none_b(pb.n, 0);
  r.lower_bound = Bound{pa, pb, labels}(none_a, none_b);
  // Distinct expression graphs are never isomorphic: the DAG is maximally
  // shared, so it determines its expression.
  if (a.root_exprs.size() == 1 && b.root_exprs.size() == 1 && !sym::equal(a.root_exprs[0], b.root_exprs[0]))
    r.lower_bound = std::max<std::uint64_t>(r.lower_bound, 1);
  // Upper bound: best of several greedy mappings, tried in both directions so
  // the result is symmetric.
  const std::vector<std::vector<long>> candidates{
      greedy(a, b, pa, pb), invert(greedy(b, a, pb, pa), pa.n),
      top_down(a, b, pa, pb), invert(top_down(b, a, pb, pa), pa.n)};
  r.distance = ~std::uint64_t{0};
  for (const auto& m : candidates) {
    const std::uint64_t c = mapping_cost(pa, pb, m);
    if (c < r.distance) r.distance = c, r.mapping = m;
  }
  r.approximate = r.distance != r.lower_bound;
  return r;
}

}  // namespace symdiff::s3
