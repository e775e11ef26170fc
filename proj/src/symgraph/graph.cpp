#include "symdiff/symgraph/graph.hpp"

#include <cstdio>
#include <unordered_map>

namespace symdiff::symgraph {

using sym::Op;

std::string node_label(const sym::Expr& e) {
  std::string l = std::string(sym::op_name(e.op())) + " w" + std::to_string(e.width());
  switch (e.op()) {
    case Op::Const: return l + " " + std::to_string(e.value());
    case Op::Sym: return l + " " + e.name();
    case Op::Read: return l + " " + e.name();
    case Op::ExtCall:
      return l + " " + e.name() + "#" + std::to_string(e.site()) + "." + std::to_string(e.occurrence());
    default: return l;
  }
}

namespace {

class Builder {
 public:
  SymGraph g;

  std::size_t add(const sym::ExprRef& root) {
    // Iterative post-order; node ids come from the structural hash, with a
    // probe on the rare collision between unequal expressions.
    std::vector<std::pair<const sym::ExprRef*, bool>> stack{{&root, false}};
    while (!stack.empty()) {
      auto [ref, expanded] = stack.back();
      stack.pop_back();
      const sym::Expr* e = ref->get();
      if (find(*e) != kNone) continue;
      if (!expanded) {
        stack.push_back({ref, true});
        for (auto it = e->kids().rbegin(); it != e->kids().rend(); ++it) stack.push_back({&*it, false});
        continue;
      }
      std::uint64_t id = e->hash();
      while (by_id_.count(id)) ++id;
      const std::size_t idx = g.nodes.size();
      g.nodes.push_back({id, node_label(*e), *ref});
      by_id_[id] = idx;
      members_.push_back(e);
      for (unsigned i = 0; i < e->kids().size(); ++i) g.edges.push_back({idx, find(*e->kid(i)), i});
    }
    return find(*root);
  }

 private:
  static constexpr std::size_t kNone = static_cast<std::size_t>(-1);
  std::unordered_map<std::uint64_t, std::size_t> by_id_;
  std::vector<const sym::Expr*> members_;

  std::size_t find(const sym::Expr& e) const {
    for (std::uint64_t id = e.hash();; ++id) {
      auto it = by_id_.find(id);
      if (it == by_id_.end()) return kNone;
      if (sym::equal(*members_[it->second], e)) return it->second;
    }
  }
};

}  // namespace

SymGraph to_graph(const std::vector<sym::ExprRef>& roots) {
  Builder b;
  for (const auto& r : roots) {
    b.g.roots.push_back(b.add(r));
    b.g.root_exprs.push_back(r);
  }
  return std::move(b.g);
}

bool graph_equal(const SymGraph& a, const SymGraph& b) {
  if (a.nodes.size() != b.nodes.size() || a.edges.size() != b.edges.size() || a.roots != b.roots) return false;
  for (std::size_t i = 0; i < a.nodes.size(); ++i)
    if (a.nodes[i].id != b.nodes[i].id || a.nodes[i].label != b.nodes[i].label) return false;
  for (std::size_t i = 0; i < a.edges.size(); ++i)
    if (a.edges[i].parent != b.edges[i].parent || a.edges[i].child != b.edges[i].child ||
        a.edges[i].index != b.edges[i].index)
      return false;
  return true;
}

std::string node_name(std::uint64_t id) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "h%016llx", static_cast<unsigned long long>(id));
  return buf;
}

namespace {

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out;
}

}  // namespace

std::string to_dot(const SymGraph& g, std::string_view name) {
  std::string out = "digraph \"" + escape(std::string(name)) + "\" {\n";
  out += "  node [shape=box, fontname=\"monospace\"];\n";
  for (std::size_t i = 0; i < g.nodes.size(); ++i) {
    out += "  " + node_name(g.nodes[i].id) + " [label=\"" + escape(g.nodes[i].label) + "\"";
    for (std::size_t r : g.roots)
      if (r == i) {
        out += ", peripheries=2";
        break;
      }
    out += "];\n";
  }
  for (const auto& e : g.edges)
    out += "  " + node_name(g.nodes[e.parent].id) + " -> " + node_name(g.nodes[e.child].id) + " [label=\"" +
           std::to_string(e.index) + "\"];\n";
  return out + "}\n";
}

}  // namespace symdiff::symgraph
