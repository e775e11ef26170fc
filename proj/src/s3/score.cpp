#include "symdiff/s3/score.hpp"

#include <algorithm>
#include <cstdio>
#include <exception>
#include <json.hpp>
#include <set>
#include <sstream>

#include "symdiff/symgraph/kquery.hpp"

namespace symdiff::s3 {

using sym::ExprRef;
using sym::Op;
using symexec::PathSummary;
using symexec::RegionShape;
using symexec::Terminal;

namespace {

ExprRef conjunction(std::vector<ExprRef> cs, const symgraph::NormalizeOptions& opts) {
  std::sort(cs.begin(), cs.end(), sym::ExprLess{});
  cs.erase(std::unique(cs.begin(), cs.end(), [](const ExprRef& a, const ExprRef& b) { return sym::equal(a, b); }),
           cs.end());
  ExprRef g;
  for (const auto& c : cs) g = g ? sym::binary(Op::And, g, c) : c;
  return g ? symgraph::normalize(g, opts) : sym::constant(1, 1);
}

std::vector<ExprRef> normalized_constraints(const PathSummary& p, const symgraph::NormalizeOptions& opts) {
  std::vector<ExprRef> out;
  for (const auto& c : p.constraints) {
    auto n = symgraph::normalize(c, opts);
    if (!n->is_const(1)) out.push_back(n);
  }
  return out;
}

bool merged_path(const PathSummary& p) { return p.terminal == Terminal::Return && !p.ub; }

struct Prepared {
  ExprRef guard;
  std::vector<ExprRef> constraints;
  std::map<std::string, ExprRef> outputs;  // aligned, normalized
};

std::vector<Prepared> prepare(const std::vector<PathSummary>& paths, const symgraph::AlignmentSpec& spec,
                              const symgraph::NormalizeOptions& opts, std::map<std::string, std::string>* failures) {
  std::vector<Prepared> out;
  for (const auto& p : paths) {
    if (!merged_path(p)) continue;
    Prepared pp;
    pp.constraints = normalized_constraints(p, opts);
    pp.guard = conjunction(pp.constraints, opts);
    for (auto& [k, v] : symgraph::align_outputs(p, spec, failures)) pp.outputs[k] = symgraph::normalize(v, opts);
    out.push_back(std::move(pp));
  }
  std::stable_sort(out.begin(), out.end(), [](const Prepared& a, const Prepared& b) {
    if (a.guard->hash() != b.guard->hash()) return a.guard->hash() < b.guard->hash();
    return sym::ExprLess{}(a.guard, b.guard);
  });
  return out;
}

std::optional<unsigned> output_width(const std::vector<Prepared>& ps, const std::string& output) {
  for (const auto& p : ps)
    if (auto it = p.outputs.find(output); it != p.outputs.end()) return it->second->width();
  return std::nullopt;
}

MergedOutput merge(const std::vector<Prepared>& ps, const std::string& output, const symgraph::NormalizeOptions& opts) {
  MergedOutput m;
  auto width = output_width(ps, output);
  if (!width) return m;
  const ExprRef entry = sym::symbol(output + "@entry", *width);
  auto value_of = [&](const Prepared& p) {
    auto it = p.outputs.find(output);
    return it == p.outputs.end() ? entry : it->second;
  };
  ExprRef acc = value_of(ps.back());
  for (std::size_t i = ps.size() - 1; i-- > 0;) {
    const ExprRef v = value_of(ps[i]);
    if (!sym::equal(v, acc)) acc = sym::ite(ps[i].guard, v, acc);
  }
  m.value = symgraph::normalize(acc, opts);
  m.paths = ps.size();
  return m;
}

}  // namespace

ExprRef path_guard(const PathSummary& p, const symgraph::NormalizeOptions& opts) {
  return conjunction(normalized_constraints(p, opts), opts);
}

MergedOutput merge_paths(const std::vector<PathSummary>& paths, const std::string& output,
                         const symgraph::AlignmentSpec& spec, const symgraph::NormalizeOptions& opts) {
  return merge(prepare(paths, spec, opts, nullptr), output, opts);
}

// ---------------------------------------------------------------------------
// pretty printing

namespace {

std::string const_text(std::uint64_t v) {
  if (v < 256) return std::to_string(v);
  char buf[24];
  std::snprintf(buf, sizeof buf, "0x%llx", static_cast<unsigned long long>(v));
  return buf;
}

const char* infix(Op op) {
  switch (op) {
    case Op::Add: return "+";
    case Op::Sub: return "-";
    case Op::Mul: return "*";
    case Op::UDiv: return "/u";
    case Op::SDiv: return "/s";
    case Op::And: return "&";
    case Op::Or: return "|";
    case Op::Xor: return "^";
    case Op::Shl: return "<<";
    case Op::LShr: return ">>u";
    case Op::AShr: return ">>s";
    case Op::Eq: return "==";
    case Op::Ne: return "!=";
    case Op::Ult: return "<u";
    case Op::Slt: return "<s";
    case Op::Ule: return "<=u";
    case Op::Sle: return "<=s";
    default: return "?";
  }
}

// Comparison under a negation, printed as its complement.
const char* negated(Op op) {
  switch (op) {
    case Op::Eq: return "!=";
    case Op::Ne: return "==";
    case Op::Ult: return ">=u";
    case Op::Slt: return ">=s";
    case Op::Ule: return ">u";
    case Op::Sle: return ">s";
    default: return nullptr;
  }
}

struct Pretty {
  const std::map<std::string, RegionShape>& shapes;

  std::string read(const sym::Expr& e) const {
    const auto& off = e.kid(0);
    auto it = shapes.find(e.name());
    if (!off->is_const()) return e.name() + "[" + text(off, true) + "]";
    const std::uint64_t o = off->value();
    if (it != shapes.end() && !it->second.buffer)
      for (const auto& [lo, path] : it->second.leaves)
        if (lo == o) return e.name() + path;
    if (it != shapes.end() && !it->second.buffer && o == 0 && it->second.leaves.empty()) return "*" + e.name();
    if (e.width() == 8 || (it != shapes.end() && it->second.buffer)) {
      if (e.width() == 8) return e.name() + "[" + std::to_string(o) + "]";
      return e.name() + "[" + std::to_string(o) + ".." + std::to_string(o + e.width() / 8) + "]";
    }
    return e.name() + "+" + std::to_string(o);
  }

  std::string text(const ExprRef& e, bool top = false) const {
    auto wrap = [&](const std::string& s) { return top ? s : "(" + s + ")"; };
    switch (e->op()) {
      case Op::Const: return const_text(e->value());
      case Op::Sym: return e->name();
      case Op::Read: return read(*e);
      case Op::ExtCall:
        return e->name() + "#" + std::to_string(e->site()) + "." + std::to_string(e->occurrence()) + "()";
      case Op::ZExt: return "zext" + std::to_string(e->width()) + "(" + text(e->kid(0), true) + ")";
      case Op::SExt: return "sext" + std::to_string(e->width()) + "(" + text(e->kid(0), true) + ")";
      case Op::Trunc: return "trunc" + std::to_string(e->width()) + "(" + text(e->kid(0), true) + ")";
      case Op::Neg: return "-" + text(e->kid(0));
      case Op::Safe: return "safe(" + text(e->kid(0), true) + ")";
      case Op::Not: {
        const auto& k = e->kid(0);
        if (const char* n = negated(k->op())) return wrap(text(k->kid(0)) + " " + n + " " + text(k->kid(1)));
        return (e->width() == 1 ? "!" : "~") + text(k);
      }
      case Op::Ite:
        return wrap(text(e->kid(0)) + " ? " + text(e->kid(1)) + " : " + text(e->kid(2)));
      default:
        return wrap(text(e->kid(0)) + " " + infix(e->op()) + " " + text(e->kid(1)));
    }
  }
};

}  // namespace

std::string pretty(const ExprRef& e, const std::map<std::string, RegionShape>& shapes) {
  return Pretty{shapes}.text(e, true);
}

// ---------------------------------------------------------------------------
// scoring

std::uint64_t S3Report::total_distance() const {
  std::uint64_t d = 0;
  for (const auto& o : outputs) d += o.distance;
  return d;
}

namespace {

SafetyCounts count(const symexec::ExecResult& r) {
  SafetyCounts s;
  for (const auto& p : r.paths) {
    switch (p.terminal) {
      case Terminal::Return: ++s.returns; break;
      case Terminal::Panic: ++s.panics; break;
      case Terminal::Undefined: ++s.undefined; break;
      case Terminal::BudgetExhausted: ++s.exhausted; break;
    }
    if (p.ub) ++s.ub;
  }
  return s;
}

std::map<std::string, RegionShape> merged_shapes(const symexec::ExecResult& a, const symexec::ExecResult& b) {
  auto out = a.regions;
  for (const auto& [k, v] : b.regions) out.emplace(k, v);
  return out;
}

// Pointer-style value: a base expression plus a constant byte offset.
std::optional<std::pair<std::string, std::int64_t>> base_offset(const ExprRef& v) {
  if (v->op() == Op::Add && v->kid(1)->is_const() && !v->kid(0)->is_const())
    return std::make_pair(symgraph::print_expr(v->kid(0)), sym::to_signed(v->kid(1)->value(), v->width()));
  if (v->op() == Op::Sym || v->op() == Op::Read) return std::make_pair(symgraph::print_expr(v), std::int64_t{0});
  return std::nullopt;
}

std::map<std::string, std::int64_t> min_offsets(const std::vector<Prepared>& ps, const std::string& output) {
  std::map<std::string, std::int64_t> out;
  for (const auto& p : ps) {
    auto it = p.outputs.find(output);
    if (it == p.outputs.end()) continue;
    auto bo = base_offset(it->second);
    if (!bo) continue;
    auto [pos, fresh] = out.emplace(bo->first, bo->second);
    if (!fresh) pos->second = std::min(pos->second, bo->second);
  }
  return out;
}

std::string signed_offset(std::int64_t o) { return (o < 0 ? "" : "+") + std::to_string(o); }

class Scorer {
 public:
  Scorer(const symexec::ExecResult& c, const symexec::ExecResult& r, const symgraph::AlignmentSpec& spec,
         const ScoreOptions& opts)
      : c_res_(c), r_res_(r), opts_(opts), shapes_(merged_shapes(c, r)) {
    const symgraph::AlignmentSpec none;
    c_ = prepare(c.paths, none, opts.normalize, nullptr);
    r_ = prepare(r.paths, spec, opts.normalize, &failures_);
    one_sided();
  }

  S3Report run() {
    S3Report rep;
    rep.function = c_res_.function;
    rep.c_safety = count(c_res_);
    rep.rust_safety = count(r_res_);
    rep.c_incomplete = c_res_.incomplete;
    rep.rust_incomplete = r_res_.incomplete;
    if (c_.empty()) rep.diagnostics.push_back("empty-output: c side has no returning path");
    if (r_.empty()) rep.diagnostics.push_back("empty-output: rust side has no returning path");
    if (c_res_.incomplete) rep.diagnostics.push_back("c exploration incomplete: " + c_res_.incomplete_reason);
    if (r_res_.incomplete) rep.diagnostics.push_back("rust exploration incomplete: " + r_res_.incomplete_reason);
    for (const auto& s : only_c_) rep.diagnostics.push_back("constraint only in c: " + s);
    for (const auto& s : only_r_) rep.diagnostics.push_back("constraint only in rust: " + s);

    std::set<std::string> names;
    for (const auto* side : {&c_, &r_})
      for (const auto& p : *side)
        for (const auto& [k, v] : p.outputs) names.insert(k);
    std::vector<std::string> order(names.begin(), names.end());
    // The return value leads.
    std::stable_partition(order.begin(), order.end(), [](const std::string& s) { return s == "ret"; });
    rep.outputs.resize(order.size());
    std::vector<std::exception_ptr> errors(order.size());
#pragma omp parallel for schedule(dynamic) if (order.size() > 1)
    for (std::size_t i = 0; i < order.size(); ++i) {
      try {
        rep.outputs[i] = score_output(order[i]);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
    for (const auto& e : errors)
      if (e) std::rethrow_exception(e);
    rep.outputs_total = rep.outputs.size();
    for (const auto& o : rep.outputs) rep.outputs_equivalent += o.equivalent;
    return rep;
  }

 private:
  const symexec::ExecResult& c_res_;
  const symexec::ExecResult& r_res_;
  const ScoreOptions& opts_;
  std::map<std::string, RegionShape> shapes_;
  std::vector<Prepared> c_, r_;
  std::map<std::string, std::string> failures_;
  std::vector<std::string> only_c_, only_r_;

  static constexpr std::size_t kMaxListed = 6;
  static constexpr std::size_t kShortContext = 12;

  void one_sided() {
    auto collect = [](const std::vector<Prepared>& ps) {
      std::set<ExprRef, sym::ExprLess> s;
      for (const auto& p : ps) s.insert(p.constraints.begin(), p.constraints.end());
      return s;
    };
    const auto cs = collect(c_), rs = collect(r_);
    for (const auto& e : cs)
      if (!rs.count(e) && only_c_.size() < kMaxListed) only_c_.push_back(pretty(e, shapes_));
    for (const auto& e : rs)
      if (!cs.count(e) && only_r_.size() < kMaxListed) only_r_.push_back(pretty(e, shapes_));
  }

  bool alignment_failed(const std::string& output) const {
    return failures_.count(output) > 0;
  }

  OutputScore score_output(const std::string& name) const {
    OutputScore o;
    o.output = name;
    const auto cm = merge(c_, name, opts_.normalize);
    const auto rm = merge(r_, name, opts_.normalize);
    if (cm.value) {
      o.c = symgraph::to_graph(*cm.value);
      o.c_graph = symgraph::node_name(o.c.nodes[o.c.roots[0]].id);
    }
    if (rm.value) {
      o.rust = symgraph::to_graph(*rm.value);
      o.rust_graph = symgraph::node_name(o.rust.nodes[o.rust.roots[0]].id);
    }
    if (!cm.value || !rm.value) {
      const bool empty_side = !cm.value ? c_.empty() : r_.empty();
      o.reason = empty_side ? "empty-output" : "missing-output";
      o.distance = o.lower_bound = graph_size(cm.value ? o.c : o.rust);
      o.diagnostics.push_back(std::string("output produced only by ") + (cm.value ? "c" : "rust"));
      if (alignment_failed(name)) o.diagnostics.push_back(failures_.at(name));
      return o;
    }
    if (opts_.per_path) {
      per_path(o);
    } else {
      const auto g = ged(o.c, o.rust, opts_.ged);
      o.distance = g.distance;
      o.lower_bound = g.lower_bound;
      o.approximate = g.approximate;
      if (o.distance > 0) describe(o, g.mapping);
    }
    if (alignment_failed(name)) {
      o.reason = "alignment-failure";
      o.diagnostics.push_back(failures_.at(name));
      o.distance = std::max<std::uint64_t>(o.distance, 1);
    }
    o.equivalent = o.distance == 0;
    if (!o.equivalent) path_diagnostics(o);
    return o;
  }

  // Pairs paths with identical guards; unmatched paths cost their whole graph.
  void per_path(OutputScore& o) const {
    std::vector<char> used(r_.size(), 0);
    auto graph_of = [&](const Prepared& p) {
      auto it = p.outputs.find(o.output);
      return symgraph::to_graph(it == p.outputs.end() ? sym::symbol(o.output + "@entry", 1) : it->second);
    };
    for (const auto& cp : c_) {
      const auto gc = graph_of(cp);
      bool matched = false;
      for (std::size_t j = 0; j < r_.size() && !matched; ++j) {
        if (used[j] || !sym::equal(cp.guard, r_[j].guard)) continue;
        used[j] = 1;
        matched = true;
        const auto g = ged(gc, graph_of(r_[j]), opts_.ged);
        o.distance += g.distance;
        o.lower_bound += g.lower_bound;
        o.approximate |= g.approximate;
      }
      if (!matched) o.distance += graph_size(gc), o.lower_bound += graph_size(gc);
    }
    for (std::size_t j = 0; j < r_.size(); ++j)
      if (!used[j]) {
        const auto s = graph_size(graph_of(r_[j]));
        o.distance += s;
        o.lower_bound += s;
      }
  }

  // First differing node pair along the edit path, in children-first order.
  // A relabeled leaf is shown with its parent when that stays short; a node
  // whose operands differ is shown by the first differing operand.
  void describe(OutputScore& o, const std::vector<long>& m) const {
    const auto& a = o.c;
    const auto& b = o.rust;
    std::vector<long> inv(b.nodes.size(), -1), parent_a(a.nodes.size(), -1), parent_b(b.nodes.size(), -1);
    for (std::size_t u = 0; u < m.size(); ++u)
      if (m[u] >= 0) inv[m[u]] = static_cast<long>(u);
    for (const auto& e : a.edges) parent_a[e.child] = static_cast<long>(e.parent);
    for (const auto& e : b.edges) parent_b[e.child] = static_cast<long>(e.parent);
    auto context = [&](const symgraph::SymGraph& g, const std::vector<long>& parent, long n) {
      const auto& e = g.nodes[n].expr;
      if (e->kids().empty() && parent[n] >= 0 && sym::dag_size(g.nodes[parent[n]].expr) <= kShortContext)
        return pretty(g.nodes[parent[n]].expr, shapes_);
      return pretty(e, shapes_);
    };
    for (std::size_t u = 0; u < a.nodes.size(); ++u) {
      const long x = m[u];
      if (x < 0) {
        o.diagnostics.push_back("c-only subexpression: " + context(a, parent_a, static_cast<long>(u)));
        return;
      }
      const auto& ea = a.nodes[u].expr;
      const auto& eb = b.nodes[x].expr;
      if (a.nodes[u].label != b.nodes[x].label) {
        o.diagnostics.push_back("first difference: c " + context(a, parent_a, static_cast<long>(u)) + " vs rust " +
                                context(b, parent_b, x));
        return;
      }
      for (std::size_t i = 0; i < ea->kids().size(); ++i) {
        if (sym::equal(ea->kid(i), eb->kid(i))) continue;
        // Operands that the edit path maps onto each other are reported at
        // their own node.
        const auto& ka = ea->kid(i);
        bool mapped_same = false;
        for (std::size_t c = 0; c < a.nodes.size(); ++c)
          if (a.nodes[c].expr == ka && m[c] >= 0 && b.nodes[m[c]].expr == eb->kid(i)) mapped_same = true;
        if (mapped_same) continue;
        o.diagnostics.push_back("first difference: operand " + std::to_string(i) + " of " + a.nodes[u].label +
                                ": c " + pretty(ka, shapes_) + " vs rust " + pretty(eb->kid(i), shapes_));
        return;
      }
    }
    for (std::size_t x = 0; x < b.nodes.size(); ++x)
      if (inv[x] < 0) {
        o.diagnostics.push_back("rust-only subexpression: " + context(b, parent_b, static_cast<long>(x)));
        return;
      }
  }

  void path_diagnostics(OutputScore& o) const {
    // Same guard, different binding.
    std::size_t listed = 0;
    for (const auto& cp : c_) {
      for (const auto& rp : r_) {
        if (!sym::equal(cp.guard, rp.guard)) continue;
        auto ci = cp.outputs.find(o.output);
        auto ri = rp.outputs.find(o.output);
        if (ci == cp.outputs.end() || ri == rp.outputs.end() || sym::equal(ci->second, ri->second)) continue;
        if (listed++ == 3) break;
        o.diagnostics.push_back("when " + pretty(cp.guard, shapes_) + ": c binds " + pretty(ci->second, shapes_) +
                                ", rust binds " + pretty(ri->second, shapes_));
      }
    }
    const auto mc = min_offsets(c_, o.output), mr = min_offsets(r_, o.output);
    for (const auto& [base, off] : mc) {
      auto it = mr.find(base);
      if (it == mr.end() || it->second == off) continue;
      o.diagnostics.push_back("minimum return offset: c " + base + signed_offset(off) + ", rust " + base +
                              signed_offset(it->second));
    }
    for (const auto& s : only_c_) o.diagnostics.push_back("constraint only in c: " + s);
    for (const auto& s : only_r_) o.diagnostics.push_back("constraint only in rust: " + s);
  }
};

}  // namespace

S3Report score_function(const symexec::ExecResult& c, const symexec::ExecResult& rust,
                        const symgraph::AlignmentSpec& spec, const ScoreOptions& opts) {
  return Scorer(c, rust, spec, opts).run();
}

std::string to_json(const S3Report& r) {
  using nlohmann::json;
  auto safety = [](const SafetyCounts& s) {
    return json{{"returns", s.returns}, {"panics", s.panics}, {"undefined", s.undefined},
                {"exhausted", s.exhausted}, {"ub", s.ub}};
  };
  json j;
  j["version"] = kReportVersion;
  j["function"] = r.function;
  j["outputs"] = json::array();
  for (const auto& o : r.outputs) {
    j["outputs"].push_back({{"output", o.output},
                            {"c_graph", o.c_graph},
                            {"rust_graph", o.rust_graph},
                            {"distance", o.distance},
                            {"lower_bound", o.lower_bound},
                            {"equivalent", o.equivalent},
                            {"approximate", o.approximate},
                            {"reason", o.reason},
                            {"diagnostics", o.diagnostics}});
  }
  j["outputs_total"] = r.outputs_total;
  j["outputs_equivalent"] = r.outputs_equivalent;
  j["distance"] = r.total_distance();
  j["safety_paths"] = {{"c", safety(r.c_safety)}, {"rust", safety(r.rust_safety)}};
  j["incomplete"] = {{"c", r.c_incomplete}, {"rust", r.rust_incomplete}};
  j["diagnostics"] = r.diagnostics;
  return j.dump(2);
}

std::string to_table(const S3Report& r) {
  std::ostringstream os;
  std::size_t w = 6;
  for (const auto& o : r.outputs) w = std::max(w, o.output.size());
  auto pad = [](std::string s, std::size_t n) {
    s.resize(std::max(n, s.size()), ' ');
    return s;
  };
  os << "function " << r.function << ": " << r.outputs_equivalent << "/" << r.outputs_total
     << " outputs equivalent\n";
  auto dist = [](const OutputScore& o) {
    std::string d = std::to_string(o.distance);
    if (o.approximate) d = "<=" + d + " (>=" + std::to_string(o.lower_bound) + ")";
    return d;
  };
  std::size_t dw = 8;
  for (const auto& o : r.outputs) dw = std::max(dw, dist(o).size());
  os << pad("output", w) << "  " << pad("distance", dw) << "  verdict\n";
  for (const auto& o : r.outputs) {
    std::string verdict = o.equivalent ? "equivalent" : "divergent";
    if (!o.reason.empty()) verdict += " (" + o.reason + ")";
    os << pad(o.output, w) << "  " << pad(dist(o), dw) << "  " << verdict << "\n";
    for (const auto& diag : o.diagnostics) os << pad("", w) << "    " << diag << "\n";
  }
  auto safety = [&](const char* side, const SafetyCounts& s, bool incomplete) {
    os << side << ": " << s.returns << " returning, " << s.panics << " panicking, " << s.undefined << " undefined, "
       << s.exhausted << " budget-exhausted" << (s.ub ? ", " + std::to_string(s.ub) + " ub" : std::string())
       << (incomplete ? " (incomplete)" : "") << "\n";
  };
  safety("c", r.c_safety, r.c_incomplete);
  safety("rust", r.rust_safety, r.rust_incomplete);
  // Function-level lines already shown under an output are not repeated.
  std::set<std::string> shown;
  for (const auto& o : r.outputs) shown.insert(o.diagnostics.begin(), o.diagnostics.end());
  for (const auto& d : r.diagnostics)
    if (!shown.count(d)) os << d << "\n";
  return os.str();
}

}  // namespace symdiff::s3
