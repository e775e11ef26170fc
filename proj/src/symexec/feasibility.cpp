#include "symdiff/symexec/feasibility.hpp"

#include <omp.h>

#include <atomic>
#include <map>
#include <set>
#include <string>
#include <unordered_set>

namespace symdiff::sym {

const char* to_string(Feasibility f) {
  switch (f) {
    case Feasibility::Feasible: return "feasible";
    case Feasibility::Infeasible: return "infeasible";
    case Feasibility::Unknown: return "unknown";
  }
  return "?";
}

ExprRef predicate_of(const ExprRef& constraint) {
  return constraint->op() == Op::Safe ? constraint->kid(0) : constraint;
}

std::optional<std::uint64_t> find_witness_serial(const CompiledSet& cs) {
  const std::uint64_t space = 1ULL << cs.total_bits();
  std::vector<std::uint64_t> atoms;
  std::vector<std::uint64_t> scratch(cs.node_count());
  for (std::uint64_t i = 0; i < space; ++i) {
    cs.decode(i, atoms);
    if (cs.all_true(atoms.data(), scratch.data())) return i;
  }
  return std::nullopt;
}

std::optional<std::uint64_t> find_witness_parallel(const CompiledSet& cs) {
  const std::int64_t space = static_cast<std::int64_t>(1ULL << cs.total_bits());
  constexpr std::int64_t kBlock = 1024;
  const std::int64_t blocks = (space + kBlock - 1) / kBlock;
  std::atomic<std::int64_t> best{space};
#pragma omp parallel
  {
    std::vector<std::uint64_t> atoms;
    std::vector<std::uint64_t> scratch(cs.node_count());
#pragma omp for schedule(dynamic, 1)
    for (std::int64_t blk = 0; blk < blocks; ++blk) {
      const std::int64_t lo = blk * kBlock;
      if (lo >= best.load(std::memory_order_relaxed)) continue;
      const std::int64_t hi = std::min(space, lo + kBlock);
      for (std::int64_t i = lo; i < hi; ++i) {
        cs.decode(static_cast<std::uint64_t>(i), atoms);
        if (cs.all_true(atoms.data(), scratch.data())) {
          std::int64_t cur = best.load();
          while (i < cur && !best.compare_exchange_weak(cur, i)) {
          }
          break;
        }
      }
    }
  }
  if (best.load() == space) return std::nullopt;
  return static_cast<std::uint64_t>(best.load());
}

namespace {

// Equality literals: not/ne are folded into a polarity, operands ordered.
struct Literal {
  ExprRef atom;
  bool positive;
};

void literals(const ExprRef& p, bool positive, std::vector<Literal>& out) {
  if (p->op() == Op::Not && p->width() == 1) return literals(p->kid(0), !positive, out);
  if (positive && p->op() == Op::And && p->width() == 1) {
    literals(p->kid(0), true, out);
    literals(p->kid(1), true, out);
    return;
  }
  if (p->op() == Op::Eq || p->op() == Op::Ne) {
    ExprRef a = p->kid(0), b = p->kid(1);
    if (ExprLess{}(b, a)) std::swap(a, b);
    out.push_back({binary(Op::Eq, a, b), p->op() == Op::Eq ? positive : !positive});
    return;
  }
  out.push_back({p, positive});
}

// Cheap refutation for sets too wide to enumerate: a literal and its
// negation, or one term equated with two different constants.
bool contradictory(const std::vector<ExprRef>& preds) {
  std::vector<Literal> lits;
  for (const auto& p : preds) literals(p, true, lits);
  std::map<ExprRef, bool, ExprLess> polarity;
  std::map<ExprRef, std::uint64_t, ExprLess> pinned;
  for (const auto& l : lits) {
    auto [it, fresh] = polarity.emplace(l.atom, l.positive);
    if (!fresh && it->second != l.positive) return true;
    if (!l.positive || l.atom->op() != Op::Eq) continue;
    const auto& a = l.atom->kid(0);
    const auto& b = l.atom->kid(1);
    const ExprRef* term = a->is_const() ? &b : b->is_const() ? &a : nullptr;
    if (!term || (*term)->is_const()) continue;
    const std::uint64_t v = a->is_const() ? a->value() : b->value();
    auto [pin, added] = pinned.emplace(*term, v);
    if (!added && pin->second != v) return true;
  }
  return false;
}

}  // namespace

FeasibilityResult check_feasible(const std::vector<ExprRef>& constraints, unsigned max_bits, Kernel kernel) {
  std::vector<ExprRef> preds;
  preds.reserve(constraints.size());
  for (const auto& c : constraints) {
    ExprRef p = predicate_of(c);
    if (p->is_const(1)) continue;
    if (p->is_const(0)) return {Feasibility::Infeasible, std::nullopt};
    preds.push_back(std::move(p));
  }
  if (preds.empty()) return {Feasibility::Feasible, Valuation{}};
  auto cs = CompiledSet::compile(preds, /*strip_safe=*/true);
  if (!cs || cs->total_bits() > max_bits || cs->total_bits() >= 63) {
    if (contradictory(preds)) return {Feasibility::Infeasible, std::nullopt};
    return {Feasibility::Unknown, std::nullopt};
  }

  bool parallel = kernel == Kernel::Parallel;
  if (kernel == Kernel::Auto) parallel = cs->total_bits() >= 12 && omp_get_max_threads() > 1;
  const auto hit = parallel ? find_witness_parallel(*cs) : find_witness_serial(*cs);
  if (!hit) return {Feasibility::Infeasible, std::nullopt};
  std::vector<std::uint64_t> atoms;
  cs->decode(*hit, atoms);
  return {Feasibility::Feasible, cs->valuation(atoms)};
}

namespace {

// Inputs an expression depends on, at region granularity for memory.
void collect_inputs(const ExprRef& e, std::set<std::string>& out) {
  std::unordered_set<const Expr*> seen;
  std::vector<const Expr*> stack{e.get()};
  while (!stack.empty()) {
    const Expr* n = stack.back();
    stack.pop_back();
    if (!seen.insert(n).second) continue;
    switch (n->op()) {
      case Op::Sym: out.insert("s:" + n->name()); break;
      case Op::ExtCall: out.insert("c:" + ext_call_key(n->name(), n->site(), n->occurrence())); break;
      case Op::Read: out.insert("m:" + n->name()); break;
      default: break;
    }
    for (const auto& k : n->kids()) stack.push_back(k.get());
  }
}

}  // namespace

FeasibilityResult check_extension(const std::vector<ExprRef>& base, const ExprRef& added, unsigned max_bits,
                                  Kernel kernel) {
  std::vector<std::set<std::string>> inputs(base.size());
  for (std::size_t i = 0; i < base.size(); ++i) collect_inputs(base[i], inputs[i]);
  std::set<std::string> reach;
  collect_inputs(added, reach);

  std::vector<bool> taken(base.size(), false);
  bool grew = true;
  while (grew) {
    grew = false;
    for (std::size_t i = 0; i < base.size(); ++i) {
      if (taken[i]) continue;
      bool shares = false;
      for (const auto& k : inputs[i])
        if (reach.count(k)) {
          shares = true;
          break;
        }
      if (!shares) continue;
      taken[i] = true;
      grew = true;
      reach.insert(inputs[i].begin(), inputs[i].end());
    }
  }
  std::vector<ExprRef> slice{added};
  for (std::size_t i = 0; i < base.size(); ++i)
    if (taken[i]) slice.push_back(base[i]);
  return check_feasible(slice, max_bits, kernel);
}

}  // namespace symdiff::sym
