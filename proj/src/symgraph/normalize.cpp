#include "symdiff/symgraph/normalize.hpp"

#include <optional>
#include <unordered_map>

namespace symdiff::symgraph {

using sym::ExprRef;
using sym::Op;

namespace {

bool is_ext(Op op) { return op == Op::ZExt || op == Op::SExt; }

// Sign-extends the low `from` bits of v to `to` bits.
std::uint64_t sext_bits(std::uint64_t v, unsigned from, unsigned to) {
  return static_cast<std::uint64_t>(sym::to_signed(v & sym::mask(from), from)) & sym::mask(to);
}

// x has its bits above `k` fixed as zero (zext) or as copies of bit k-1 (sext).
bool high_bits_redundant(const ExprRef& x, unsigned k, Op ext) {
  if (x->op() == ext && x->kid(0)->width() <= k) return true;
  if (ext == Op::ZExt) {
    if (x->is_const()) return x->value() <= sym::mask(k);
    if (x->op() == Op::And)
      for (const auto& kid : x->kids())
        if (kid->is_const() && kid->value() <= sym::mask(k)) return true;
  }
  if (ext == Op::SExt && x->is_const()) return sext_bits(x->value(), k, x->width()) == x->value();
  return false;
}

// Low-w-bit image of x when it can be computed from narrower operands alone.
std::optional<ExprRef> narrow(const ExprRef& x, unsigned w) {
  switch (x->op()) {
    case Op::Const: return sym::constant(x->value() & sym::mask(w), w);
    case Op::ZExt:
    case Op::SExt: {
      const auto& y = x->kid(0);
      if (y->width() == w) return y;
      if (y->width() < w) return sym::unary(x->op(), w, y);
      return std::nullopt;
    }
    case Op::Neg:
    case Op::Not: {
      auto k = narrow(x->kid(0), w);
      if (!k) return std::nullopt;
      return sym::unary(x->op(), w, *k);
    }
    case Op::Add:
    case Op::Sub:
    case Op::Mul:
    case Op::And:
    case Op::Or:
    case Op::Xor: {
      auto a = narrow(x->kid(0), w);
      if (!a) return std::nullopt;
      auto b = narrow(x->kid(1), w);
      if (!b) return std::nullopt;
      return sym::binary(x->op(), *a, *b);
    }
    default: return std::nullopt;
  }
}

std::optional<ExprRef> collapse_casts(const ExprRef& e) {
  if (e->op() == Op::Trunc && is_ext(e->kid(0)->op()) && e->kid(0)->kid(0)->width() == e->width())
    return e->kid(0)->kid(0);
  if (is_ext(e->op()) && e->kid(0)->op() == Op::Trunc) {
    const auto& x = e->kid(0)->kid(0);
    if (x->width() == e->width() && high_bits_redundant(x, e->kid(0)->width(), e->op())) return x;
  }
  return std::nullopt;
}

bool ext_keeps(Op ext, Op cmp) {
  switch (cmp) {
    case Op::Eq:
    case Op::Ne:
    case Op::Ult:
    case Op::Ule: return true;
    case Op::Slt:
    case Op::Sle: return ext == Op::SExt;
    default: return false;
  }
}

// Narrow form of a compared operand, given the extension kind and source
// width established by the other side.
std::optional<ExprRef> strip(const ExprRef& x, Op ext, unsigned n) {
  if (x->op() == ext && x->kid(0)->width() == n) return x->kid(0);
  if (x->is_const()) {
    const std::uint64_t v = x->value();
    const bool fits = ext == Op::ZExt ? v <= sym::mask(n) : sext_bits(v, n, x->width()) == v;
    if (fits) return sym::constant(v & sym::mask(n), n);
  }
  return std::nullopt;
}

std::optional<ExprRef> narrow_node(const ExprRef& e) {
  if (e->op() == Op::Trunc) {
    const auto& x = e->kid(0);
    if (x->is_const() || is_ext(x->op())) return std::nullopt;  // folding / cast collapse
    return narrow(x, e->width());
  }
  if (!sym::is_compare(e->op())) return std::nullopt;
  const auto& a = e->kid(0);
  const auto& b = e->kid(1);
  const ExprRef& ext = is_ext(a->op()) ? a : b;
  if (!is_ext(ext->op()) || !ext_keeps(ext->op(), e->op())) return std::nullopt;
  const unsigned n = ext->kid(0)->width();
  auto na = strip(a, ext->op(), n);
  auto nb = strip(b, ext->op(), n);
  if (!na || !nb) return std::nullopt;
  return sym::binary(e->op(), *na, *nb);
}

std::optional<ExprRef> fold(const ExprRef& e) {
  if (e->op() == Op::Ite) {
    if (!e->kid(0)->is_const()) return std::nullopt;
    return e->kid(0)->value() ? e->kid(1) : e->kid(2);
  }
  if (e->op() == Op::Safe || e->op() == Op::Const || e->kids().empty()) return std::nullopt;
  if (sym::is_unary(e->op()) && e->kid(0)->is_const()) return sym::fold_unary(e->op(), e->width(), e->kid(0));
  if (sym::is_binary(e->op()) && e->kid(0)->is_const() && e->kid(1)->is_const())
    return sym::fold_binary(e->op(), e->kid(0), e->kid(1));
  return std::nullopt;
}

bool operand_before(const ExprRef& a, const ExprRef& b) {
  if (a->is_const() != b->is_const()) return b->is_const();
  return sym::ExprLess{}(a, b);
}

std::optional<ExprRef> order_operands(const ExprRef& e) {
  if (!sym::is_commutative(e->op())) return std::nullopt;
  if (!operand_before(e->kid(1), e->kid(0))) return std::nullopt;
  return sym::binary(e->op(), e->kid(1), e->kid(0));
}

std::optional<ExprRef> drop_safety(const ExprRef& e) {
  if (e->op() == Op::Safe) return sym::constant(1, 1);
  if (e->op() == Op::And && e->width() == 1) {
    if (e->kid(0)->is_const(1)) return e->kid(1);
    if (e->kid(1)->is_const(1)) return e->kid(0);
  }
  return std::nullopt;
}

class Normalizer {
 public:
  explicit Normalizer(const NormalizeOptions& o) : o_(o) {}

  ExprRef run(const ExprRef& e) {
    if (auto it = memo_.find(e.get()); it != memo_.end()) return it->second.second;
    std::vector<ExprRef> kids;
    kids.reserve(e->kids().size());
    bool changed = false;
    for (const auto& k : e->kids()) {
      kids.push_back(run(k));
      changed |= kids.back() != k;
    }
    ExprRef cur = changed ? sym::rebuild(*e, std::move(kids)) : e;
    // Each rule output has normalized operands except possibly new interior
    // nodes, so the rewritten node goes through the full pass again.
    if (auto r = rewrite(cur)) cur = run(*r);
    memo_.emplace(e.get(), std::make_pair(e, cur));
    return cur;
  }

 private:
  const NormalizeOptions& o_;
  // Keyed by address; the stored ref keeps the key alive.
  std::unordered_map<const sym::Expr*, std::pair<ExprRef, ExprRef>> memo_;

  std::optional<ExprRef> rewrite(const ExprRef& e) const {
    if (o_.collapse_casts)
      if (auto r = collapse_casts(e)) return r;
    if (o_.narrow)
      if (auto r = narrow_node(e)) return r;
    if (o_.fold)
      if (auto r = fold(e)) return r;
    if (o_.order_operands)
      if (auto r = order_operands(e)) return r;
    if (o_.drop_safety)
      if (auto r = drop_safety(e)) return r;
    return std::nullopt;
  }
};

}  // namespace

ExprRef normalize(const ExprRef& e, const NormalizeOptions& opts) {
  Normalizer n(opts);
  return n.run(e);
}

SymGraph normalize(const SymGraph& g, const NormalizeOptions& opts) {
  Normalizer n(opts);
  std::vector<ExprRef> roots;
  roots.reserve(g.root_exprs.size());
  for (const auto& r : g.root_exprs) roots.push_back(n.run(r));
  return to_graph(roots);
}

}  // namespace symdiff::symgraph
