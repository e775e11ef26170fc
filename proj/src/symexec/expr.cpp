#include "symdiff/symexec/expr.hpp"

#include <unordered_map>
#include <unordered_set>

namespace symdiff::sym {

const char* op_name(Op op) {
  switch (op) {
    case Op::Const: return "Const";
    case Op::Sym: return "Sym";
    case Op::ZExt: return "ZExt";
    case Op::SExt: return "SExt";
    case Op::Trunc: return "Trunc";
    case Op::Neg: return "Neg";
    case Op::Not: return "Not";
    case Op::Safe: return "Safe";
    case Op::Add: return "Add";
    case Op::Sub: return "Sub";
    case Op::Mul: return "Mul";
    case Op::UDiv: return "UDiv";
    case Op::SDiv: return "SDiv";
    case Op::And: return "And";
    case Op::Or: return "Or";
    case Op::Xor: return "Xor";
    case Op::Shl: return "Shl";
    case Op::LShr: return "LShr";
    case Op::AShr: return "AShr";
    case Op::Eq: return "Eq";
    case Op::Ne: return "Ne";
    case Op::Ult: return "Ult";
    case Op::Slt: return "Slt";
    case Op::Ule: return "Ule";
    case Op::Sle: return "Sle";
    case Op::Read: return "Read";
    case Op::Ite: return "Ite";
    case Op::ExtCall: return "Call";
  }
  return "?";
}

bool is_unary(Op op) { return op >= Op::ZExt && op <= Op::Safe; }
bool is_binary(Op op) { return op >= Op::Add && op <= Op::Sle; }
bool is_compare(Op op) { return op >= Op::Eq && op <= Op::Sle; }

bool is_commutative(Op op) {
  switch (op) {
    case Op::Add:
    case Op::Mul:
    case Op::And:
    case Op::Or:
    case Op::Xor:
    case Op::Eq:
    case Op::Ne:
      return true;
    default:
      return false;
  }
}

namespace {

constexpr std::uint64_t kFnvOffset = 0xcbf29ce484222325ULL;
constexpr std::uint64_t kFnvPrime = 0x100000001b3ULL;

struct Fnv {
  std::uint64_t h = kFnvOffset;
  void byte(std::uint8_t b) {
    h ^= b;
    h *= kFnvPrime;
  }
  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) byte(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) byte(static_cast<std::uint8_t>(v >> (8 * i)));
  }
};

void check_width(unsigned w) {
  if (w == 0 || w > 64) throw WidthError("width " + std::to_string(w) + " outside 1..64");
}

ExprRef make(Op op, unsigned width, std::uint64_t value, std::string name, std::uint32_t site,
             std::uint32_t occ, std::vector<ExprRef> kids) {
  for (const auto& k : kids)
    if (!k) throw std::invalid_argument("null child expression");
  return std::make_shared<const Expr>(Expr::Token{}, op, width, value, std::move(name), site, occ,
                                      std::move(kids));
}

}  // namespace

Expr::Expr(Token, Op op, unsigned width, std::uint64_t value, std::string name, std::uint32_t site,
           std::uint32_t occurrence, std::vector<ExprRef> kids)
    : op_(op),
      width_(width),
      value_(value),
      name_(std::move(name)),
      site_(site),
      occurrence_(occurrence),
      kids_(std::move(kids)) {
  Fnv f;
  f.byte(static_cast<std::uint8_t>(op_));
  f.u32(width_);
  f.u64(value_);
  f.u64(name_.size());
  for (char c : name_) f.byte(static_cast<std::uint8_t>(c));
  f.u32(site_);
  f.u32(occurrence_);
  f.u32(static_cast<std::uint32_t>(kids_.size()));
  for (const auto& k : kids_) f.u64(k->hash());
  hash_ = f.h;
}

std::uint64_t mask(unsigned width) { return width >= 64 ? ~0ULL : ((1ULL << width) - 1); }

std::int64_t to_signed(std::uint64_t v, unsigned width) {
  v &= mask(width);
  if (width < 64 && (v >> (width - 1)) & 1) v |= ~mask(width);
  return static_cast<std::int64_t>(v);
}

ExprRef constant(std::uint64_t value, unsigned width) {
  check_width(width);
  return make(Op::Const, width, value & mask(width), {}, 0, 0, {});
}

ExprRef symbol(std::string name, unsigned width) {
  check_width(width);
  if (name.empty()) throw std::invalid_argument("empty symbol name");
  return make(Op::Sym, width, 0, std::move(name), 0, 0, {});
}

ExprRef unary(Op op, unsigned width, ExprRef child) {
  if (!is_unary(op)) throw std::invalid_argument(std::string("not a unary op: ") + op_name(op));
  check_width(width);
  const unsigned cw = child->width();
  switch (op) {
    case Op::ZExt:
    case Op::SExt:
      if (width <= cw) throw WidthError("extension must widen");
      break;
    case Op::Trunc:
      if (width >= cw) throw WidthError("truncation must narrow");
      break;
    case Op::Safe:
      if (cw != 1 || width != 1) throw WidthError("Safe takes a width-1 predicate");
      break;
    default:
      if (width != cw) throw WidthError(std::string(op_name(op)) + " keeps its operand width");
  }
  return make(op, width, 0, {}, 0, 0, {std::move(child)});
}

ExprRef binary(Op op, ExprRef lhs, ExprRef rhs) {
  if (!is_binary(op)) throw std::invalid_argument(std::string("not a binary op: ") + op_name(op));
  if (lhs->width() != rhs->width())
    throw WidthError(std::string(op_name(op)) + " operand widths " + std::to_string(lhs->width()) +
                     " and " + std::to_string(rhs->width()) + " differ");
  const unsigned w = is_compare(op) ? 1 : lhs->width();
  return make(op, w, 0, {}, 0, 0, {std::move(lhs), std::move(rhs)});
}

ExprRef read(std::string region, ExprRef offset, unsigned width) {
  if (width % 8 != 0 || width == 0 || width > 64) throw WidthError("read width must be 8..64 bytes-aligned");
  if (region.empty()) throw std::invalid_argument("read from unnamed region");
  return make(Op::Read, width, 0, std::move(region), 0, 0, {std::move(offset)});
}

ExprRef ite(ExprRef guard, ExprRef then_e, ExprRef else_e) {
  if (guard->width() != 1) throw WidthError("ite guard must have width 1");
  if (then_e->width() != else_e->width()) throw WidthError("ite branch widths differ");
  const unsigned w = then_e->width();
  return make(Op::Ite, w, 0, {}, 0, 0, {std::move(guard), std::move(then_e), std::move(else_e)});
}

ExprRef ext_call(std::string callee, std::uint32_t site, std::uint32_t occurrence, unsigned width) {
  check_width(width);
  return make(Op::ExtCall, width, 0, std::move(callee), site, occurrence, {});
}

ExprRef safe(ExprRef predicate) { return unary(Op::Safe, 1, std::move(predicate)); }

ExprRef rebuild(const Expr& e, std::vector<ExprRef> kids) {
  switch (e.op()) {
    case Op::Const:
    case Op::Sym:
    case Op::ExtCall:
      return make(e.op(), e.width(), e.value(), e.name(), e.site(), e.occurrence(), {});
    case Op::Read:
      return read(e.name(), kids.at(0), e.width());
    case Op::Ite:
      return ite(kids.at(0), kids.at(1), kids.at(2));
    default:
      if (is_unary(e.op())) return unary(e.op(), e.width(), kids.at(0));
      return binary(e.op(), kids.at(0), kids.at(1));
  }
}

std::uint64_t apply_unary(Op op, unsigned result_width, unsigned child_width, std::uint64_t a) {
  a &= mask(child_width);
  switch (op) {
    case Op::ZExt: return a;
    case Op::SExt: return static_cast<std::uint64_t>(to_signed(a, child_width)) & mask(result_width);
    case Op::Trunc: return a & mask(result_width);
    case Op::Neg: return (~a + 1) & mask(result_width);
    case Op::Not: return ~a & mask(result_width);
    case Op::Safe: return 1;
    default: throw std::invalid_argument("apply_unary: bad op");
  }
}

std::uint64_t apply_binary(Op op, unsigned w, std::uint64_t a, std::uint64_t b) {
  const std::uint64_t m = mask(w);
  a &= m;
  b &= m;
  switch (op) {
    case Op::Add: return (a + b) & m;
    case Op::Sub: return (a - b) & m;
    case Op::Mul: return (a * b) & m;
    case Op::UDiv: return b == 0 ? m : a / b;
    case Op::SDiv: {
      const std::int64_t sa = to_signed(a, w), sb = to_signed(b, w);
      if (sb == 0) return sa < 0 ? 1 : m;
      if (sb == -1) return (~a + 1) & m;  // also covers MIN / -1 wrapping
      return static_cast<std::uint64_t>(sa / sb) & m;
    }
    case Op::And: return a & b;
    case Op::Or: return a | b;
    case Op::Xor: return a ^ b;
    case Op::Shl: return b >= w ? 0 : (a << b) & m;
    case Op::LShr: return b >= w ? 0 : a >> b;
    case Op::AShr: {
      const std::int64_t sa = to_signed(a, w);
      if (b >= w) return sa < 0 ? m : 0;
      return static_cast<std::uint64_t>(sa >> b) & m;
    }
    case Op::Eq: return a == b;
    case Op::Ne: return a != b;
    case Op::Ult: return a < b;
    case Op::Ule: return a <= b;
    case Op::Slt: return to_signed(a, w) < to_signed(b, w);
    case Op::Sle: return to_signed(a, w) <= to_signed(b, w);
    default: throw std::invalid_argument("apply_binary: bad op");
  }
}

ExprRef negate(const ExprRef& c) {
  if (c->op() == Op::Not && c->width() == 1) return c->kid(0);
  if (c->is_const()) return constant(c->value() ^ 1, 1);
  return unary(Op::Not, 1, c);
}

ExprRef fold_binary(Op op, ExprRef lhs, ExprRef rhs) {
  if (lhs->is_const() && rhs->is_const()) {
    const unsigned w = lhs->width();
    if (w != rhs->width()) throw WidthError("operand widths differ");
    return constant(apply_binary(op, w, lhs->value(), rhs->value()), is_compare(op) ? 1 : w);
  }
  return binary(op, std::move(lhs), std::move(rhs));
}

ExprRef fold_unary(Op op, unsigned width, ExprRef child) {
  if (child->is_const() && op != Op::Safe) {
    unary(op, width, child);  // width validation
    return constant(apply_unary(op, width, child->width(), child->value()), width);
  }
  return unary(op, width, std::move(child));
}

namespace {

int compare(const Expr& a, const Expr& b) {
  if (&a == &b) return 0;
  if (a.hash() != b.hash()) return a.hash() < b.hash() ? -1 : 1;
  if (a.op() != b.op()) return a.op() < b.op() ? -1 : 1;
  if (a.width() != b.width()) return a.width() < b.width() ? -1 : 1;
  if (a.value() != b.value()) return a.value() < b.value() ? -1 : 1;
  if (int c = a.name().compare(b.name())) return c < 0 ? -1 : 1;
  if (a.site() != b.site()) return a.site() < b.site() ? -1 : 1;
  if (a.occurrence() != b.occurrence()) return a.occurrence() < b.occurrence() ? -1 : 1;
  if (a.kids().size() != b.kids().size()) return a.kids().size() < b.kids().size() ? -1 : 1;
  for (std::size_t i = 0; i < a.kids().size(); ++i)
    if (int c = compare(*a.kid(i), *b.kid(i))) return c;
  return 0;
}

}  // namespace

bool equal(const Expr& a, const Expr& b) { return compare(a, b) == 0; }

bool ExprLess::operator()(const ExprRef& a, const ExprRef& b) const { return compare(*a, *b) < 0; }

std::size_t dag_size(const ExprRef& e) {
  std::unordered_set<std::uint64_t> seen;
  std::vector<const Expr*> stack{e.get()};
  while (!stack.empty()) {
    const Expr* n = stack.back();
    stack.pop_back();
    if (!seen.insert(n->hash()).second) continue;
    for (const auto& k : n->kids()) stack.push_back(k.get());
  }
  return seen.size();
}

std::string byte_key(const std::string& region, std::uint64_t index) {
  return region + "[" + std::to_string(index) + "]";
}

std::string ext_call_key(const std::string& callee, std::uint32_t site, std::uint32_t occurrence) {
  return "ext." + callee + "#" + std::to_string(site) + "." + std::to_string(occurrence);
}

namespace {

std::uint64_t lookup(const Valuation& v, const std::string& key) {
  auto it = v.find(key);
  if (it == v.end()) throw EvalError("no value for '" + key + "'");
  return it->second;
}

std::uint64_t eval_rec(const Expr& e, const Valuation& v, std::unordered_map<const Expr*, std::uint64_t>& memo) {
  if (auto it = memo.find(&e); it != memo.end()) return it->second;
  std::uint64_t r = 0;
  switch (e.op()) {
    case Op::Const: r = e.value(); break;
    case Op::Sym: r = lookup(v, e.name()) & mask(e.width()); break;
    case Op::ExtCall: r = lookup(v, ext_call_key(e.name(), e.site(), e.occurrence())) & mask(e.width()); break;
    case Op::Read: {
      const std::uint64_t off = eval_rec(*e.kid(0), v, memo);
      for (unsigned i = 0; i < e.width() / 8; ++i)
        r |= (lookup(v, byte_key(e.name(), off + i)) & 0xFF) << (8 * i);
      break;
    }
    case Op::Ite:
      r = eval_rec(*e.kid(0), v, memo) & 1 ? eval_rec(*e.kid(1), v, memo) : eval_rec(*e.kid(2), v, memo);
      break;
    case Op::Safe: r = 1; break;
    default:
      if (is_unary(e.op())) {
        r = apply_unary(e.op(), e.width(), e.kid(0)->width(), eval_rec(*e.kid(0), v, memo));
      } else {
        r = apply_binary(e.op(), e.kid(0)->width(), eval_rec(*e.kid(0), v, memo), eval_rec(*e.kid(1), v, memo));
      }
  }
  memo.emplace(&e, r);
  return r;
}

}  // namespace

std::uint64_t eval_concrete(const ExprRef& e, const Valuation& valuation) {
  std::unordered_map<const Expr*, std::uint64_t> memo;
  return eval_rec(*e, valuation, memo);
}

}  // namespace symdiff::sym
