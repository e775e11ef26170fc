#include "symdiff/symexec/executor.hpp"

#include <chrono>
#include <deque>
#include <set>

#include "symdiff/mir/layout.hpp"
#include "symdiff/mir/verify.hpp"
#include "symdiff/symexec/feasibility.hpp"
#include "symdiff/symexec/memory.hpp"
#include "symdiff/symexec/symbolize.hpp"

namespace symdiff::symexec {

using mir::IrType;
using mir::Opcode;
using mir::TypeKind;
using sym::ExprRef;
using sym::Op;

namespace {

struct State {
  std::size_t block = 0;
  std::size_t ip = 0;
  std::map<std::string, Value> env;
  std::vector<MemRegion> regions;
  std::vector<ExprRef> constraints;
  std::vector<unsigned> visits;
  std::map<std::pair<std::string, unsigned>, unsigned> occurrences;
  std::map<std::uint64_t, std::uint64_t> concrete;  // symbolic offset (by hash) -> chosen value
  unsigned ub_symbols = 0;
  unsigned allocs = 0;
  bool ub = false;
};

ExprRef c64(std::uint64_t v) { return sym::constant(v, 64); }

ExprRef to64(const ExprRef& e, bool sign) {
  return e->width() < 64 ? sym::fold_unary(sign ? Op::SExt : Op::ZExt, 64, e) : e;
}

bool is_add_const(const ExprRef& e) { return e->op() == Op::Add && e->kid(1)->is_const(); }

/// Offset arithmetic that keeps constants in one trailing addend, so p+1+1 and
/// p+2 build the same expression.
ExprRef add_offset(const ExprRef& a, const ExprRef& b) {
  if (a->is_const() && b->is_const()) return sym::fold_binary(Op::Add, a, b);
  if (b->is_const(0)) return a;
  if (a->is_const(0)) return b;
  if (a->is_const()) return add_offset(b, a);
  ExprRef x = a, y = b;
  std::uint64_t k = 0;
  if (is_add_const(x)) k += x->kid(1)->value(), x = x->kid(0);
  if (y->is_const()) {
    k += y->value();
    y = nullptr;
  } else if (is_add_const(y)) {
    k += y->kid(1)->value(), y = y->kid(0);
  }
  ExprRef core = y ? sym::binary(Op::Add, x, y) : x;
  const ExprRef kc = sym::constant(k, a->width());
  return kc->is_const(0) ? core : sym::binary(Op::Add, core, kc);
}

struct Sides {
  bool t = false;
  bool f = false;
};

class Executor {
 public:
  Executor(const mir::IrFunction& fn, const mir::TypeTable& types, const ExecConfig& cfg)
      : fn_(fn), types_(types), cfg_(cfg), info_(mir::verify(fn, types)) {
    for (std::size_t i = 0; i < fn.blocks.size(); ++i) labels_[fn.blocks[i].label] = i;
  }

  ExecResult run() {
    cfg_.validate();
    out_.function = fn_.name;
    out_.dialect = fn_.dialect;
    deadline_ = std::chrono::steady_clock::now() + std::chrono::seconds(cfg_.timeout_seconds);
    Symbolization sy = symbolize(fn_, types_, cfg_);
    State init;
    init.env = std::move(sy.env);
    init.regions = std::move(sy.regions);
    init.visits.assign(fn_.blocks.size(), 0);
    init.visits[0] = 1;
    pending_.push_back(std::move(init));
    while (!pending_.empty() && !stop_) {
      State s = std::move(pending_.back());
      pending_.pop_back();
      run_path(s);
    }
    return std::move(out_);
  }

 private:
  const mir::IrFunction& fn_;
  const mir::TypeTable& types_;
  const ExecConfig& cfg_;
  mir::FunctionInfo info_;
  std::map<std::string, std::size_t> labels_;
  std::vector<State> pending_;
  ExecResult out_;
  std::chrono::steady_clock::time_point deadline_;
  bool stop_ = false;

  void stop(const std::string& reason) {
    out_.incomplete = true;
    out_.incomplete_reason = reason;
    stop_ = true;
    pending_.clear();
  }

  void run_path(State& s) {
    while (!stop_) {
      if (std::chrono::steady_clock::now() > deadline_) {
        stop("timeout");
        return;
      }
      const auto& blk = fn_.blocks[s.block];
      if (s.ip < blk.instrs.size()) {
        if (!exec(s, blk.instrs[s.ip])) return;
        ++s.ip;
        continue;
      }
      if (!terminate(s, blk.term)) return;
    }
  }

  // ---- path bookkeeping ----

  void finish(State& s, Terminal t, const std::string& code, const Value* ret = nullptr) {
    if (out_.paths.size() >= cfg_.path_cap) {
      stop("path-cap");
      return;
    }
    PathSummary ps;
    ps.constraints = s.constraints;
    ps.terminal = t;
    ps.code = code;
    ps.ub = s.ub;
    if (t == Terminal::Return) epilogue(s, ret, ps);
    for (const auto& r : s.regions) {
      RegionShape& shape = out_.regions[r.name];
      shape.size = r.size;
      shape.buffer = r.buffer;
      shape.leaves.clear();
      for (const auto& leaf : r.layout) shape.leaves.push_back({leaf.offset, leaf.path});
    }
    out_.paths.push_back(std::move(ps));
  }

  void epilogue(const State& s, const Value* ret, PathSummary& ps) {
    if (ret) {
      if (!ret->parts.empty()) {
        ps.ret = ret->parts[0].expr;
        ps.outputs["ret.len"] = ret->parts[1].expr;
        if (ret->parts.size() > 2) ps.outputs["ret.cap"] = ret->parts[2].expr;
      } else {
        ps.ret = ret->expr;
      }
    }
    for (const auto& p : fn_.params) {
      if (!p.out) continue;
      const Value& v = s.env.at(p.name);
      const Value& target = v.parts.empty() ? v : v.parts[0];
      if (!target.ptr) continue;
      std::set<std::size_t> seen;
      std::deque<std::size_t> queue{target.ptr->region};
      while (!queue.empty()) {
        const std::size_t r = queue.front();
        queue.pop_front();
        if (!seen.insert(r).second) continue;
        const MemRegion& region = s.regions[r];
        for (const auto& [off, cell] : region.cells) {
          if (cell.written) ps.outputs[region.leaf_path(off)] = cell.value.expr;
          if (cell.value.ptr) queue.push_back(cell.value.ptr->region);
        }
      }
    }
  }

  Sides decide(const State& s, const ExprRef& cond) {
    if (cond->is_const()) return {cond->value() == 1, cond->value() == 0};
    const ExprRef neg = sym::negate(cond);
    for (const auto& c : s.constraints) {
      const ExprRef p = sym::predicate_of(c);
      if (sym::equal(p, cond)) return {true, false};
      if (sym::equal(p, neg)) return {false, true};
    }
    const unsigned w = cfg_.feasibility_width;
    return {sym::check_extension(s.constraints, cond, w).verdict != sym::Feasibility::Infeasible,
            sym::check_extension(s.constraints, neg, w).verdict != sym::Feasibility::Infeasible};
  }

  /// Continues under Safe(ok); a sibling path where ok fails ends with `bad`.
  bool guard(State& s, const ExprRef& ok, Terminal bad, const std::string& code) {
    const Sides d = decide(s, ok);
    if (d.f) {
      State other = s;
      other.constraints.push_back(sym::negate(ok));
      finish(other, bad, code);
    }
    if (!d.t) return false;
    if (d.f) s.constraints.push_back(sym::safe(ok));
    return !stop_;
  }

  bool enter(State& s, const std::string& label) {
    const std::size_t b = labels_.at(label);
    s.block = b;
    s.ip = 0;
    if (++s.visits[b] > cfg_.loop_unroll + 1) {
      finish(s, Terminal::BudgetExhausted, "loop-unroll");
      return false;
    }
    return true;
  }

  // ---- values ----

  const IrType& type_of(const std::string& name) const { return info_.value_types.at(name); }

  IrType pair_type(const mir::Instr& in) const {
    for (const auto& op : in.operands)
      if (!op.is_literal) return type_of(op.name);
    return IrType::integer(64);
  }

  static Value operand(const State& s, const mir::Operand& op, const IrType& type) {
    if (!op.is_literal) return s.env.at(op.name);
    const IrType& u = type.unwrap_optional();
    const unsigned w = u.is_int() ? u.bits() : 64;
    return Value::scalar(sym::constant(static_cast<std::uint64_t>(op.literal), w));
  }

  static void set(State& s, const std::string& name, Value v) {
    if (!name.empty()) s.env[name] = std::move(v);
  }

  static ExprRef pointer_expr(const State& s, const PtrInfo& p) {
    return add_offset(sym::symbol(s.regions[p.region].name, 64), p.offset);
  }

  static Value offset_ptr(const State& s, const Value& p, const ExprRef& delta) {
    if (delta->is_const(0)) return p;
    Value r;
    if (p.ptr) {
      r.ptr = PtrInfo{p.ptr->region, add_offset(p.ptr->offset, delta)};
      r.expr = pointer_expr(s, *r.ptr);
    } else {
      r.expr = add_offset(p.expr, delta);
    }
    return r;
  }

  // ---- memory ----

  struct Place {
    std::size_t region = 0;
    std::optional<std::uint64_t> off;
    ExprRef sym_off;
  };

  std::optional<Place> locate(State& s, const Value& p, std::uint64_t sz) {
    if (!p.ptr) {
      finish(s, Terminal::Undefined, p.expr->is_const(0) ? "null-dereference" : "unknown-pointer");
      return std::nullopt;
    }
    const std::size_t r = p.ptr->region;
    const std::uint64_t size = s.regions[r].size;
    const ExprRef& off = p.ptr->offset;
    std::optional<std::uint64_t> k;
    if (off->is_const()) k = off->value();
    else if (auto it = s.concrete.find(off->hash()); it != s.concrete.end()) k = it->second;
    if (k) {
      if (size < sz || *k > size - sz) {
        finish(s, Terminal::Undefined, "out-of-bounds");
        return std::nullopt;
      }
      return Place{r, k, nullptr};
    }
    if (size < sz) {
      finish(s, Terminal::Undefined, "out-of-bounds");
      return std::nullopt;
    }
    if (!guard(s, sym::fold_binary(Op::Ule, off, c64(size - sz)), Terminal::Undefined, "out-of-bounds"))
      return std::nullopt;
    return Place{r, std::nullopt, off};
  }

  /// Forks one path per feasible aligned offset; the current path takes the
  /// lowest. Siblings re-execute the instruction with their offset fixed.
  bool concretize(State& s, const ExprRef& off, std::uint64_t sz, std::uint64_t size, std::uint64_t& chosen) {
    std::vector<std::uint64_t> feasible;
    for (std::uint64_t k = 0; k + sz <= size; k += sz)
      if (decide(s, sym::binary(Op::Eq, off, c64(k))).t) feasible.push_back(k);
    if (feasible.empty()) return false;
    for (std::size_t i = feasible.size(); i-- > 1;) {
      State alt = s;
      alt.constraints.push_back(sym::binary(Op::Eq, off, c64(feasible[i])));
      alt.concrete[off->hash()] = feasible[i];
      pending_.push_back(std::move(alt));
    }
    chosen = feasible[0];
    s.constraints.push_back(sym::binary(Op::Eq, off, c64(chosen)));
    s.concrete[off->hash()] = chosen;
    return true;
  }

  /// Integer load at a symbolic offset as an ite chain over the cells, when
  /// every cell has the access size and alignment. Null otherwise.
  static ExprRef symbolic_load(const MemRegion& r, const ExprRef& off, unsigned bytes) {
    const unsigned w = bytes * 8;
    for (const auto& [at, c] : r.cells)
      if (c.size != bytes || at % bytes != 0) return nullptr;
    ExprRef acc = r.zero_init ? sym::constant(0, w) : sym::read(r.name, off, w);
    for (auto it = r.cells.rbegin(); it != r.cells.rend(); ++it) {
      ExprRef v = it->second.value.expr;
      if (v->width() < w) v = sym::fold_unary(Op::ZExt, w, v);
      acc = sym::ite(sym::binary(Op::Eq, off, c64(it->first)), v, acc);
    }
    return acc;
  }

  Value load_value(State& s, std::size_t r, std::uint64_t off, const IrType& type) {
    const IrType& t = type.unwrap_optional();
    switch (t.kind()) {
      case TypeKind::Int: {
        const unsigned bytes = static_cast<unsigned>(mir::size_of(t, types_));
        if (t.bits() == 1) {
          if (const Cell* c = s.regions[r].exact(off, 1); c && c->value.expr->width() == 1) return c->value;
          return Value::scalar(sym::fold_unary(Op::Trunc, 1, s.regions[r].load_bits(off, 1)));
        }
        return Value::scalar(s.regions[r].load_bits(off, bytes));
      }
      case TypeKind::Address: {
        const Cell* c = s.regions[r].exact(off, mir::kAddressBytes);
        if (!c) return Value::scalar(s.regions[r].load_bits(off, mir::kAddressBytes));
        if (!c->value.lazy) return c->value;
        const LazyTarget target = *c->value.lazy;
        Value v = materialize(target, types_, cfg_, s.regions);
        s.regions[r].cells.at(off).value = v;
        return v;
      }
      case TypeKind::StrSlice:
      case TypeKind::ByteVec: {
        Value v;
        v.parts.push_back(load_value(s, r, off, IrType::address(IrType::integer(8))));
        v.parts.push_back(load_value(s, r, off + 8, IrType::integer(64)));
        if (t.kind() == TypeKind::ByteVec) v.parts.push_back(load_value(s, r, off + 16, IrType::integer(64)));
        v.expr = v.parts[0].expr;
        return v;
      }
      default:
        throw std::logic_error("load of aggregate type " + t.to_string());
    }
  }

  void store_value(State& s, std::size_t r, std::uint64_t off, const IrType& type, Value v) {
    const IrType& t = type.unwrap_optional();
    if (t.is_fat()) {
      if (v.parts.empty()) {  // a null literal for an optional slice
        v.parts = {Value::scalar(c64(0)), Value::scalar(c64(0))};
        if (t.kind() == TypeKind::ByteVec) v.parts.push_back(Value::scalar(c64(0)));
      }
      for (std::size_t i = 0; i < v.parts.size(); ++i) s.regions[r].store(off + 8 * i, 8, v.parts[i]);
      return;
    }
    s.regions[r].store(off, mir::size_of(t, types_), std::move(v));
  }

  // ---- instructions ----

  bool exec(State& s, const mir::Instr& in) {
    switch (in.op) {
      case Opcode::Const: {
        const IrType& t = *in.type;
        const unsigned w = t.is_int() ? t.bits() : 64;
        set(s, in.result, Value::scalar(sym::constant(static_cast<std::uint64_t>(in.operands[0].literal), w)));
        return true;
      }
      case Opcode::Add:
      case Opcode::Sub:
      case Opcode::Mul:
      case Opcode::And:
      case Opcode::Or:
      case Opcode::Xor:
      case Opcode::Shl:
      case Opcode::LShr:
      case Opcode::AShr:
      case Opcode::UDiv:
      case Opcode::SDiv: {
        const IrType t = pair_type(in);
        const ExprRef a = operand(s, in.operands[0], t).expr;
        const ExprRef b = operand(s, in.operands[1], t).expr;
        if (in.op == Opcode::UDiv || in.op == Opcode::SDiv) return divide(s, in, a, b);
        set(s, in.result, Value::scalar(sym::fold_binary(arith_op(in.op), a, b)));
        return true;
      }
      case Opcode::ICmp: {
        const IrType t = pair_type(in);
        const ExprRef a = operand(s, in.operands[0], t).expr;
        const ExprRef b = operand(s, in.operands[1], t).expr;
        set(s, in.result, Value::scalar(compare(in.pred, a, b)));
        return true;
      }
      case Opcode::ZExt:
      case Opcode::SExt:
      case Opcode::Trunc: {
        const Op op = in.op == Opcode::ZExt ? Op::ZExt : in.op == Opcode::SExt ? Op::SExt : Op::Trunc;
        const ExprRef a = s.env.at(in.operands[0].name).expr;
        set(s, in.result, Value::scalar(sym::fold_unary(op, in.type->bits(), a)));
        return true;
      }
      case Opcode::Alloc: {
        MemRegion r;
        r.name = "alloc#" + std::to_string(s.allocs++);
        r.zero_init = true;
        r.size = mir::size_of(*in.type, types_);
        r.type = *in.type;
        r.layout = mir::layout_of(*in.type, types_);
        s.regions.push_back(std::move(r));
        Value v;
        v.ptr = PtrInfo{s.regions.size() - 1, c64(0)};
        v.expr = pointer_expr(s, *v.ptr);
        set(s, in.result, std::move(v));
        return true;
      }
      case Opcode::Load: {
        const Value p = s.env.at(in.operands[0].name);
        const IrType& t = *in.type;
        const std::uint64_t sz = mir::size_of(t, types_);
        auto place = locate(s, p, sz);
        if (!place) return false;
        if (!place->off) {
          const IrType& u = t.unwrap_optional();
          if (u.is_int() && u.bits() >= 8) {
            if (ExprRef e = symbolic_load(s.regions[place->region], place->sym_off, static_cast<unsigned>(sz))) {
              set(s, in.result, Value::scalar(e));
              return true;
            }
          }
          std::uint64_t k = 0;
          if (!concretize(s, place->sym_off, sz, s.regions[place->region].size, k)) return false;
          place->off = k;
        }
        set(s, in.result, load_value(s, place->region, *place->off, t));
        return true;
      }
      case Opcode::Store: {
        const Value p = s.env.at(in.operands[1].name);
        const IrType pointee = type_of(in.operands[1].name).unwrap_optional().inner();
        Value v = operand(s, in.operands[0], pointee);
        const std::uint64_t sz = mir::size_of(pointee, types_);
        auto place = locate(s, p, sz);
        if (!place) return false;
        if (!place->off) {
          std::uint64_t k = 0;
          if (!concretize(s, place->sym_off, sz, s.regions[place->region].size, k)) return false;
          place->off = k;
        }
        store_value(s, place->region, *place->off, pointee, std::move(v));
        return true;
      }
      case Opcode::FieldAddr: {
        const Value p = s.env.at(in.operands[0].name);
        const IrType& rec = type_of(in.operands[0].name).unwrap_optional().inner();
        std::uint64_t off = 0;
        for (const auto& f : types_.at(rec.record_name()).fields) {
          if (f.name == in.symbol) break;
          off += mir::size_of(f.type, types_);
        }
        set(s, in.result, offset_ptr(s, p, c64(off)));
        return true;
      }
      case Opcode::IndexAddr: {
        const Value p = s.env.at(in.operands[0].name);
        const IrType& pointee = type_of(in.operands[0].name).unwrap_optional().inner();
        const IrType& elem = pointee.kind() == TypeKind::Array ? pointee.inner() : pointee;
        const ExprRef idx = to64(operand(s, in.operands[1], IrType::integer(64)).expr, true);
        set(s, in.result, offset_ptr(s, p, scaled(idx, mir::size_of(elem, types_))));
        return true;
      }
      case Opcode::Call:
        return call(s, in);
      case Opcode::CheckedAdd:
      case Opcode::CheckedSub:
      case Opcode::CheckedMul:
        return checked(s, in);
      case Opcode::BoundsCheckedIndex: {
        const Value sv = s.env.at(in.operands[0].name);
        const IrType& st = type_of(in.operands[0].name).unwrap_optional();
        const ExprRef idx = to64(operand(s, in.operands[1], IrType::integer(64)).expr, false);
        ExprRef len;
        Value base;
        std::uint64_t stride = 1;
        if (st.is_fat()) {
          base = sv.parts.at(0);
          len = sv.parts.at(1).expr;
        } else {
          base = sv;
          len = c64(st.inner().count());
          stride = mir::size_of(st.inner().inner(), types_);
        }
        if (!guard(s, sym::fold_binary(Op::Ult, idx, len), Terminal::Panic, "index-out-of-bounds")) return false;
        set(s, in.result, offset_ptr(s, base, scaled(idx, stride)));
        return true;
      }
      case Opcode::OptionUnwrap: {
        const Value v = s.env.at(in.operands[0].name);
        if (!guard(s, sym::fold_binary(Op::Ne, v.expr, c64(0)), Terminal::Panic, "unwrap-none")) return false;
        set(s, in.result, v);
        return true;
      }
      case Opcode::SliceLen: {
        const Value v = s.env.at(in.operands[0].name);
        set(s, in.result, v.parts.at(1));
        return true;
      }
    }
    throw std::logic_error("unhandled opcode");
  }

  static ExprRef scaled(const ExprRef& idx, std::uint64_t stride) {
    return stride == 1 ? idx : sym::fold_binary(Op::Mul, idx, c64(stride));
  }

  static Op arith_op(Opcode op) {
    switch (op) {
      case Opcode::Add: case Opcode::CheckedAdd: return Op::Add;
      case Opcode::Sub: case Opcode::CheckedSub: return Op::Sub;
      case Opcode::Mul: case Opcode::CheckedMul: return Op::Mul;
      case Opcode::And: return Op::And;
      case Opcode::Or: return Op::Or;
      case Opcode::Xor: return Op::Xor;
      case Opcode::Shl: return Op::Shl;
      case Opcode::LShr: return Op::LShr;
      case Opcode::AShr: return Op::AShr;
      case Opcode::UDiv: return Op::UDiv;
      case Opcode::SDiv: return Op::SDiv;
      default: throw std::logic_error("not an arithmetic opcode");
    }
  }

  static ExprRef compare(mir::CmpPred p, const ExprRef& a, const ExprRef& b) {
    using mir::CmpPred;
    switch (p) {
      case CmpPred::Eq: return sym::fold_binary(Op::Eq, a, b);
      case CmpPred::Ne: return sym::fold_binary(Op::Ne, a, b);
      case CmpPred::Ult: return sym::fold_binary(Op::Ult, a, b);
      case CmpPred::Ule: return sym::fold_binary(Op::Ule, a, b);
      case CmpPred::Ugt: return sym::fold_binary(Op::Ult, b, a);
      case CmpPred::Uge: return sym::fold_binary(Op::Ule, b, a);
      case CmpPred::Slt: return sym::fold_binary(Op::Slt, a, b);
      case CmpPred::Sle: return sym::fold_binary(Op::Sle, a, b);
      case CmpPred::Sgt: return sym::fold_binary(Op::Slt, b, a);
      case CmpPred::Sge: return sym::fold_binary(Op::Sle, b, a);
    }
    throw std::logic_error("bad predicate");
  }

  bool divide(State& s, const mir::Instr& in, const ExprRef& a, const ExprRef& b) {
    const Op op = arith_op(in.op);
    const unsigned w = a->width();
    const ExprRef nonzero = sym::fold_binary(Op::Ne, b, sym::constant(0, w));
    if (fn_.dialect == mir::Dialect::Rust) {
      if (!guard(s, nonzero, Terminal::Panic, "division-by-zero")) return false;
      if (op == Op::SDiv) {
        const ExprRef ovf = sym::fold_binary(Op::And, sym::fold_binary(Op::Eq, a, sym::constant(1ULL << (w - 1), w)),
                                             sym::fold_binary(Op::Eq, b, sym::constant(sym::mask(w), w)));
        if (!guard(s, sym::negate(ovf), Terminal::Panic, "overflow")) return false;
      }
      set(s, in.result, Value::scalar(sym::fold_binary(op, a, b)));
      return true;
    }
    // C: a zero divisor is undefined; that path carries an unconstrained value
    // and the ub flag, which keeps it out of scoring.
    const Sides d = decide(s, nonzero);
    if (d.f) {
      State z = s;
      if (d.t) z.constraints.push_back(sym::negate(nonzero));
      z.ub = true;
      set(z, in.result, Value::scalar(sym::symbol("ub." + fn_.blocks[z.block].label + "." + std::to_string(z.ip) + "#" + std::to_string(z.ub_symbols++), w)));
      ++z.ip;
      pending_.push_back(std::move(z));
    }
    if (!d.t) return false;
    if (d.f) s.constraints.push_back(sym::safe(nonzero));
    set(s, in.result, Value::scalar(sym::fold_binary(op, a, b)));
    return true;
  }

  bool checked(State& s, const mir::Instr& in) {
    const IrType t = pair_type(in);
    const ExprRef a = operand(s, in.operands[0], t).expr;
    const ExprRef b = operand(s, in.operands[1], t).expr;
    const unsigned w = a->width();
    const ExprRef zero = sym::constant(0, w);
    auto B = [](Op op, const ExprRef& x, const ExprRef& y) { return sym::fold_binary(op, x, y); };
    const ExprRef r = B(arith_op(in.op), a, b);
    ExprRef ovf;
    if (in.op == Opcode::CheckedAdd) {
      ovf = in.is_signed ? B(Op::Slt, B(Op::And, B(Op::Xor, r, a), B(Op::Xor, r, b)), zero) : B(Op::Ult, r, a);
    } else if (in.op == Opcode::CheckedSub) {
      ovf = in.is_signed ? B(Op::Slt, B(Op::And, B(Op::Xor, a, b), B(Op::Xor, a, r)), zero) : B(Op::Ult, a, b);
    } else if (w <= 32) {
      const Op ext = in.is_signed ? Op::SExt : Op::ZExt;
      const unsigned ww = 2 * w;
      const ExprRef wide = B(Op::Mul, sym::fold_unary(ext, ww, a), sym::fold_unary(ext, ww, b));
      ovf = B(Op::Ne, sym::fold_unary(ext, ww, sym::fold_unary(Op::Trunc, w, wide)), wide);
    } else {
      const Op div = in.is_signed ? Op::SDiv : Op::UDiv;
      ovf = B(Op::And, B(Op::Ne, a, zero), B(Op::Ne, B(div, r, a), b));
      if (in.is_signed)
        ovf = B(Op::Or, ovf,
                B(Op::And, B(Op::Eq, a, sym::constant(sym::mask(w), w)), B(Op::Eq, b, sym::constant(1ULL << 63, w))));
    }
    if (!guard(s, sym::negate(ovf), Terminal::Panic, "overflow")) return false;
    set(s, in.result, Value::scalar(r));
    return true;
  }

  bool call(State& s, const mir::Instr& in) {
    if (!in.type) return true;  // stubs do not touch memory
    const unsigned site = info_.call_sites.at({fn_.blocks[s.block].label, s.ip});
    const unsigned occ = s.occurrences[{in.symbol, site}]++;
    const IrType& t = in.type->unwrap_optional();
    if (t.is_fat()) {
      Value v;
      v.parts.push_back(Value::scalar(sym::ext_call(in.symbol, site, occ, 64)));
      v.parts.push_back(Value::scalar(sym::ext_call(in.symbol + ".len", site, occ, 64)));
      if (t.kind() == TypeKind::ByteVec) v.parts.push_back(Value::scalar(sym::ext_call(in.symbol + ".cap", site, occ, 64)));
      v.expr = v.parts[0].expr;
      set(s, in.result, std::move(v));
      return true;
    }
    set(s, in.result, Value::scalar(sym::ext_call(in.symbol, site, occ, t.is_int() ? t.bits() : 64)));
    return true;
  }

  bool terminate(State& s, const mir::Terminator& t) {
    switch (t.kind) {
      case mir::TermKind::Return: {
        if (!t.value) {
          finish(s, Terminal::Return, {});
          return false;
        }
        const Value v = operand(s, *t.value, fn_.ret);
        finish(s, Terminal::Return, {}, &v);
        return false;
      }
      case mir::TermKind::Panic:
        finish(s, Terminal::Panic, t.code);
        return false;
      case mir::TermKind::Jump:
        return enter(s, t.target);
      case mir::TermKind::Branch: {
        const ExprRef c = operand(s, *t.value, IrType::integer(1)).expr;
        const Sides d = decide(s, c);
        if (d.t && d.f) {
          State other = s;
          other.constraints.push_back(sym::negate(c));
          if (enter(other, t.else_target)) pending_.push_back(std::move(other));
          s.constraints.push_back(c);
          return enter(s, t.target);
        }
        if (d.t) return enter(s, t.target);
        if (d.f) return enter(s, t.else_target);
        return false;
      }
    }
    return false;
  }
};

}  // namespace

ExecResult execute(const mir::IrFunction& fn, const mir::TypeTable& types, const ExecConfig& cfg) {
  return Executor(fn, types, cfg).run();
}

}  // namespace symdiff::symexec
