#include "interp.hpp"

#include <stdexcept>

#include "oracle_eval.hpp"
#include "symdiff/mir/layout.hpp"

namespace oracle {

using namespace symdiff::mir;

namespace {

struct Val {
  std::uint64_t v = 0;
  std::uint64_t len = 0;  // fat values
};

// Pointers are (region << 32) | offset; region 0 is null.
constexpr std::uint64_t ptr(std::uint64_t region, std::uint64_t off) { return (region << 32) | off; }

struct Stop {
  Outcome::Kind kind;
  std::string code;
};

class Machine {
 public:
  Machine(const IrFunction& fn, const TypeTable& types, unsigned unroll) : fn_(fn), types_(types), unroll_(unroll) {}

  Outcome run(const std::vector<Arg>& args) {
    Outcome out;
    std::map<std::size_t, std::uint64_t> buffer_region;
    for (std::size_t i = 0; i < fn_.params.size(); ++i) {
      const auto& p = fn_.params[i];
      const Arg& a = args.at(i);
      const IrType& t = p.type.unwrap_optional();
      if (t.is_int()) {
        env_[p.name] = {a.scalar & bits(t.bits()), 0};
      } else if (t.is_fat()) {
        if (!a.bytes) throw std::runtime_error("fat parameter needs bytes");
        mem_.push_back(*a.bytes);
        buffer_region[i] = mem_.size();
        env_[p.name] = {ptr(mem_.size(), 0), a.bytes->size()};
      } else if (t.is_address()) {
        if (!a.bytes) {
          env_[p.name] = {0, 0};
          continue;
        }
        mem_.push_back(*a.bytes);
        buffer_region[i] = mem_.size();
        env_[p.name] = {ptr(mem_.size(), 0), 0};
      } else {
        throw std::runtime_error("unsupported parameter type");
      }
    }
    try {
      const Block* b = &fn_.blocks.front();
      std::map<std::string, unsigned> visits;
      for (;;) {
        if (++visits[b->label] > unroll_ + 1) throw Stop{Outcome::Budget, "loop-unroll"};
        for (const auto& in : b->instrs) exec(in, out);
        const auto& t = b->term;
        if (t.kind == TermKind::Return) {
          if (t.value) out.value = operand(*t.value, fn_.ret.unwrap_optional()).v;
          out.kind = Outcome::Return;
          break;
        }
        if (t.kind == TermKind::Panic) throw Stop{Outcome::Panic, t.code};
        std::string next = t.target;
        if (t.kind == TermKind::Branch && !(operand(*t.value, IrType::integer(1)).v & 1)) next = t.else_target;
        b = fn_.find_block(next);
      }
    } catch (const Stop& s) {
      out.kind = s.kind;
      out.code = s.code;
    }
    for (const auto& [i, r] : buffer_region) out.buffers[i] = mem_[r - 1];
    return out;
  }

 private:
  const IrFunction& fn_;
  const TypeTable& types_;
  unsigned unroll_;
  std::map<std::string, Val> env_;
  std::map<std::string, IrType> types_of_;
  std::vector<std::vector<std::uint8_t>> mem_;

  const IrType& type_of(const std::string& name) const {
    for (const auto& p : fn_.params)
      if (p.name == name) return p.type;
    return types_of_.at(name);
  }

  Val operand(const Operand& op, const IrType& t) const {
    if (!op.is_literal) return env_.at(op.name);
    const IrType& u = t.unwrap_optional();
    return {static_cast<std::uint64_t>(op.literal) & bits(u.is_int() ? u.bits() : 64), 0};
  }

  IrType pair_type(const Instr& in) const {
    for (const auto& o : in.operands)
      if (!o.is_literal) return type_of(o.name);
    return IrType::integer(64);
  }

  std::uint8_t* at(std::uint64_t p, std::uint64_t n) {
    const std::uint64_t r = p >> 32, off = p & 0xffffffffu;
    if (r == 0 || r > mem_.size()) throw Stop{Outcome::Undefined, "null"};
    auto& m = mem_[r - 1];
    if (off + n > m.size()) throw Stop{Outcome::Undefined, "out-of-bounds"};
    return m.data() + off;
  }

  std::uint64_t load_int(std::uint64_t p, std::uint64_t n) {
    const std::uint8_t* b = at(p, n);
    std::uint64_t v = 0;
    for (std::uint64_t i = 0; i < n; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    return v;
  }

  void store_int(std::uint64_t p, std::uint64_t n, std::uint64_t v) {
    std::uint8_t* b = at(p, n);
    for (std::uint64_t i = 0; i < n; ++i) b[i] = static_cast<std::uint8_t>(v >> (8 * i));
  }

  std::uint64_t field_offset(const IrType& rec, const std::string& field) const {
    std::uint64_t off = 0;
    for (const auto& f : types_.at(rec.record_name()).fields) {
      if (f.name == field) return off;
      off += size_of(f.type, types_);
    }
    throw std::runtime_error("no field " + field);
  }

  void define(const Instr& in, IrType t, Val v) {
    types_of_[in.result] = t;
    env_[in.result] = v;
  }

  void exec(const Instr& in, Outcome& out) {
    switch (in.op) {
      case Opcode::Const: {
        define(in, *in.type, {static_cast<std::uint64_t>(in.operands.at(0).literal) & bits(in.type->bits()), 0});
        return;
      }
      case Opcode::Add: case Opcode::Sub: case Opcode::Mul: case Opcode::And: case Opcode::Or: case Opcode::Xor:
      case Opcode::Shl: case Opcode::LShr: case Opcode::AShr: case Opcode::UDiv: case Opcode::SDiv:
      case Opcode::CheckedAdd: case Opcode::CheckedSub: case Opcode::CheckedMul: {
        const IrType t = pair_type(in);
        const unsigned w = t.bits();
        const std::uint64_t a = operand(in.operands[0], t).v, b = operand(in.operands[1], t).v;
        const std::int64_t sa = as_signed(a, w), sb = as_signed(b, w);
        std::uint64_t r = 0;
        switch (in.op) {
          case Opcode::Add: case Opcode::CheckedAdd: r = a + b; break;
          case Opcode::Sub: case Opcode::CheckedSub: r = a - b; break;
          case Opcode::Mul: case Opcode::CheckedMul: r = a * b; break;
          case Opcode::And: r = a & b; break;
          case Opcode::Or: r = a | b; break;
          case Opcode::Xor: r = a ^ b; break;
          case Opcode::Shl: r = b >= w ? 0 : a << b; break;
          case Opcode::LShr: r = b >= w ? 0 : a >> b; break;
          case Opcode::AShr: r = static_cast<std::uint64_t>(sa >> (b >= w ? w - 1 : b)); break;
          case Opcode::UDiv:
          case Opcode::SDiv:
            if (b == 0) {
              if (fn_.dialect == Dialect::Rust) throw Stop{Outcome::Panic, "division-by-zero"};
              out.ub = true;  // value is unconstrained from here on
              r = 0;
              break;
            }
            if (in.op == Opcode::UDiv) r = a / b;
            else if (sb == -1) {
              if (fn_.dialect == Dialect::Rust && a == (1ull << (w - 1))) throw Stop{Outcome::Panic, "overflow"};
              r = 0 - a;
            } else r = static_cast<std::uint64_t>(sa / sb);
            break;
          default: break;
        }
        r &= bits(w);
        if (is_checked(in.op)) {
          bool ovf;
          if (in.is_signed) {
            // exact result in 128 bits against the signed range
            __int128 x = sa, y = sb, e = in.op == Opcode::CheckedAdd ? x + y : in.op == Opcode::CheckedSub ? x - y : x * y;
            const __int128 lo = -(static_cast<__int128>(1) << (w - 1)), hi = (static_cast<__int128>(1) << (w - 1)) - 1;
            ovf = e < lo || e > hi;
          } else {
            unsigned __int128 x = a, y = b;
            if (in.op == Opcode::CheckedSub) ovf = a < b;
            else {
              unsigned __int128 e = in.op == Opcode::CheckedAdd ? x + y : x * y;
              ovf = e > static_cast<unsigned __int128>(bits(w));
            }
          }
          if (ovf) throw Stop{Outcome::Panic, "overflow"};
        }
        define(in, t, {r, 0});
        return;
      }
      case Opcode::ICmp: {
        const IrType t = pair_type(in);
        const unsigned w = t.unwrap_optional().is_int() ? t.unwrap_optional().bits() : 64;
        const std::uint64_t a = operand(in.operands[0], t).v, b = operand(in.operands[1], t).v;
        const std::int64_t sa = as_signed(a, w), sb = as_signed(b, w);
        bool r = false;
        switch (in.pred) {
          case CmpPred::Eq: r = a == b; break;
          case CmpPred::Ne: r = a != b; break;
          case CmpPred::Ult: r = a < b; break;
          case CmpPred::Ule: r = a <= b; break;
          case CmpPred::Ugt: r = a > b; break;
          case CmpPred::Uge: r = a >= b; break;
          case CmpPred::Slt: r = sa < sb; break;
          case CmpPred::Sle: r = sa <= sb; break;
          case CmpPred::Sgt: r = sa > sb; break;
          case CmpPred::Sge: r = sa >= sb; break;
        }
        define(in, IrType::integer(1), {r ? 1u : 0u, 0});
        return;
      }
      case Opcode::ZExt: case Opcode::SExt: case Opcode::Trunc: {
        const IrType from = type_of(in.operands[0].name);
        const std::uint64_t a = env_.at(in.operands[0].name).v;
        std::uint64_t r = in.op == Opcode::SExt ? static_cast<std::uint64_t>(as_signed(a, from.bits())) : a;
        define(in, *in.type, {r & bits(in.type->bits()), 0});
        return;
      }
      case Opcode::Alloc: {
        mem_.emplace_back(size_of(*in.type, types_), 0);
        define(in, IrType::address(*in.type), {ptr(mem_.size(), 0), 0});
        return;
      }
      case Opcode::Load: {
        const IrType& t = *in.type;
        const std::uint64_t p = env_.at(in.operands[0].name).v;
        const IrType& u = t.unwrap_optional();
        if (u.is_fat()) {
          define(in, t, {load_int(p, 8), load_int(p + 8, 8)});
        } else {
          const std::uint64_t n = size_of(t, types_);
          define(in, t, {load_int(p, n), 0});
        }
        return;
      }
      case Opcode::Store: {
        const IrType pointee = type_of(in.operands[1].name).unwrap_optional().inner();
        const Val v = operand(in.operands[0], pointee);
        const std::uint64_t p = env_.at(in.operands[1].name).v;
        if (pointee.unwrap_optional().is_fat()) {
          store_int(p, 8, v.v);
          store_int(p + 8, 8, v.len);
        } else {
          store_int(p, size_of(pointee, types_), v.v);
        }
        return;
      }
      case Opcode::FieldAddr: {
        const IrType& pt = type_of(in.operands[0].name).unwrap_optional();
        const IrType& rec = pt.inner();
        const std::uint64_t p = env_.at(in.operands[0].name).v;
        if ((p >> 32) == 0) throw Stop{Outcome::Undefined, "null"};
        const IrType ft = [&] {
          for (const auto& f : types_.at(rec.record_name()).fields)
            if (f.name == in.symbol) return f.type;
          throw std::runtime_error("no field");
        }();
        define(in, IrType::address(ft), {p + field_offset(rec, in.symbol), 0});
        return;
      }
      case Opcode::IndexAddr: {
        const IrType& pt = type_of(in.operands[0].name).unwrap_optional();
        const IrType& pointee = pt.inner();
        const IrType elem = pointee.kind() == TypeKind::Array ? pointee.inner() : pointee;
        const std::uint64_t i = operand(in.operands[1], IrType::integer(64)).v;
        const std::uint64_t p = env_.at(in.operands[0].name).v;
        define(in, IrType::address(elem), {p + i * size_of(elem, types_), 0});
        return;
      }
      case Opcode::BoundsCheckedIndex: {
        const IrType& st = type_of(in.operands[0].name).unwrap_optional();
        const Val s = env_.at(in.operands[0].name);
        const std::uint64_t i = operand(in.operands[1], IrType::integer(64)).v;
        if (st.is_fat()) {
          if (i >= s.len) throw Stop{Outcome::Panic, "index-out-of-bounds"};
          define(in, IrType::address(IrType::integer(8)), {s.v + i, 0});
        } else {
          if (i >= st.inner().count()) throw Stop{Outcome::Panic, "index-out-of-bounds"};
          const IrType elem = st.inner().inner();
          define(in, IrType::address(elem), {s.v + i * size_of(elem, types_), 0});
        }
        return;
      }
      case Opcode::OptionUnwrap: {
        const Val v = env_.at(in.operands[0].name);
        if (v.v == 0) throw Stop{Outcome::Panic, "unwrap-none"};
        define(in, type_of(in.operands[0].name).inner(), v);
        return;
      }
      case Opcode::SliceLen: {
        define(in, IrType::integer(64), {env_.at(in.operands[0].name).len, 0});
        return;
      }
      case Opcode::Call: throw std::runtime_error("interpreter: calls are not supported");
    }
  }
};

}  // namespace

Outcome interpret(const IrFunction& fn, const TypeTable& types, const std::vector<Arg>& args, unsigned loop_unroll) {
  return Machine(fn, types, loop_unroll).run(args);
}

}  // namespace oracle
