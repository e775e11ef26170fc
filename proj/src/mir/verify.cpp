#include "symdiff/mir/verify.hpp"

#include <functional>
#include <set>

#include "symdiff/mir/layout.hpp"

namespace symdiff::mir {

namespace {

[[noreturn]] void fail(IrError::Kind k, SourceLoc loc, const std::string& msg) { throw IrError(k, loc, msg); }

bool compatible(const IrType& a, const IrType& b) { return a.unwrap_optional() == b.unwrap_optional(); }

class Verifier {
 public:
  Verifier(const IrFunction& fn, const TypeTable& types) : fn_(fn), types_(types) {}

  FunctionInfo run() {
    if (fn_.blocks.empty()) fail(IrError::Kind::Structure, {}, "function '" + fn_.name + "' has no blocks");
    check_signature();
    collect_definitions();
    compute_dominators();
    for (std::size_t b : order_) check_block(b);
    return std::move(info_);
  }

 private:
  struct Def {
    std::size_t block;
    std::size_t index;  // instruction index; params use block 0, index 0 with is_param
    bool is_param;
  };

  void check_type(const IrType& t, SourceLoc loc) {
    switch (t.kind()) {
      case TypeKind::Record:
        if (!types_.count(t.record_name()))
          fail(IrError::Kind::Type, loc, "unknown record type '" + t.record_name() + "'");
        break;
      case TypeKind::Optional: {
        const auto k = t.inner().kind();
        if (k != TypeKind::Address && k != TypeKind::StrSlice && k != TypeKind::ByteVec)
          fail(IrError::Kind::Type, loc, "optional payload must be an address, str or vec: " + t.to_string());
        check_type(t.inner(), loc);
        break;
      }
      case TypeKind::Address:
      case TypeKind::Array:
        check_type(t.inner(), loc);
        break;
      default:
        break;
    }
  }

  void check_signature() {
    std::set<std::string> seen;
    for (const auto& p : fn_.params) {
      check_type(p.type, {});
      if (!seen.insert(p.name).second)
        fail(IrError::Kind::Structure, {}, "duplicate parameter '" + p.name + "'");
      const auto k = p.type.unwrap_optional().kind();
      if (p.out && k != TypeKind::Address && k != TypeKind::StrSlice && k != TypeKind::ByteVec)
        fail(IrError::Kind::Type, {}, "out parameter '" + p.name + "' must be an address, str or vec");
      info_.value_types.emplace(p.name, p.type);
    }
    check_type(fn_.ret, {});
    std::set<std::string> labels;
    for (const auto& b : fn_.blocks)
      if (!labels.insert(b.label).second)
        fail(IrError::Kind::Structure, b.term.loc, "duplicate block label '" + b.label + "'");
  }

  void collect_definitions() {
    for (const auto& p : fn_.params) defs_[p.name] = Def{0, 0, true};
    std::map<std::string, unsigned> site_counter;
    for (std::size_t b = 0; b < fn_.blocks.size(); ++b) {
      const auto& blk = fn_.blocks[b];
      for (std::size_t i = 0; i < blk.instrs.size(); ++i) {
        const auto& in = blk.instrs[i];
        if (fn_.dialect == Dialect::C && is_rust_only(in.op))
          fail(IrError::Kind::Dialect, in.loc,
               std::string("'") + mnemonic(in.op) + "' is not allowed in a c-dialect function");
        if (in.op == Opcode::Call) info_.call_sites[{blk.label, i}] = site_counter[in.symbol]++;
        if (in.result.empty()) continue;
        if (!defs_.emplace(in.result, Def{b, i, false}).second)
          fail(IrError::Kind::Structure, in.loc, "value '" + in.result + "' assigned more than once");
      }
      for (const std::string* target : {&blk.term.target, &blk.term.else_target}) {
        if (target->empty()) continue;
        if (!fn_.find_block(*target))
          fail(IrError::Kind::Structure, blk.term.loc, "unknown block label '" + *target + "'");
      }
    }
  }

  std::size_t index_of(const std::string& label) const {
    for (std::size_t i = 0; i < fn_.blocks.size(); ++i)
      if (fn_.blocks[i].label == label) return i;
    return 0;
  }

  std::vector<std::size_t> successors(std::size_t b) const {
    const auto& t = fn_.blocks[b].term;
    std::vector<std::size_t> s;
    if (t.kind == TermKind::Jump) s.push_back(index_of(t.target));
    if (t.kind == TermKind::Branch) {
      s.push_back(index_of(t.target));
      s.push_back(index_of(t.else_target));
    }
    return s;
  }

  void compute_dominators() {
    const std::size_t n = fn_.blocks.size();
    std::vector<std::vector<std::size_t>> preds(n);
    reachable_.assign(n, false);
    std::vector<std::size_t> postorder;
    std::function<void(std::size_t)> dfs = [&](std::size_t b) {
      reachable_[b] = true;
      for (std::size_t s : successors(b)) {
        preds[s].push_back(b);
        if (!reachable_[s]) dfs(s);
      }
      postorder.push_back(b);
    };
    dfs(0);
    order_.assign(postorder.rbegin(), postorder.rend());
    for (std::size_t b = 0; b < n; ++b)
      if (!reachable_[b]) order_.push_back(b);
    dom_.assign(n, std::vector<bool>(n, true));
    dom_[0].assign(n, false);
    dom_[0][0] = true;
    bool changed = true;
    while (changed) {
      changed = false;
      for (std::size_t b = 1; b < n; ++b) {
        if (!reachable_[b]) continue;
        std::vector<bool> d(n, true);
        bool any = false;
        for (std::size_t p : preds[b]) {
          if (!reachable_[p]) continue;
          any = true;
          for (std::size_t k = 0; k < n; ++k) d[k] = d[k] && dom_[p][k];
        }
        if (!any) d.assign(n, false);
        d[b] = true;
        if (d != dom_[b]) {
          dom_[b] = std::move(d);
          changed = true;
        }
      }
    }
  }

  const IrType& use(const Operand& op, std::size_t block, std::size_t index, SourceLoc loc) {
    auto it = defs_.find(op.name);
    if (it == defs_.end()) fail(IrError::Kind::UndefinedValue, loc, "'" + op.name + "' is not defined");
    const Def& d = it->second;
    if (!d.is_param && reachable_[block]) {
      const bool ok = d.block == block ? d.index < index : dom_[block][d.block];
      if (!ok) fail(IrError::Kind::UndefinedValue, loc, "'" + op.name + "' does not dominate its use");
    }
    auto t = info_.value_types.find(op.name);
    if (t == info_.value_types.end())
      fail(IrError::Kind::UndefinedValue, loc, "'" + op.name + "' is used before its definition");
    return t->second;
  }

  /// Resolves a pair of operands where a literal borrows the other's type.
  IrType pair_type(const Instr& in, std::size_t b, std::size_t i) {
    const Operand& x = in.operands[0];
    const Operand& y = in.operands[1];
    if (x.is_literal && y.is_literal)
      fail(IrError::Kind::Type, in.loc, std::string("'") + mnemonic(in.op) + "' needs at least one named operand");
    if (x.is_literal) return use(y, b, i, in.loc);
    const IrType tx = use(x, b, i, in.loc);
    if (!y.is_literal) {
      const IrType& ty = use(y, b, i, in.loc);
      if (!compatible(tx, ty) && !(tx.unwrap_optional().is_address() && ty.unwrap_optional().is_address()))
        fail(IrError::Kind::Type, in.loc, "operand types differ: " + tx.to_string() + " vs " + ty.to_string());
    }
    return tx;
  }

  IrType int_operand(const Operand& op, std::size_t b, std::size_t i, SourceLoc loc, const char* what) {
    if (op.is_literal) return IrType::integer(64);
    const IrType& t = use(op, b, i, loc);
    if (!t.is_int()) fail(IrError::Kind::Type, loc, std::string(what) + " must be an integer, got " + t.to_string());
    return t;
  }

  IrType pointer_operand(const Operand& op, std::size_t b, std::size_t i, SourceLoc loc) {
    if (op.is_literal) fail(IrError::Kind::Type, loc, "expected an address value, got a literal");
    const IrType& t = use(op, b, i, loc);
    if (!t.is_address()) fail(IrError::Kind::Type, loc, "expected an address, got " + t.to_string());
    return t;
  }

  IrType result_type(const Instr& in, std::size_t b, std::size_t i) {
    switch (in.op) {
      case Opcode::Const: {
        const IrType& t = *in.type;
        if (!t.is_int() && !(t.is_address() && in.operands[0].literal == 0))
          fail(IrError::Kind::Type, in.loc, "const must be an integer or a null address");
        return t;
      }
      case Opcode::ICmp: {
        const IrType t = pair_type(in, b, i).unwrap_optional();
        if (!t.is_int() && !t.is_address() && !t.is_fat())
          fail(IrError::Kind::Type, in.loc, "icmp operands must be integers or addresses");
        return IrType::integer(1);
      }
      case Opcode::ZExt:
      case Opcode::SExt:
      case Opcode::Trunc: {
        const IrType src = int_operand(in.operands[0], b, i, in.loc, "extension source");
        if (in.operands[0].is_literal) fail(IrError::Kind::Type, in.loc, "cannot extend a literal");
        if (!in.type->is_int()) fail(IrError::Kind::Type, in.loc, "extension target must be an integer");
        const unsigned from = src.bits(), to = in.type->bits();
        if (from == to) fail(IrError::Kind::Type, in.loc, "source and destination widths are equal");
        if (in.op == Opcode::Trunc ? to > from : to < from)
          fail(IrError::Kind::Type, in.loc, std::string("invalid widths for ") + mnemonic(in.op));
        return *in.type;
      }
      case Opcode::Alloc:
        check_type(*in.type, in.loc);
        return IrType::address(*in.type);
      case Opcode::Load: {
        pointer_operand(in.operands[0], b, i, in.loc);
        check_type(*in.type, in.loc);
        const auto k = in.type->kind();
        if (k == TypeKind::Record || k == TypeKind::Array || k == TypeKind::Unit)
          fail(IrError::Kind::Type, in.loc, "cannot load an aggregate of type " + in.type->to_string());
        return *in.type;
      }
      case Opcode::Store: {
        const IrType p = pointer_operand(in.operands[1], b, i, in.loc);
        if (!in.operands[0].is_literal) {
          const IrType& v = use(in.operands[0], b, i, in.loc);
          const auto k = v.kind();
          if (k == TypeKind::Record || k == TypeKind::Array || k == TypeKind::Unit)
            fail(IrError::Kind::Type, in.loc, "cannot store an aggregate");
        } else if (!p.inner().is_int() && !p.inner().is_address() && p.inner().kind() != TypeKind::Array) {
          fail(IrError::Kind::Type, in.loc, "literal stored through " + p.to_string());
        }
        return IrType::unit();
      }
      case Opcode::FieldAddr: {
        const IrType p = pointer_operand(in.operands[0], b, i, in.loc);
        if (p.inner().kind() != TypeKind::Record)
          fail(IrError::Kind::Type, in.loc, "field-addr needs a record address, got " + p.to_string());
        for (const auto& f : types_.at(p.inner().record_name()).fields)
          if (f.name == in.symbol) return IrType::address(f.type);
        fail(IrError::Kind::Type, in.loc, "record '" + p.inner().record_name() + "' has no field '" + in.symbol + "'");
      }
      case Opcode::IndexAddr: {
        const IrType p = pointer_operand(in.operands[0], b, i, in.loc);
        int_operand(in.operands[1], b, i, in.loc, "index");
        if (p.inner().kind() == TypeKind::Array) return IrType::address(p.inner().inner());
        return p;
      }
      case Opcode::Call:
        for (const auto& op : in.operands)
          if (!op.is_literal) use(op, b, i, in.loc);
        if (in.type) {
          check_type(*in.type, in.loc);
          if (in.type->kind() == TypeKind::Unit) fail(IrError::Kind::Type, in.loc, "call result of unit type");
          return *in.type;
        }
        return IrType::unit();
      case Opcode::CheckedAdd:
      case Opcode::CheckedSub:
      case Opcode::CheckedMul:
      case Opcode::Add:
      case Opcode::Sub:
      case Opcode::Mul:
      case Opcode::UDiv:
      case Opcode::SDiv:
      case Opcode::And:
      case Opcode::Or:
      case Opcode::Xor:
      case Opcode::Shl:
      case Opcode::LShr:
      case Opcode::AShr: {
        const IrType t = pair_type(in, b, i);
        if (!t.is_int()) fail(IrError::Kind::Type, in.loc, std::string(mnemonic(in.op)) + " needs integer operands");
        return t;
      }
      case Opcode::BoundsCheckedIndex: {
        if (in.operands[0].is_literal) fail(IrError::Kind::Type, in.loc, "bounds-checked-index on a literal");
        const IrType& s = use(in.operands[0], b, i, in.loc);
        int_operand(in.operands[1], b, i, in.loc, "index");
        if (s.is_fat()) return IrType::address(IrType::integer(8));
        if (s.is_address() && s.inner().kind() == TypeKind::Array) return IrType::address(s.inner().inner());
        fail(IrError::Kind::Type, in.loc, "bounds-checked-index needs a str, vec, or array address");
      }
      case Opcode::OptionUnwrap: {
        if (in.operands[0].is_literal) fail(IrError::Kind::Type, in.loc, "option-unwrap on a literal");
        const IrType& o = use(in.operands[0], b, i, in.loc);
        if (o.kind() != TypeKind::Optional) fail(IrError::Kind::Type, in.loc, "option-unwrap needs an optional value");
        return o.inner();
      }
      case Opcode::SliceLen: {
        if (in.operands[0].is_literal) fail(IrError::Kind::Type, in.loc, "slice-len on a literal");
        const IrType& s = use(in.operands[0], b, i, in.loc);
        if (!s.unwrap_optional().is_fat()) fail(IrError::Kind::Type, in.loc, "slice-len needs a str or vec");
        return IrType::integer(64);
      }
    }
    fail(IrError::Kind::Structure, in.loc, "unhandled opcode");
  }

  void check_block(std::size_t b) {
    const auto& blk = fn_.blocks[b];
    for (std::size_t i = 0; i < blk.instrs.size(); ++i) {
      const auto& in = blk.instrs[i];
      IrType t = result_type(in, b, i);
      if (!in.result.empty()) {
        if (t.kind() == TypeKind::Unit) fail(IrError::Kind::Type, in.loc, "instruction produces no value");
        info_.value_types[in.result] = std::move(t);
      } else if (in.op != Opcode::Store && in.op != Opcode::Call) {
        fail(IrError::Kind::Structure, in.loc, "instruction result must be named");
      }
    }
    const auto& t = blk.term;
    const std::size_t end = blk.instrs.size();
    switch (t.kind) {
      case TermKind::Return:
        if (fn_.ret.kind() == TypeKind::Unit) {
          if (t.value) fail(IrError::Kind::Type, t.loc, "unit function returns a value");
        } else if (!t.value) {
          fail(IrError::Kind::Type, t.loc, "missing return value");
        } else if (t.value->is_literal) {
          const IrType& r = fn_.ret.unwrap_optional();
          if (!r.is_int() && !(r.is_address() && t.value->literal == 0))
            fail(IrError::Kind::Type, t.loc, "literal return for type " + fn_.ret.to_string());
        } else if (!compatible(use(*t.value, b, end, t.loc), fn_.ret)) {
          fail(IrError::Kind::Type, t.loc, "return type mismatch, expected " + fn_.ret.to_string());
        }
        break;
      case TermKind::Branch:
        if (!t.value->is_literal && use(*t.value, b, end, t.loc) != IrType::integer(1))
          fail(IrError::Kind::Type, t.loc, "branch condition must be i1");
        break;
      default:
        break;
    }
  }

  const IrFunction& fn_;
  const TypeTable& types_;
  FunctionInfo info_;
  std::map<std::string, Def> defs_;
  std::vector<bool> reachable_;
  std::vector<std::size_t> order_;  // reverse postorder, then unreachable blocks
  std::vector<std::vector<bool>> dom_;
};

}  // namespace

FunctionInfo verify(const IrFunction& fn, const TypeTable& types) { return Verifier(fn, types).run(); }

void verify_types(const TypeTable& types) {
  // Records may only contain themselves through an address.
  std::map<std::string, int> state;
  std::function<void(const std::string&)> visit;
  std::function<void(const IrType&)> walk = [&](const IrType& t) {
    switch (t.kind()) {
      case TypeKind::Record:
        if (!types.count(t.record_name()))
          throw IrError(IrError::Kind::Type, {}, "unknown record type '" + t.record_name() + "'");
        visit(t.record_name());
        break;
      case TypeKind::Array:
      case TypeKind::Optional:
        walk(t.inner());
        break;
      default:
        break;
    }
  };
  visit = [&](const std::string& name) {
    int& s = state[name];
    if (s == 2) return;
    if (s == 1) throw IrError(IrError::Kind::Type, {}, "record '" + name + "' contains itself by value");
    s = 1;
    for (const auto& f : types.at(name).fields) walk(f.type);
    state[name] = 2;
  };
  for (const auto& [name, def] : types) {
    std::set<std::string> fields;
    for (const auto& f : def.fields)
      if (!fields.insert(f.name).second)
        throw IrError(IrError::Kind::Type, {}, "record '" + name + "' repeats field '" + f.name + "'");
    visit(name);
  }
}

}  // namespace symdiff::mir
