#include "symdiff/mir/ir.hpp"

#include <array>
#include <utility>

#include "symdiff/mir/text.hpp"

namespace symdiff::mir {

IrType IrType::integer(unsigned bits) {
  IrType t;
  t.kind_ = TypeKind::Int;
  t.bits_ = bits;
  return t;
}

IrType IrType::address(IrType pointee) {
  IrType t;
  t.kind_ = TypeKind::Address;
  t.inner_ = std::make_shared<const IrType>(std::move(pointee));
  return t;
}

IrType IrType::record(std::string name) {
  IrType t;
  t.kind_ = TypeKind::Record;
  t.name_ = std::move(name);
  return t;
}

IrType IrType::array(IrType elem, std::uint64_t count) {
  IrType t;
  t.kind_ = TypeKind::Array;
  t.count_ = count;
  t.inner_ = std::make_shared<const IrType>(std::move(elem));
  return t;
}

IrType IrType::str_slice() {
  IrType t;
  t.kind_ = TypeKind::StrSlice;
  return t;
}

IrType IrType::byte_vector() {
  IrType t;
  t.kind_ = TypeKind::ByteVec;
  return t;
}

IrType IrType::optional(IrType inner) {
  IrType t;
  t.kind_ = TypeKind::Optional;
  t.inner_ = std::make_shared<const IrType>(std::move(inner));
  return t;
}

IrType IrType::unit() { return IrType{}; }

const IrType& IrType::inner() const {
  if (!inner_) throw std::logic_error("IrType::inner on a type without payload: " + to_string());
  return *inner_;
}

const IrType& IrType::unwrap_optional() const {
  const IrType* t = this;
  while (t->kind_ == TypeKind::Optional) t = t->inner_.get();
  return *t;
}

std::string IrType::to_string() const { return print_type(*this); }

bool operator==(const IrType& a, const IrType& b) {
  if (a.kind_ != b.kind_ || a.bits_ != b.bits_ || a.name_ != b.name_ || a.count_ != b.count_) return false;
  if (static_cast<bool>(a.inner_) != static_cast<bool>(b.inner_)) return false;
  return !a.inner_ || *a.inner_ == *b.inner_;
}

const char* to_string(Dialect d) { return d == Dialect::C ? "c" : "rust"; }

namespace {

constexpr std::array<std::pair<Opcode, const char*>, 28> kOpcodes{{
    {Opcode::Const, "const"},
    {Opcode::Add, "add"},
    {Opcode::Sub, "sub"},
    {Opcode::Mul, "mul"},
    {Opcode::UDiv, "udiv"},
    {Opcode::SDiv, "sdiv"},
    {Opcode::And, "and"},
    {Opcode::Or, "or"},
    {Opcode::Xor, "xor"},
    {Opcode::Shl, "shl"},
    {Opcode::LShr, "lshr"},
    {Opcode::AShr, "ashr"},
    {Opcode::ICmp, "icmp"},
    {Opcode::ZExt, "zext"},
    {Opcode::SExt, "sext"},
    {Opcode::Trunc, "trunc"},
    {Opcode::Alloc, "alloc"},
    {Opcode::Load, "load"},
    {Opcode::Store, "store"},
    {Opcode::FieldAddr, "field-addr"},
    {Opcode::IndexAddr, "index-addr"},
    {Opcode::Call, "call"},
    {Opcode::CheckedAdd, "checked-add"},
    {Opcode::CheckedSub, "checked-sub"},
    {Opcode::CheckedMul, "checked-mul"},
    {Opcode::BoundsCheckedIndex, "bounds-checked-index"},
    {Opcode::OptionUnwrap, "option-unwrap"},
    {Opcode::SliceLen, "slice-len"},
}};

constexpr std::array<std::pair<CmpPred, const char*>, 10> kPreds{{
    {CmpPred::Eq, "eq"},
    {CmpPred::Ne, "ne"},
    {CmpPred::Ult, "ult"},
    {CmpPred::Ule, "ule"},
    {CmpPred::Ugt, "ugt"},
    {CmpPred::Uge, "uge"},
    {CmpPred::Slt, "slt"},
    {CmpPred::Sle, "sle"},
    {CmpPred::Sgt, "sgt"},
    {CmpPred::Sge, "sge"},
}};

}  // namespace

const char* mnemonic(Opcode op) {
  for (const auto& [o, s] : kOpcodes)
    if (o == op) return s;
  return "?";
}

const char* mnemonic(CmpPred p) {
  for (const auto& [o, s] : kPreds)
    if (o == p) return s;
  return "?";
}

std::optional<Opcode> opcode_from(std::string_view s) {
  for (const auto& [o, name] : kOpcodes)
    if (s == name) return o;
  return std::nullopt;
}

std::optional<CmpPred> pred_from(std::string_view s) {
  for (const auto& [o, name] : kPreds)
    if (s == name) return o;
  return std::nullopt;
}

bool is_binary_arith(Opcode op) {
  switch (op) {
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
    case Opcode::AShr:
      return true;
    default:
      return false;
  }
}

bool is_checked(Opcode op) {
  return op == Opcode::CheckedAdd || op == Opcode::CheckedSub || op == Opcode::CheckedMul;
}

bool is_rust_only(Opcode op) {
  return is_checked(op) || op == Opcode::BoundsCheckedIndex || op == Opcode::OptionUnwrap ||
         op == Opcode::SliceLen;
}

std::string Operand::to_string() const { return is_literal ? std::to_string(literal) : name; }

const Block* IrFunction::find_block(std::string_view label) const {
  for (const auto& b : blocks)
    if (b.label == label) return &b;
  return nullptr;
}

const IrFunction* Program::find(std::string_view name) const {
  for (const auto& f : functions)
    if (f.name == name) return &f;
  return nullptr;
}

namespace {

std::string kind_prefix(IrError::Kind k) {
  switch (k) {
    case IrError::Kind::Syntax: return "syntax error";
    case IrError::Kind::Dialect: return "dialect violation";
    case IrError::Kind::UndefinedValue: return "undefined value";
    case IrError::Kind::Type: return "type error";
    case IrError::Kind::Structure: return "malformed function";
  }
  return "error";
}

}  // namespace

IrError::IrError(Kind kind, SourceLoc loc, const std::string& msg)
    : std::runtime_error(kind_prefix(kind) + " at " + std::to_string(loc.line) + ":" +
                         std::to_string(loc.column) + ": " + msg),
      kind_(kind),
      loc_(loc) {}

}  // namespace symdiff::mir
