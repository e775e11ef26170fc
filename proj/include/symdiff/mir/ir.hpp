#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace symdiff::mir {

enum class TypeKind : std::uint8_t { Int, Address, Record, Array, StrSlice, ByteVec, Optional, Unit };

/// Immutable IR type. Records are referenced by name and resolved through a
/// TypeTable, which lets a record point to itself through an address.
class IrType {
 public:
  IrType() = default;

  static IrType integer(unsigned bits);
  static IrType address(IrType pointee);
  static IrType record(std::string name);
  static IrType array(IrType elem, std::uint64_t count);
  static IrType str_slice();
  static IrType byte_vector();
  static IrType optional(IrType inner);
  static IrType unit();

  TypeKind kind() const { return kind_; }
  unsigned bits() const { return bits_; }
  const std::string& record_name() const { return name_; }
  std::uint64_t count() const { return count_; }
  /// Pointee, array element, or optional payload.
  const IrType& inner() const;

  bool is_int() const { return kind_ == TypeKind::Int; }
  bool is_address() const { return kind_ == TypeKind::Address; }
  bool is_fat() const { return kind_ == TypeKind::StrSlice || kind_ == TypeKind::ByteVec; }
  /// Strips any number of optional wrappers.
  const IrType& unwrap_optional() const;

  std::string to_string() const;

  friend bool operator==(const IrType& a, const IrType& b);
  friend bool operator!=(const IrType& a, const IrType& b) { return !(a == b); }

 private:
  TypeKind kind_ = TypeKind::Unit;
  unsigned bits_ = 0;
  std::string name_;
  std::uint64_t count_ = 0;
  std::shared_ptr<const IrType> inner_;
};

struct RecordField {
  std::string name;
  IrType type;
  friend bool operator==(const RecordField&, const RecordField&) = default;
};

struct RecordDef {
  std::string name;
  std::vector<RecordField> fields;
  friend bool operator==(const RecordDef&, const RecordDef&) = default;
};

using TypeTable = std::map<std::string, RecordDef>;

enum class Dialect : std::uint8_t { C, Rust };

const char* to_string(Dialect d);

enum class Opcode : std::uint8_t {
  Const,
  Add,
  Sub,
  Mul,
  UDiv,
  SDiv,
  And,
  Or,
  Xor,
  Shl,
  LShr,
  AShr,
  ICmp,
  ZExt,
  SExt,
  Trunc,
  Alloc,
  Load,
  Store,
  FieldAddr,
  IndexAddr,
  Call,
  CheckedAdd,
  CheckedSub,
  CheckedMul,
  BoundsCheckedIndex,
  OptionUnwrap,
  SliceLen,
};

enum class CmpPred : std::uint8_t { Eq, Ne, Ult, Ule, Ugt, Uge, Slt, Sle, Sgt, Sge };

const char* mnemonic(Opcode op);
const char* mnemonic(CmpPred p);
std::optional<Opcode> opcode_from(std::string_view s);
std::optional<CmpPred> pred_from(std::string_view s);

bool is_binary_arith(Opcode op);
bool is_checked(Opcode op);
/// Instructions that only a rust-dialect function may contain.
bool is_rust_only(Opcode op);

struct Operand {
  bool is_literal = false;
  std::string name;
  std::int64_t literal = 0;

  static Operand value(std::string n) { return Operand{false, std::move(n), 0}; }
  static Operand lit(std::int64_t v) { return Operand{true, {}, v}; }
  std::string to_string() const;
  friend bool operator==(const Operand&, const Operand&) = default;
};

struct SourceLoc {
  int line = 0;
  int column = 0;
};

struct Instr {
  Opcode op = Opcode::Const;
  std::string result;               // empty for store and unit calls
  std::optional<IrType> type;       // const/alloc/load/ext target/call return
  std::vector<Operand> operands;
  CmpPred pred = CmpPred::Eq;       // icmp only
  bool is_signed = false;           // checked-* only
  std::string symbol;               // field name for field-addr, callee for call
  SourceLoc loc;                    // not part of equality

  friend bool operator==(const Instr& a, const Instr& b) {
    return a.op == b.op && a.result == b.result && a.type == b.type && a.operands == b.operands &&
           a.pred == b.pred && a.is_signed == b.is_signed && a.symbol == b.symbol;
  }
};

enum class TermKind : std::uint8_t { Jump, Branch, Return, Panic };

struct Terminator {
  TermKind kind = TermKind::Return;
  std::optional<Operand> value;  // return value or branch condition
  std::string target;            // jump target / branch then
  std::string else_target;
  std::string code;              // panic code
  SourceLoc loc;

  friend bool operator==(const Terminator& a, const Terminator& b) {
    return a.kind == b.kind && a.value == b.value && a.target == b.target &&
           a.else_target == b.else_target && a.code == b.code;
  }
};

struct Block {
  std::string label;
  std::vector<Instr> instrs;
  Terminator term;
  friend bool operator==(const Block&, const Block&) = default;
};

struct Param {
  std::string name;
  IrType type;
  bool out = false;
  friend bool operator==(const Param&, const Param&) = default;
};

struct IrFunction {
  std::string name;
  Dialect dialect = Dialect::C;
  std::vector<Param> params;
  IrType ret = IrType::unit();
  std::vector<Block> blocks;

  const Block* find_block(std::string_view label) const;
  friend bool operator==(const IrFunction&, const IrFunction&) = default;
};

struct Program {
  TypeTable types;
  std::vector<IrFunction> functions;

  const IrFunction* find(std::string_view name) const;
  friend bool operator==(const Program&, const Program&) = default;
};

class IrError : public std::runtime_error {
 public:
  enum class Kind { Syntax, Dialect, UndefinedValue, Type, Structure };
  IrError(Kind kind, SourceLoc loc, const std::string& msg);
  Kind kind() const { return kind_; }
  SourceLoc loc() const { return loc_; }

 private:
  Kind kind_;
  SourceLoc loc_;
};

}  // namespace symdiff::mir
