#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace symdiff::sym {

enum class Op : std::uint8_t {
  Const,
  Sym,
  // unary
  ZExt,
  SExt,
  Trunc,
  Neg,
  Not,
  Safe,  // marks a safety assumption discharged by a panic path; evaluates to 1
  // binary
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
  Eq,
  Ne,
  Ult,
  Slt,
  Ule,
  Sle,
  // other
  Read,
  Ite,
  ExtCall,
};

const char* op_name(Op op);
bool is_unary(Op op);
bool is_binary(Op op);
bool is_compare(Op op);
bool is_commutative(Op op);

class Expr;
using ExprRef = std::shared_ptr<const Expr>;

/// Immutable symbolic expression node. Children are shared, so an ExprRef is a
/// DAG. The content hash is computed once at construction and is stable across
/// runs and platforms (FNV-1a over a canonical encoding).
class Expr {
 public:
  Op op() const { return op_; }
  unsigned width() const { return width_; }
  std::uint64_t value() const { return value_; }  // Const
  /// Symbol name, Read region, or ExtCall callee.
  const std::string& name() const { return name_; }
  std::uint32_t site() const { return site_; }
  std::uint32_t occurrence() const { return occurrence_; }
  const std::vector<ExprRef>& kids() const { return kids_; }
  const ExprRef& kid(std::size_t i) const { return kids_.at(i); }
  std::uint64_t hash() const { return hash_; }

  bool is_const() const { return op_ == Op::Const; }
  bool is_const(std::uint64_t v) const { return op_ == Op::Const && value_ == v; }

  struct Token {};
  Expr(Token, Op op, unsigned width, std::uint64_t value, std::string name, std::uint32_t site,
       std::uint32_t occurrence, std::vector<ExprRef> kids);

 private:
  Op op_;
  unsigned width_;
  std::uint64_t value_;
  std::string name_;
  std::uint32_t site_;
  std::uint32_t occurrence_;
  std::vector<ExprRef> kids_;
  std::uint64_t hash_;
};

class WidthError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

std::uint64_t mask(unsigned width);
std::int64_t to_signed(std::uint64_t v, unsigned width);

// Builders validate widths and throw WidthError on inconsistent operands.
ExprRef constant(std::uint64_t value, unsigned width);
ExprRef symbol(std::string name, unsigned width);
ExprRef unary(Op op, unsigned width, ExprRef child);
ExprRef binary(Op op, ExprRef lhs, ExprRef rhs);
ExprRef read(std::string region, ExprRef offset, unsigned width);
ExprRef ite(ExprRef guard, ExprRef then_e, ExprRef else_e);
ExprRef ext_call(std::string callee, std::uint32_t site, std::uint32_t occurrence, unsigned width);
ExprRef safe(ExprRef predicate);
/// Generic rebuild with replaced children (same op/payload).
ExprRef rebuild(const Expr& e, std::vector<ExprRef> kids);

/// Syntactic negation: not(c), or x when c is not(x).
ExprRef negate(const ExprRef& c);
/// Folds the node when every child is a constant; otherwise builds it unchanged.
ExprRef fold_binary(Op op, ExprRef lhs, ExprRef rhs);
ExprRef fold_unary(Op op, unsigned width, ExprRef child);

bool equal(const Expr& a, const Expr& b);
inline bool equal(const ExprRef& a, const ExprRef& b) { return a == b || equal(*a, *b); }

struct ExprLess {
  bool operator()(const ExprRef& a, const ExprRef& b) const;
};

/// Number of distinct nodes (DAG size).
std::size_t dag_size(const ExprRef& e);

/// Valuation keys: symbols by name, read bytes as "<region>[<i>]", external
/// call results as ext_call_key().
using Valuation = std::map<std::string, std::uint64_t>;
std::string byte_key(const std::string& region, std::uint64_t index);
std::string ext_call_key(const std::string& callee, std::uint32_t site, std::uint32_t occurrence);

class EvalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Two's-complement evaluation at each node's declared width.
std::uint64_t eval_concrete(const ExprRef& e, const Valuation& valuation);

/// Applies a binary/unary operator to concrete operands (shared by folding,
/// the evaluator, and the compiled kernels).
std::uint64_t apply_binary(Op op, unsigned operand_width, std::uint64_t a, std::uint64_t b);
std::uint64_t apply_unary(Op op, unsigned result_width, unsigned child_width, std::uint64_t a);

}  // namespace symdiff::sym
