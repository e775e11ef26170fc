#pragma once
// Reference evaluator for symbolic expressions, written separately from the
// library's folding code so tests do not check it against itself.

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "symdiff/symexec/expr.hpp"

namespace oracle {

using Valuation = std::map<std::string, std::uint64_t>;

struct EvalOptions {
  // Safe(p) is 1 by definition; path matching needs the predicate itself.
  bool safe_as_predicate = false;
};

/// Memoizes over the DAG for one valuation; reuse it for expressions that
/// share subterms.
class Evaluator {
 public:
  Evaluator(const Valuation& v, EvalOptions opts = {});
  ~Evaluator();
  std::uint64_t operator()(const symdiff::sym::ExprRef& e);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Flattened form of a scalar expression (constants, symbols, operators) for
/// exhaustive enumeration. Safe evaluates to 1.
class Tape {
 public:
  Tape(const symdiff::sym::ExprRef& root, const std::vector<std::string>& symbols);
  /// symbols[i] is the value of the i-th name given at construction.
  std::uint64_t run(const std::uint64_t* symbols);

 private:
  struct Step {
    symdiff::sym::Op op;
    unsigned width = 0, child_width = 0;
    std::uint64_t value = 0;
    std::uint32_t kids[3] = {0, 0, 0};
  };
  std::vector<Step> steps_;
  std::vector<std::uint64_t> slots_;
};

std::uint64_t eval(const symdiff::sym::ExprRef& e, const Valuation& v, EvalOptions opts = {});

inline std::uint64_t bits(unsigned w) { return w >= 64 ? ~0ull : ((1ull << w) - 1); }
inline std::int64_t as_signed(std::uint64_t x, unsigned w) {
  x &= bits(w);
  if (w < 64 && (x >> (w - 1)) & 1) return static_cast<std::int64_t>(x | ~bits(w));
  return static_cast<std::int64_t>(x);
}

}  // namespace oracle
