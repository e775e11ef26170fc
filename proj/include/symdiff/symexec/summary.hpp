#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "symdiff/mir/ir.hpp"
#include "symdiff/symexec/expr.hpp"

namespace symdiff::symexec {

enum class Terminal : std::uint8_t {
  Return,
  Panic,
  BudgetExhausted,
  Undefined,  // memory error the dialect does not define (null or out-of-range access)
};

const char* to_string(Terminal t);

struct PathSummary {
  std::vector<sym::ExprRef> constraints;  // width 1; safety assumptions wrapped in Safe
  std::optional<sym::ExprRef> ret;
  std::map<std::string, sym::ExprRef> outputs;  // out-param leaves and ret.len / ret.cap
  Terminal terminal = Terminal::Return;
  std::string code;  // panic or undefined reason
  bool ub = false;   // value depends on a C undefined-behaviour surrogate

  friend bool operator==(const PathSummary& a, const PathSummary& b);
};

/// Field names of a region, used to render constraints readably.
struct RegionShape {
  std::uint64_t size = 0;
  bool buffer = false;
  std::vector<std::pair<std::uint64_t, std::string>> leaves;  // offset, path suffix
};

struct ExecResult {
  std::string function;
  mir::Dialect dialect = mir::Dialect::C;
  std::vector<PathSummary> paths;
  bool incomplete = false;
  std::string incomplete_reason;
  std::map<std::string, RegionShape> regions;

  std::size_t count(Terminal t) const;
};

}  // namespace symdiff::symexec
