#pragma once

#include <map>
#include <string>

#include "symdiff/mir/ir.hpp"

namespace symdiff::mir {

/// Types of every named value (parameters and instruction results).
struct FunctionInfo {
  std::map<std::string, IrType> value_types;
  /// Static call-site ordinal per (block label, instruction index).
  std::map<std::pair<std::string, std::size_t>, unsigned> call_sites;
};

/// Checks block structure, dialect rules, single assignment, def-before-use
/// under dominance, and operand types. Throws IrError.
FunctionInfo verify(const IrFunction& fn, const TypeTable& types);

void verify_types(const TypeTable& types);

}  // namespace symdiff::mir
