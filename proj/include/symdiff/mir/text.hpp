#pragma once

#include <string>
#include <string_view>

#include "symdiff/mir/ir.hpp"

namespace symdiff::mir {

/// Parses and validates a mini-IR program. Throws IrError on syntax errors,
/// dialect violations, undefined values, and type errors.
Program parse_ir(std::string_view text);

/// Canonical text. parse_ir(print_ir(p)) == p for every valid program.
std::string print_ir(const Program& program);
std::string print_function(const IrFunction& fn);
std::string print_type(const IrType& t);

}  // namespace symdiff::mir
