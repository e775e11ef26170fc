#pragma once

#include "symdiff/mir/ir.hpp"
#include "symdiff/symexec/config.hpp"
#include "symdiff/symexec/summary.hpp"

namespace symdiff::symexec {

/// Depth-first exploration of every feasible path of fn. Paths are reported in
/// exploration order (true successor first), so the result is deterministic.
/// Throws UnsupportedParam for parameters that cannot be symbolized and
/// mir::IrError when fn does not verify.
ExecResult execute(const mir::IrFunction& fn, const mir::TypeTable& types, const ExecConfig& cfg);

}  // namespace symdiff::symexec
