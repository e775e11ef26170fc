#include "symdiff/symexec/summary.hpp"

#include <stdexcept>

#include "symdiff/symexec/config.hpp"

namespace symdiff::symexec {

void ExecConfig::validate() const {
  auto positive = [](unsigned v, const char* name) {
    if (v == 0) throw std::invalid_argument(std::string(name) + " must be positive");
  };
  positive(depth_limit, "depth-limit");
  positive(slice_length, "slice-length");
  positive(loop_unroll, "loop-unroll");
  positive(path_cap, "path-cap");
  positive(timeout_seconds, "timeout");
  positive(feasibility_width, "feasibility-width");
  if (feasibility_width > 32) throw std::invalid_argument("feasibility-width above 32 bits would not terminate");
}

const char* to_string(Terminal t) {
  switch (t) {
    case Terminal::Return: return "return";
    case Terminal::Panic: return "panic";
    case Terminal::BudgetExhausted: return "budget-exhausted";
    case Terminal::Undefined: return "undefined";
  }
  return "?";
}

bool operator==(const PathSummary& a, const PathSummary& b) {
  if (a.terminal != b.terminal || a.code != b.code || a.ub != b.ub) return false;
  if (a.constraints.size() != b.constraints.size() || a.outputs.size() != b.outputs.size()) return false;
  if (a.ret.has_value() != b.ret.has_value()) return false;
  if (a.ret && !sym::equal(*a.ret, *b.ret)) return false;
  for (std::size_t i = 0; i < a.constraints.size(); ++i)
    if (!sym::equal(a.constraints[i], b.constraints[i])) return false;
  auto ia = a.outputs.begin();
  for (auto ib = b.outputs.begin(); ib != b.outputs.end(); ++ia, ++ib)
    if (ia->first != ib->first || !sym::equal(ia->second, ib->second)) return false;
  return true;
}

std::size_t ExecResult::count(Terminal t) const {
  std::size_t n = 0;
  for (const auto& p : paths) n += p.terminal == t;
  return n;
}

}  // namespace symdiff::symexec
