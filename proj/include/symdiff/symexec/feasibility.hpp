#pragma once

#include <optional>
#include <vector>

#include "symdiff/symexec/compiled.hpp"
#include "symdiff/symexec/expr.hpp"

namespace symdiff::sym {

enum class Feasibility { Feasible, Infeasible, Unknown };

const char* to_string(Feasibility f);

struct FeasibilityResult {
  Feasibility verdict = Feasibility::Unknown;
  std::optional<Valuation> witness;  // set when the enumeration found one
};

enum class Kernel { Auto, Serial, Parallel };

/// Path constraints may be wrapped in Safe; the wrapped predicate is what has
/// to hold on the path.
ExprRef predicate_of(const ExprRef& constraint);

/// Exact by exhaustive enumeration when the inputs of the constraints total at
/// most max_bits bits, Unknown otherwise (also for reads at symbolic offsets).
FeasibilityResult check_feasible(const std::vector<ExprRef>& constraints, unsigned max_bits,
                                 Kernel kernel = Kernel::Auto);

/// For a base set that is not known infeasible: decides base + added by
/// enumerating only the constraints connected to `added` through shared inputs.
FeasibilityResult check_extension(const std::vector<ExprRef>& base, const ExprRef& added, unsigned max_bits,
                                  Kernel kernel = Kernel::Auto);

/// Smallest packed assignment index satisfying all roots, if any. Both kernels
/// return the same index.
std::optional<std::uint64_t> find_witness_serial(const CompiledSet& cs);
std::optional<std::uint64_t> find_witness_parallel(const CompiledSet& cs);

}  // namespace symdiff::sym
