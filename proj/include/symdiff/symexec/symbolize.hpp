#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "symdiff/mir/ir.hpp"
#include "symdiff/symexec/config.hpp"
#include "symdiff/symexec/memory.hpp"

namespace symdiff::symexec {

class UnsupportedParam : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Symbolization {
  std::map<std::string, Value> env;  // parameter name -> value
  std::vector<MemRegion> regions;
};

/// Binds parameter i to `arg<i>`; every address gets a region named after its
/// access path (`arg0`, `arg0.next`, `arg0.*`). Nested regions stay lazy unless
/// `eager` is set, in which case the whole graph up to the depth limit is built.
Symbolization symbolize(const mir::IrFunction& fn, const mir::TypeTable& types, const ExecConfig& cfg,
                        bool eager = false);

/// Creates the region a lazy pointer refers to, appends it to `regions`, and
/// returns the pointer with provenance (or the null constant beyond the depth
/// limit). Nested pointers inside the new region are lazy again unless eager.
Value materialize(const LazyTarget& target, const mir::TypeTable& types, const ExecConfig& cfg,
                  std::vector<MemRegion>& regions, bool eager = false);

/// A lazy input pointer for `path`, or the null constant when depth exceeds the limit.
Value input_pointer(const std::string& path, const mir::IrType& pointee, unsigned depth, const ExecConfig& cfg);

}  // namespace symdiff::symexec
