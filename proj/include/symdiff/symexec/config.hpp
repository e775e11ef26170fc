#pragma once

namespace symdiff::symexec {

struct ExecConfig {
  unsigned depth_limit = 10;       // pointer nesting levels that receive a region
  unsigned slice_length = 100;     // bytes behind a str, vec, or char pointer
  unsigned loop_unroll = 8;        // extra visits of a block allowed per path
  unsigned path_cap = 256;         // summaries before the result is cut short
  unsigned timeout_seconds = 60;   // per function
  unsigned feasibility_width = 16; // enumeration limit in input bits

  /// Throws std::invalid_argument naming the first bad field.
  void validate() const;
};

}  // namespace symdiff::symexec
