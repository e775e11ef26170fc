#pragma once
// Concrete interpreter for mini-IR functions, used as the executor's oracle.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "symdiff/mir/ir.hpp"

namespace oracle {

/// A scalar, or a buffer (pointer, str or vec parameter) with its bytes.
struct Arg {
  std::uint64_t scalar = 0;
  std::optional<std::vector<std::uint8_t>> bytes;  // absent: null pointer for address params

  static Arg value(std::uint64_t v) { return {v, std::nullopt}; }
  static Arg buffer(std::vector<std::uint8_t> b) { return {0, std::move(b)}; }
  static Arg null() { return {0, std::nullopt}; }
};

struct Outcome {
  enum Kind { Return, Panic, Undefined, Budget } kind = Return;
  std::optional<std::uint64_t> value;  // returned integer
  std::string code;
  bool ub = false;  // reached a C division by zero
  std::map<std::size_t, std::vector<std::uint8_t>> buffers;  // final bytes of buffer params by index
};

Outcome interpret(const symdiff::mir::IrFunction& fn, const symdiff::mir::TypeTable& types, const std::vector<Arg>& args,
                  unsigned loop_unroll = 8);

}  // namespace oracle
