#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "symdiff/mir/ir.hpp"

namespace symdiff::mir {

inline constexpr std::uint64_t kAddressBytes = 8;

struct LayoutLeaf {
  std::uint64_t offset = 0;
  IrType type;
  std::string path;  // "", ".field", "[3]", ".data", ...
  friend bool operator==(const LayoutLeaf&, const LayoutLeaf&) = default;
};

/// Packed size in bytes. i1 occupies one byte.
std::uint64_t size_of(const IrType& t, const TypeTable& types);

/// Flattened packed layout: fields in declaration order, no padding.
/// Optional wrappers are transparent; slices expose .data/.len and vectors
/// additionally .cap.
std::vector<LayoutLeaf> layout_of(const IrType& t, const TypeTable& types);

}  // namespace symdiff::mir
