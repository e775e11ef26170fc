#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "symdiff/mir/ir.hpp"
#include "symdiff/mir/layout.hpp"
#include "symdiff/symexec/expr.hpp"

namespace symdiff::symexec {

/// Where a pointer points: a region index in the current state plus a byte
/// offset (width 64, possibly symbolic).
struct PtrInfo {
  std::size_t region = 0;
  sym::ExprRef offset;
};

/// A nested input pointer whose region has not been created yet. The region is
/// materialized on first load so wide record graphs stay cheap.
struct LazyTarget {
  std::string path;
  mir::IrType pointee;
  unsigned depth = 0;
};

/// A runtime value. Pointers carry provenance; str and vec values carry their
/// parts (data, len, and for vec cap) and use the data pointer as `expr`.
struct Value {
  sym::ExprRef expr;
  std::optional<PtrInfo> ptr;
  std::shared_ptr<const LazyTarget> lazy;
  std::vector<Value> parts;

  static Value scalar(sym::ExprRef e) { return Value{std::move(e), std::nullopt, nullptr, {}}; }
};

struct Cell {
  std::uint64_t size = 0;
  Value value;
  bool written = false;  // false for input pointers placed by symbolization
};

/// A symbolic memory region. Bytes without a cell hold their initial content:
/// `(Read w8 i name)` for inputs, zero for allocations.
struct MemRegion {
  std::string name;    // used in Read nodes and as the origin of output paths
  std::uint64_t size = 0;
  bool zero_init = false;
  bool buffer = false;  // byte buffer: output paths are name[k]
  std::optional<mir::IrType> type;
  std::vector<mir::LayoutLeaf> layout;
  std::map<std::uint64_t, Cell> cells;

  sym::ExprRef initial(std::uint64_t off, unsigned bytes) const;
  /// The cell starting at off with exactly this size, if any.
  const Cell* exact(std::uint64_t off, std::uint64_t size) const;
  bool overlaps_cells(std::uint64_t off, std::uint64_t size) const;
  /// Current contents as an integer of bytes*8 bits, assembled from cells and
  /// initial bytes (little-endian).
  sym::ExprRef load_bits(std::uint64_t off, unsigned bytes) const;
  /// Replaces [off, off+size) with v; partially covered cells are split into bytes.
  void store(std::uint64_t off, std::uint64_t size, Value v);
  /// Byte ranges written during execution.
  std::vector<std::pair<std::uint64_t, std::uint64_t>> write_set() const;
  /// Output path of a cell: name[k] for buffers, name + layout path otherwise.
  std::string leaf_path(std::uint64_t off) const;
};

/// Byte j (0 = least significant) of an expression, width 8.
sym::ExprRef byte_of(const sym::ExprRef& e, unsigned j);

}  // namespace symdiff::symexec
