#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "symdiff/symexec/expr.hpp"

namespace symdiff::sym {

/// An input the enumerator assigns: a symbol, an external-call result, or one
/// byte of initial region memory at a constant offset.
struct Atom {
  std::string key;  // valuation key
  unsigned bits = 0;
};

/// Flattened evaluator over a fixed set of roots. Every distinct node is
/// evaluated once per valuation into a scratch array, which keeps exhaustive
/// enumeration cheap.
class CompiledSet {
 public:
  /// nullopt when a root reads memory at a symbolic offset (the byte set is
  /// then not a fixed list of atoms). With strip_safe, Safe(p) evaluates as p.
  static std::optional<CompiledSet> compile(const std::vector<ExprRef>& roots, bool strip_safe);

  const std::vector<Atom>& atoms() const { return atoms_; }
  unsigned total_bits() const { return total_bits_; }
  std::size_t node_count() const { return nodes_.size(); }
  std::size_t root_count() const { return roots_.size(); }

  /// Splits a packed assignment index into per-atom values (atom 0 in the low bits).
  void decode(std::uint64_t index, std::vector<std::uint64_t>& atom_values) const;
  /// Evaluates every node; scratch must hold node_count() entries.
  void run(const std::uint64_t* atom_values, std::uint64_t* scratch) const;
  std::uint64_t root_value(std::size_t i, const std::uint64_t* scratch) const { return scratch[roots_[i]]; }
  /// True when every root evaluates to 1 (short-circuits in root order).
  bool all_true(const std::uint64_t* atom_values, std::uint64_t* scratch) const;

  Valuation valuation(const std::vector<std::uint64_t>& atom_values) const;

 private:
  struct Node {
    Op op;
    unsigned width;
    unsigned child_width;
    std::uint32_t a = 0, b = 0, c = 0;
    std::uint64_t value = 0;  // constant value or atom index
  };
  std::vector<Node> nodes_;
  std::vector<std::uint32_t> roots_;
  std::vector<std::uint32_t> byte_atoms_;  // Read nodes index a run of byte atoms here
  std::vector<Atom> atoms_;
  std::vector<unsigned> shifts_;
  unsigned total_bits_ = 0;
  // Per root: the last node index it depends on, so all_true can stop early.
  std::vector<std::uint32_t> root_end_;
};

}  // namespace symdiff::sym
