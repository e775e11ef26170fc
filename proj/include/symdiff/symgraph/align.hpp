#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "symdiff/mir/ir.hpp"
#include "symdiff/symexec/summary.hpp"

namespace symdiff::symgraph {

enum class StepKind { UnwrapOptional, Deref, Field, Index, ProjectSliceData, ProjectVectorData };

struct AlignStep {
  StepKind kind = StepKind::Deref;
  std::string field;       // Field
  std::uint64_t index = 0; // Index

  std::string to_string() const;  // "deref", "field:buf", "index:2", ...
  static std::optional<AlignStep> parse(const std::string& s);
  friend bool operator==(const AlignStep&, const AlignStep&) = default;
};

/// One fat value reachable from the outputs. `output` is its leaf path in
/// output form (`arg0`, `arg0.buf`, `ret`); the last step is a projection.
struct AlignEntry {
  std::string output;
  std::vector<AlignStep> steps;
  friend bool operator==(const AlignEntry&, const AlignEntry&) = default;
};

/// How rust-side outputs map onto c-side outputs: a fat value `P` reports its
/// bytes as `P.data[k]` plus `P.len`/`P.cap`, while the c side reports `P[k]`.
struct AlignmentSpec {
  std::vector<AlignEntry> entries;

  std::string to_json() const;
  static AlignmentSpec from_json(const std::string& text);
  friend bool operator==(const AlignmentSpec&, const AlignmentSpec&) = default;
};

class AlignmentError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Walks the declared return type and out-parameter types.
AlignmentSpec derive_alignment(const mir::IrFunction& fn, const mir::TypeTable& types, unsigned depth_limit = 10);

/// Outputs of one path keyed by aligned name, with the return value under
/// "ret". Outputs a projection does not fit are reported in `failures`
/// (raw path -> message) and kept under their raw name.
std::map<std::string, sym::ExprRef> align_outputs(const symexec::PathSummary& s, const AlignmentSpec& spec,
                                                  std::map<std::string, std::string>* failures = nullptr);

}  // namespace symdiff::symgraph
