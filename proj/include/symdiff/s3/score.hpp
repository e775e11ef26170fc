#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "symdiff/s3/ged.hpp"
#include "symdiff/symexec/summary.hpp"
#include "symdiff/symgraph/align.hpp"
#include "symdiff/symgraph/normalize.hpp"

namespace symdiff::s3 {

/// One output folded over the returning paths of a function.
struct MergedOutput {
  std::optional<sym::ExprRef> value;  // empty when no returning path exists
  std::size_t paths = 0;
};

/// Normalized guard (conjunction of normalized constraints) of one path.
sym::ExprRef path_guard(const symexec::PathSummary& p, const symgraph::NormalizeOptions& opts = {});

/// Returning, defined paths sorted by guard hash and folded into a
/// right-nested ite over the given output. Paths that leave the output
/// untouched contribute the placeholder symbol `<output>@entry`.
MergedOutput merge_paths(const std::vector<symexec::PathSummary>& paths, const std::string& output,
                         const symgraph::AlignmentSpec& spec = {}, const symgraph::NormalizeOptions& opts = {});

/// Infix rendering with input regions named by field, e.g. `arg0.blk_size != 0`.
std::string pretty(const sym::ExprRef& e, const std::map<std::string, symexec::RegionShape>& shapes = {});

struct ScoreOptions {
  symgraph::NormalizeOptions normalize;
  GedOptions ged;
  bool per_path = false;  // greedy per-path pairing instead of one merged graph per output
};

struct OutputScore {
  std::string output;
  std::string c_graph;     // root node name, empty when absent
  std::string rust_graph;
  std::uint64_t distance = 0;
  std::uint64_t lower_bound = 0;
  bool approximate = false;
  bool equivalent = false;
  std::string reason;  // missing-output, empty-output, alignment-failure, or empty
  std::vector<std::string> diagnostics;
  symgraph::SymGraph c, rust;
};

struct SafetyCounts {
  std::size_t returns = 0, panics = 0, undefined = 0, exhausted = 0, ub = 0;
};

struct S3Report {
  std::string function;
  std::vector<OutputScore> outputs;
  std::size_t outputs_total = 0;
  std::size_t outputs_equivalent = 0;
  SafetyCounts c_safety, rust_safety;
  bool c_incomplete = false, rust_incomplete = false;
  std::vector<std::string> diagnostics;  // function-level

  std::uint64_t total_distance() const;
  bool equivalent() const { return outputs_equivalent == outputs_total; }
};

S3Report score_function(const symexec::ExecResult& c, const symexec::ExecResult& rust,
                        const symgraph::AlignmentSpec& spec, const ScoreOptions& opts = {});

inline constexpr int kReportVersion = 1;
std::string to_json(const S3Report& r);
std::string to_table(const S3Report& r);

}  // namespace symdiff::s3
