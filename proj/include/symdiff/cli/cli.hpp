#pragma once

#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "symdiff/pipeline/transpile.hpp"
#include "symdiff/s3/score.hpp"
#include "symdiff/symexec/config.hpp"

namespace symdiff::cli {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::string command;              // transpile, symtest, score, report
  std::vector<std::string> inputs;  // per command: C files, c/rust mir pair, c/rust kquery pair, run dir
  std::string out_dir = "symdiff-run";
  int workers = 0;  // 0: all cores

  symexec::ExecConfig exec;
  s3::ScoreOptions score;
  std::string align_file;  // score: AlignmentSpec JSON; symtest: {"fn": spec, ...} overrides
  std::vector<std::string> functions;  // restrict to these names
  bool dot = false;
  bool report_only = false;

  pipeline::Limits limits;
  std::string llm = "mock";  // mock (directory) or http
  std::string mock_dir;
  std::string endpoint;
  std::string model;
  std::string token_env = "SYMDIFF_LLM_TOKEN";
  std::size_t context_budget = 16000;
  std::string compiler;  // command template with {file}; empty = dry run
  std::string cache_dir;  // default <out_dir>/struct-cache

  /// Throws ConfigError naming the first bad field.
  void validate() const;
};

/// Exit codes: 0 success, 1 divergence found (symtest), 2 usage or input error.
int cmd_transpile(const RunConfig& cfg, std::ostream& out);
int cmd_symtest(const RunConfig& cfg, std::ostream& out);
int cmd_score(const RunConfig& cfg, std::ostream& out);
int cmd_report(const RunConfig& cfg, std::ostream& out);

/// Parses argv (CLI11; `--config file.toml` supplies the same options, and
/// unknown keys are rejected) and dispatches.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace symdiff::cli
