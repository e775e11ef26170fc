#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "symdiff/pipeline/chunk.hpp"
#include "symdiff/pipeline/compiler.hpp"
#include "symdiff/pipeline/llm.hpp"
#include "symdiff/pipeline/source.hpp"
#include "symdiff/pipeline/struct_cache.hpp"

namespace symdiff::pipeline {

/// Bumped whenever a prompt template changes; part of the struct cache key.
inline constexpr int kPromptVersion = 1;

struct Limits {
  int compile_retries = 3;
  int unsafe_retries = 3;
  int llm_retries = 2;  // per request, for transport errors
  std::vector<std::string> deny = {"libc::"};
};

enum class JobStatus { CompiledSafe, CompiledUnsafe, Failed, Unchecked };
const char* to_string(JobStatus s);

struct Attempt {
  std::vector<std::string> prompts;  // one per chunk
  std::vector<std::string> responses;
  std::string candidate;
  std::optional<CompileResult> compile;
  std::vector<UnsafeFinding> unsafe;
  std::string error;
};

struct TranspileJob {
  std::string function;
  std::vector<ContextFragment> context;
  std::vector<Attempt> attempts;
  JobStatus status = JobStatus::Failed;
  std::optional<std::string> final_text;
  std::map<std::string, std::string> embedded_records;  // record -> content hash of the text in the prompt
  std::vector<std::string> flags;                       // "untranslated-record:S", "external:f", ...
};

// Prompt construction. The wording is a reconstruction.
std::string struct_prompt(const SourceUnit& u, const std::string& record);
std::string render_context(const std::vector<ContextFragment>& ctx, const StructCache& cache,
                           std::map<std::string, std::string>* embedded = nullptr);
std::string function_prompt(const std::string& name, const std::string& context, const std::string& c_text,
                            const std::string& feedback, std::size_t chunk = 0, std::size_t chunks = 0);
/// Text between the first pair of ``` fences if there is one, else the trimmed response.
std::string extract_code(const std::string& response);

/// Translates every record not already cached under the same prompt. Records
/// whose request keeps failing are stored untranslated with their C text.
void pretranslate_structs(const SourceUnit& u, LlmClient& client, StructCache& cache, const Limits& limits,
                          std::vector<std::string>* warnings = nullptr);

/// `compiler` may be null: candidates are then recorded unchecked.
TranspileJob transpile_with_feedback(const SourceUnit& u, const std::string& fn, LlmClient& client,
                                     CompilerAdapter* compiler, const StructCache& cache, const Limits& limits);

struct PipelineSummary {
  std::size_t functions = 0, compiled = 0, compiled_safe = 0, compiled_unsafe = 0, failed = 0, unchecked = 0;
  bool dry_run = false;
  double unsafe_percent() const { return compiled ? 100.0 * compiled_unsafe / compiled : 0.0; }
};

struct PipelineResult {
  std::vector<TranspileJob> jobs;  // in source order
  PipelineSummary summary;
  std::vector<std::string> warnings;
};

PipelineResult run_pipeline(const SourceUnit& u, LlmClient& client, CompilerAdapter* compiler, StructCache& cache,
                            const Limits& limits, int workers = 0);

}  // namespace symdiff::pipeline
