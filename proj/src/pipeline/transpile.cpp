#include "symdiff/pipeline/transpile.hpp"

#include <omp.h>

#include <exception>
#include <sstream>

namespace symdiff::pipeline {

const char* to_string(JobStatus s) {
  switch (s) {
    case JobStatus::CompiledSafe: return "compiled-safe";
    case JobStatus::CompiledUnsafe: return "compiled-unsafe";
    case JobStatus::Failed: return "failed";
    case JobStatus::Unchecked: return "unchecked";
  }
  return "?";
}

// Prompt wording below is reconstructed; only the information each prompt
// carries is fixed.

std::string struct_prompt(const SourceUnit& u, const std::string& record) {
  std::ostringstream p;
  p << "// task: struct " << record << "\n// prompt v" << kPromptVersion << "\n"
    << "Translate this C struct into a Rust struct definition. Reply with the Rust definition only.\n"
    << "Do not use raw pointers; choose owned, idiomatic field types.\n\nC definition:\n";
  auto it = u.records.find(record);
  if (it != u.records.end()) p << it->second << "\n";
  const auto uses = analyze_field_usage(u, record);
  bool any = false;
  for (const auto& [field, list] : uses) any = any || !list.empty();
  if (any) {
    p << "\nThe byte-sequence fields are used as shown below. Decide from these uses whether each holds a\n"
      << "string or a byte array and pick the Rust container accordingly.\n";
    for (const auto& [field, list] : uses) {
      if (list.empty()) continue;
      p << "field " << field << ":\n";
      for (const auto& use : list) p << "  in " << use.function << ": " << use.snippet << "\n";
    }
  }
  return p.str();
}

std::string render_context(const std::vector<ContextFragment>& ctx, const StructCache& cache,
                           std::map<std::string, std::string>* embedded) {
  std::ostringstream p;
  for (const auto& f : ctx) {
    switch (f.kind) {
      case FragmentKind::Record: {
        auto e = cache.get(f.name);
        if (e && e->translated) {
          p << "Use this pre-generated definition for struct " << f.name << ":\n" << e->text
            << (e->text.empty() || e->text.back() != '\n' ? "\n\n" : "\n");
          if (embedded) (*embedded)[f.name] = e->content_hash;
        } else {
          p << "C definition of struct " << f.name << " (no pre-generated Rust definition):\n" << f.text << "\n\n";
        }
        break;
      }
      case FragmentKind::Macro: p << "C macro " << f.name << ":\n" << f.text << "\n\n"; break;
      case FragmentKind::Typedef: p << "C type " << f.name << ":\n" << f.text << "\n\n"; break;
      case FragmentKind::Declaration: p << "Callee " << f.name << ":\n" << f.text << "\n\n"; break;
    }
  }
  return p.str();
}

std::string function_prompt(const std::string& name, const std::string& context, const std::string& c_text,
                            const std::string& feedback, std::size_t chunk, std::size_t chunks) {
  std::ostringstream p;
  if (chunks > 1) p << "// task: chunk " << name << " " << chunk << "/" << chunks << "\n";
  else p << "// task: function " << name << "\n";
  p << "// prompt v" << kPromptVersion << "\n"
    << "Translate the following C function into safe Rust. Do not use unsafe blocks or the libc crate.\n"
    << "Reply with the Rust code only.\n";
  if (chunks > 1)
    p << "This is part " << chunk << " of " << chunks << " of one function. Translate only this part; the parts\n"
      << "are joined in order afterwards.\n";
  if (!context.empty()) p << "\nContext:\n" << context;
  p << "\nC function:\n" << c_text << "\n";
  if (!feedback.empty()) p << "\n" << feedback << "\n";
  return p.str();
}

std::string extract_code(const std::string& response) {
  const auto a = response.find("```");
  if (a != std::string::npos) {
    const auto line_end = response.find('\n', a);
    if (line_end != std::string::npos) {
      const auto b = response.find("```", line_end + 1);
      if (b != std::string::npos) return response.substr(line_end + 1, b - line_end - 1);
    }
  }
  std::size_t s = 0, e = response.size();
  while (s < e && std::isspace(static_cast<unsigned char>(response[s]))) ++s;
  while (e > s && std::isspace(static_cast<unsigned char>(response[e - 1]))) --e;
  return response.substr(s, e - s) + (e > s ? "\n" : "");
}

namespace {

std::string ask(LlmClient& client, const std::string& prompt, int retries) {
  std::string last;
  for (int i = 0; i <= retries; ++i) {
    try {
      return client.complete(prompt);
    } catch (const LlmError& e) {
      last = e.what();
    }
  }
  throw LlmError(last);
}

std::string clip(const std::string& s, std::size_t n) { return s.size() <= n ? s : s.substr(0, n) + "\n[...]\n"; }

}  // namespace

void pretranslate_structs(const SourceUnit& u, LlmClient& client, StructCache& cache, const Limits& limits,
                          std::vector<std::string>* warnings) {
  for (const auto& [name, text] : u.records) {
    const std::string prompt = struct_prompt(u, name);
    const std::string key = hash_hex(prompt_hash(prompt));
    if (auto e = cache.get(name); e && e->source_hash == key && e->translated) continue;
    try {
      const std::string code = extract_code(ask(client, prompt, limits.llm_retries));
      if (code.empty()) throw LlmError("empty response");
      cache.put(name, code, key, true);
    } catch (const LlmError& e) {
      if (warnings) warnings->push_back("struct " + name + " left untranslated: " + e.what());
      cache.put(name, text, key, false);
    }
  }
}

TranspileJob transpile_with_feedback(const SourceUnit& u, const std::string& fn, LlmClient& client,
                                     CompilerAdapter* compiler, const StructCache& cache, const Limits& limits) {
  TranspileJob job;
  job.function = fn;
  const CFunction* f = u.find(fn);
  if (!f) {
    job.flags.push_back("unknown-function");
    return job;
  }
  for (const auto& x : f->external) job.flags.push_back("external:" + x);
  job.context = build_context(u, fn);
  const std::string context = render_context(job.context, cache, &job.embedded_records);
  for (const auto& c : job.context)
    if (c.kind == FragmentKind::Record && !job.embedded_records.count(c.name))
      job.flags.push_back("untranslated-record:" + c.name);

  int compile_left = limits.compile_retries, unsafe_left = limits.unsafe_retries;
  std::string feedback;
  for (;;) {
    Attempt a;
    try {
      const std::size_t overhead = estimate_tokens(function_prompt(fn, context, "", feedback, 1, 2));
      const auto chunks = chunk_function(f->text, client.context_budget(), overhead);
      for (std::size_t i = 0; i < chunks.size(); ++i) {
        a.prompts.push_back(function_prompt(fn, context, chunks[i].text, feedback, i + 1, chunks.size()));
        a.responses.push_back(ask(client, a.prompts.back(), limits.llm_retries));
      }
      std::vector<std::string> code;
      // Unfenced chunk responses are joined verbatim.
      for (const auto& r : a.responses)
        code.push_back(chunks.size() > 1 && r.find("```") == std::string::npos ? r : extract_code(r));
      a.candidate = reassemble(code);
    } catch (const std::exception& e) {
      a.error = e.what();
      job.attempts.push_back(std::move(a));
      job.status = JobStatus::Failed;
      return job;
    }
    a.unsafe = scan_unsafe(a.candidate, limits.deny);
    if (!compiler) {
      job.final_text = a.candidate;
      job.attempts.push_back(std::move(a));
      job.status = JobStatus::Unchecked;
      return job;
    }
    a.compile = compiler->compile(a.candidate, fn);
    const std::string candidate = a.candidate;
    const CompileResult cr = *a.compile;
    const auto findings = a.unsafe;
    job.attempts.push_back(std::move(a));
    if (!cr.ok) {
      if (compile_left-- > 0) {
        feedback = "The previous translation did not compile. Compiler output:\n" + clip(cr.diagnostics, 4000) +
                   "\nPrevious translation:\n" + candidate + "\nReply with a corrected translation.";
        continue;
      }
      job.status = JobStatus::Failed;
      return job;
    }
    if (!findings.empty()) {
      if (unsafe_left-- > 0) {
        std::ostringstream fb;
        fb << "The previous translation compiled but is not safe Rust:\n";
        for (const auto& x : findings) fb << "  line " << x.line << ": " << x.what << "\n";
        fb << "Previous translation:\n" << candidate << "\nReply with a translation that avoids these.";
        feedback = fb.str();
        continue;
      }
      job.final_text = candidate;
      job.status = JobStatus::CompiledUnsafe;
      return job;
    }
    job.final_text = candidate;
    job.status = JobStatus::CompiledSafe;
    return job;
  }
}

PipelineResult run_pipeline(const SourceUnit& u, LlmClient& client, CompilerAdapter* compiler, StructCache& cache,
                            const Limits& limits, int workers) {
  PipelineResult r;
  r.warnings = u.warnings;
  pretranslate_structs(u, client, cache, limits, &r.warnings);
  // From here on the cache is only read.
  const int n = static_cast<int>(u.functions.size());
  r.jobs.resize(n);
  std::vector<std::string> errors(n);
  const int threads = workers > 0 ? workers : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic) num_threads(threads)
  for (int i = 0; i < n; ++i) {
    try {
      r.jobs[i] = transpile_with_feedback(u, u.functions[i].name, client, compiler, cache, limits);
    } catch (const std::exception& e) {
      r.jobs[i].function = u.functions[i].name;
      r.jobs[i].status = JobStatus::Failed;
      errors[i] = e.what();
    }
  }
  for (int i = 0; i < n; ++i)
    if (!errors[i].empty()) r.warnings.push_back(u.functions[i].name + ": " + errors[i]);
  auto& s = r.summary;
  s.dry_run = compiler == nullptr;
  s.functions = r.jobs.size();
  for (const auto& j : r.jobs) {
    switch (j.status) {
      case JobStatus::CompiledSafe: ++s.compiled_safe; break;
      case JobStatus::CompiledUnsafe: ++s.compiled_unsafe; break;
      case JobStatus::Failed: ++s.failed; break;
      case JobStatus::Unchecked: ++s.unchecked; break;
    }
  }
  s.compiled = s.compiled_safe + s.compiled_unsafe;
  return r;
}

}  // namespace symdiff::pipeline
