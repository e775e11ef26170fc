#include <omp.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <json.hpp>
#include <ostream>
#include <set>
#include <sstream>

#include "symdiff/cli/cli.hpp"
#include "symdiff/mir/text.hpp"
#include "symdiff/symexec/executor.hpp"
#include "symdiff/symgraph/kquery.hpp"

namespace symdiff::cli {

namespace fs = std::filesystem;
using nlohmann::json;

void RunConfig::validate() const {
  try {
    exec.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (workers < 0) throw ConfigError("workers must be >= 0");
  if (score.ged.exact_limit > 16) throw ConfigError("ged-exact-limit must be <= 16");
  if (score.ged.expansion_budget == 0) throw ConfigError("ged-budget must be positive");
  if (limits.compile_retries < 0 || limits.unsafe_retries < 0 || limits.llm_retries < 0)
    throw ConfigError("retry counts must be >= 0");
  if (context_budget == 0) throw ConfigError("context-budget must be positive");
  if (llm != "mock" && llm != "http") throw ConfigError("llm must be 'mock' or 'http'");
  if (out_dir.empty()) throw ConfigError("out must not be empty");
  if (!compiler.empty() && compiler.find("{file}") == std::string::npos)
    throw ConfigError("compiler command must contain {file}");
  const auto need = [&](std::size_t n, const char* what) {
    if (inputs.size() != n) throw ConfigError(command + " expects " + what);
  };
  if (command == "symtest") need(2, "a c-dialect and a rust-dialect mini-IR file");
  else if (command == "score") need(2, "a c-side and a rust-side KQuery file");
  else if (command == "report") need(1, "a run directory");
  else if (command == "transpile") {
    if (llm == "mock" && mock_dir.empty()) throw ConfigError("llm 'mock' needs --mock-dir");
    if (llm == "http" && (endpoint.empty() || model.empty())) throw ConfigError("llm 'http' needs --endpoint and --model");
  } else {
    throw ConfigError("unknown command '" + command + "'");
  }
}

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

class RunDir {
 public:
  explicit RunDir(fs::path root) : root_(std::move(root)) { fs::create_directories(root_); }

  void write(const std::string& rel, const std::string& content) {
    const fs::path p = root_ / rel;
    fs::create_directories(p.parent_path());
    std::ofstream(p, std::ios::binary) << content;
    files_.insert(rel);
  }

  const fs::path& root() const { return root_; }

  void manifest(const RunConfig& cfg, int status) {
    json config = {
        {"workers", cfg.workers},
        {"exec",
         {{"depth_limit", cfg.exec.depth_limit},
          {"slice_length", cfg.exec.slice_length},
          {"loop_unroll", cfg.exec.loop_unroll},
          {"path_cap", cfg.exec.path_cap},
          {"timeout_seconds", cfg.exec.timeout_seconds},
          {"feasibility_width", cfg.exec.feasibility_width}}},
        {"normalize",
         {{"collapse_casts", cfg.score.normalize.collapse_casts},
          {"narrow", cfg.score.normalize.narrow},
          {"fold", cfg.score.normalize.fold},
          {"order_operands", cfg.score.normalize.order_operands},
          {"drop_safety", cfg.score.normalize.drop_safety}}},
        {"ged", {{"exact_limit", cfg.score.ged.exact_limit}, {"expansion_budget", cfg.score.ged.expansion_budget}}},
        {"per_path", cfg.score.per_path},
    };
    if (cfg.command == "transpile")
      config["pipeline"] = {{"compile_retries", cfg.limits.compile_retries},
                            {"unsafe_retries", cfg.limits.unsafe_retries},
                            {"llm_retries", cfg.limits.llm_retries},
                            {"deny", cfg.limits.deny},
                            {"llm", cfg.llm},
                            {"context_budget", cfg.context_budget},
                            {"compiler", cfg.compiler},
                            {"prompt_version", pipeline::kPromptVersion}};
    json m = {{"tool", "symdiff"},
              {"report_version", s3::kReportVersion},
              {"command", cfg.command},
              {"inputs", cfg.inputs},
              {"config", config},
              {"files", std::vector<std::string>(files_.begin(), files_.end())},
              {"exit_status", status}};
    std::ofstream(root_ / "manifest.json", std::ios::binary) << m.dump(2) << "\n";
  }

 private:
  fs::path root_;
  std::set<std::string> files_;
};

std::string file_safe(const std::string& s) {
  std::string out;
  for (char c : s) out += (std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.') ? c : '_';
  return out;
}

int threads_for(const RunConfig& cfg) { return cfg.workers > 0 ? cfg.workers : omp_get_max_threads(); }

s3::S3Report missing_report(const std::string& name, const char* absent_side) {
  s3::S3Report r;
  r.function = name;
  s3::OutputScore o;
  o.output = "function";
  o.reason = "divergent-missing";
  o.distance = o.lower_bound = 1;
  o.diagnostics.push_back(std::string("no ") + absent_side + "-dialect counterpart for '" + name + "'");
  r.outputs.push_back(std::move(o));
  r.outputs_total = 1;
  return r;
}

s3::S3Report error_report(const std::string& name, const std::string& msg) {
  s3::S3Report r;
  r.function = name;
  s3::OutputScore o;
  o.output = "function";
  o.reason = "error";
  o.distance = o.lower_bound = 1;
  o.diagnostics.push_back(msg);
  r.outputs.push_back(std::move(o));
  r.outputs_total = 1;
  return r;
}

bool clean(const s3::S3Report& r) {
  if (r.c_incomplete || r.rust_incomplete || !r.equivalent()) return false;
  return std::all_of(r.outputs.begin(), r.outputs.end(), [](const s3::OutputScore& o) { return !o.approximate; });
}

std::string status_of(const s3::S3Report& r) {
  for (const auto& o : r.outputs)
    if (o.reason == "divergent-missing" || o.reason == "error") return o.reason;
  if (r.c_incomplete || r.rust_incomplete) return r.equivalent() ? "incomplete" : "divergent-incomplete";
  return r.equivalent() ? "equivalent" : "divergent";
}

// Writes per-function reports plus summary.json/report.txt; returns the exit status.
int emit_reports(RunDir& dir, const RunConfig& cfg, const std::vector<s3::S3Report>& reports, std::ostream& out) {
  json summary = {{"report_version", s3::kReportVersion}, {"functions", json::array()}};
  std::ostringstream table;
  table << std::left << std::setw(28) << "function" << std::setw(12) << "outputs" << std::setw(10) << "distance"
        << "status\n";
  bool all_clean = true;
  for (const auto& r : reports) {
    const std::string stem = "reports/" + file_safe(r.function);
    dir.write(stem + ".json", s3::to_json(r));
    dir.write(stem + ".txt", s3::to_table(r));
    if (cfg.dot)
      for (const auto& o : r.outputs) {
        const std::string base = "dot/" + file_safe(r.function) + "." + file_safe(o.output);
        if (!o.c.empty()) dir.write(base + ".c.dot", symgraph::to_dot(o.c, r.function + "_c"));
        if (!o.rust.empty()) dir.write(base + ".rust.dot", symgraph::to_dot(o.rust, r.function + "_rust"));
      }
    const bool ok = clean(r);
    all_clean = all_clean && ok;
    summary["functions"].push_back({{"function", r.function},
                                    {"outputs_total", r.outputs_total},
                                    {"outputs_equivalent", r.outputs_equivalent},
                                    {"distance", r.total_distance()},
                                    {"incomplete", {{"c", r.c_incomplete}, {"rust", r.rust_incomplete}}},
                                    {"status", status_of(r)}});
    table << std::left << std::setw(28) << r.function << std::setw(12)
          << (std::to_string(r.outputs_equivalent) + "/" + std::to_string(r.outputs_total)) << std::setw(10)
          << r.total_distance() << status_of(r) << "\n";
  }
  summary["all_equivalent"] = all_clean;
  dir.write("summary.json", summary.dump(2) + "\n");
  dir.write("report.txt", table.str());
  out << table.str();
  const int status = all_clean || cfg.report_only ? 0 : 1;
  dir.manifest(cfg, status);
  return status;
}

std::map<std::string, symgraph::AlignmentSpec> load_overrides(const std::string& path) {
  std::map<std::string, symgraph::AlignmentSpec> m;
  if (path.empty()) return m;
  json j;
  try {
    j = json::parse(read_file(path));
  } catch (const json::exception& e) {
    throw ConfigError(path + ": " + e.what());
  }
  if (!j.is_object()) throw ConfigError(path + ": expected an object of function name -> alignment spec");
  for (const auto& [name, spec] : j.items()) {
    try {
      m[name] = symgraph::AlignmentSpec::from_json(spec.dump());
    } catch (const symgraph::AlignmentError& e) {
      throw ConfigError(path + ": " + name + ": " + e.what());
    }
  }
  return m;
}

}  // namespace

int cmd_symtest(const RunConfig& cfg, std::ostream& out) {
  mir::Program cp, rp;
  try {
    cp = mir::parse_ir(read_file(cfg.inputs[0]));
  } catch (const mir::IrError& e) {
    throw ConfigError(cfg.inputs[0] + ": " + e.what());
  }
  try {
    rp = mir::parse_ir(read_file(cfg.inputs[1]));
  } catch (const mir::IrError& e) {
    throw ConfigError(cfg.inputs[1] + ": " + e.what());
  }
  for (const auto& f : cp.functions)
    if (f.dialect != mir::Dialect::C) throw ConfigError(cfg.inputs[0] + ": function '" + f.name + "' is not c-dialect");
  for (const auto& f : rp.functions)
    if (f.dialect != mir::Dialect::Rust)
      throw ConfigError(cfg.inputs[1] + ": function '" + f.name + "' is not rust-dialect");
  const auto overrides = load_overrides(cfg.align_file);

  std::set<std::string> names;
  for (const auto& f : cp.functions) names.insert(f.name);
  for (const auto& f : rp.functions) names.insert(f.name);
  if (!cfg.functions.empty()) {
    std::set<std::string> keep(cfg.functions.begin(), cfg.functions.end());
    for (const auto& k : keep)
      if (!names.count(k)) throw ConfigError("function '" + k + "' is in neither input");
    names = keep;
  }
  const std::vector<std::string> order(names.begin(), names.end());
  std::vector<s3::S3Report> reports(order.size());
  std::vector<std::optional<std::pair<symexec::ExecResult, symexec::ExecResult>>> results(order.size());
  const int n = static_cast<int>(order.size());
#pragma omp parallel for schedule(dynamic) num_threads(threads_for(cfg))
  for (int i = 0; i < n; ++i) {
    const std::string& name = order[i];
    const mir::IrFunction* cf = cp.find(name);
    const mir::IrFunction* rf = rp.find(name);
    if (!cf || !rf) {
      reports[i] = missing_report(name, cf ? "rust" : "c");
      continue;
    }
    try {
      auto ce = symexec::execute(*cf, cp.types, cfg.exec);
      auto re = symexec::execute(*rf, rp.types, cfg.exec);
      auto it = overrides.find(name);
      const auto spec = it != overrides.end() ? it->second : symgraph::derive_alignment(*rf, rp.types, cfg.exec.depth_limit);
      reports[i] = s3::score_function(ce, re, spec, cfg.score);
      results[i].emplace(std::move(ce), std::move(re));
    } catch (const std::exception& e) {
      reports[i] = error_report(name, e.what());
    }
  }
  RunDir dir(cfg.out_dir);
  for (std::size_t i = 0; i < order.size(); ++i) {
    if (!results[i]) continue;
    const auto& [ce, re] = *results[i];
    dir.write("summaries/" + file_safe(order[i]) + ".c.kquery", symgraph::to_kquery(symgraph::KQueryDoc{ce.function, ce.paths}));
    dir.write("summaries/" + file_safe(order[i]) + ".rust.kquery",
              symgraph::to_kquery(symgraph::KQueryDoc{re.function, re.paths}));
  }
  return emit_reports(dir, cfg, reports, out);
}

int cmd_score(const RunConfig& cfg, std::ostream& out) {
  symgraph::KQueryDoc docs[2];
  for (int side = 0; side < 2; ++side) {
    try {
      docs[side] = symgraph::parse_kquery_doc(read_file(cfg.inputs[side]));
    } catch (const symgraph::KQueryError& e) {
      throw ConfigError(cfg.inputs[side] + ":" + std::to_string(e.line()) + ":" + std::to_string(e.column()) + ": " +
                        e.what());
    }
  }
  symgraph::AlignmentSpec spec;
  if (!cfg.align_file.empty()) {
    try {
      spec = symgraph::AlignmentSpec::from_json(read_file(cfg.align_file));
    } catch (const symgraph::AlignmentError& e) {
      throw ConfigError(cfg.align_file + ": " + e.what());
    }
  }
  symexec::ExecResult c, r;
  c.function = docs[0].function;
  c.paths = docs[0].paths;
  c.dialect = mir::Dialect::C;
  r.function = docs[1].function;
  r.paths = docs[1].paths;
  r.dialect = mir::Dialect::Rust;
  auto report = s3::score_function(c, r, spec, cfg.score);
  if (report.function.empty()) report.function = "function";
  RunDir dir(cfg.out_dir);
  return emit_reports(dir, cfg, {report}, out);
}

int cmd_report(const RunConfig& cfg, std::ostream& out) {
  const fs::path root = cfg.inputs[0];
  if (!fs::is_regular_file(root / "summary.json")) throw ConfigError("'" + root.string() + "' is not a run directory");
  std::vector<fs::path> tables;
  if (fs::is_directory(root / "reports"))
    for (const auto& e : fs::directory_iterator(root / "reports"))
      if (e.path().extension() == ".txt") tables.push_back(e.path());
  std::sort(tables.begin(), tables.end());
  for (const auto& t : tables) out << read_file(t.string()) << "\n";
  out << read_file((root / "report.txt").string());
  return 0;
}

int cmd_transpile(const RunConfig& cfg, std::ostream& out) {
  std::unique_ptr<pipeline::LlmClient> client;
  try {
    if (cfg.llm == "mock") client = std::make_unique<pipeline::FileMockClient>(cfg.mock_dir, cfg.context_budget);
    else client = std::make_unique<pipeline::HttpClient>(cfg.endpoint, cfg.model, cfg.token_env, cfg.context_budget);
  } catch (const pipeline::LlmError& e) {
    throw ConfigError(e.what());
  }
  RunDir dir(cfg.out_dir);
  std::unique_ptr<pipeline::CompilerAdapter> compiler;
  if (!cfg.compiler.empty())
    compiler = std::make_unique<pipeline::CommandAdapter>(cfg.compiler, dir.root() / "transpile" / "work");
  const fs::path cache_dir = cfg.cache_dir.empty() ? dir.root() / "struct-cache" : fs::path(cfg.cache_dir);
  std::vector<std::string> warnings;
  auto cache = pipeline::StructCache::load(cache_dir, &warnings);

  pipeline::PipelineSummary total;
  total.dry_run = !compiler;
  json files = json::array();
  std::ostringstream table;
  for (const auto& input : cfg.inputs) {
    auto unit = pipeline::ingest_c(read_file(input));
    if (!cfg.functions.empty())
      std::erase_if(unit.functions, [&](const pipeline::CFunction& f) {
        return std::find(cfg.functions.begin(), cfg.functions.end(), f.name) == cfg.functions.end();
      });
    const auto result = pipeline::run_pipeline(unit, *client, compiler.get(), cache, cfg.limits, cfg.workers);
    const std::string stem = "transpile/" + file_safe(fs::path(input).stem().string());
    json jobs = json::array();
    for (const auto& job : result.jobs) {
      json attempts = json::array();
      for (const auto& a : job.attempts) {
        json ja = {{"prompts", a.prompts}, {"responses", a.responses}, {"candidate", a.candidate}};
        if (a.compile)
          ja["compile"] = {{"ok", a.compile->ok}, {"exit_code", a.compile->exit_code}, {"diagnostics", a.compile->diagnostics}};
        json unsafe = json::array();
        for (const auto& u : a.unsafe) unsafe.push_back({{"line", u.line}, {"what", u.what}});
        ja["unsafe"] = unsafe;
        if (!a.error.empty()) ja["error"] = a.error;
        attempts.push_back(ja);
      }
      json context = json::array();
      for (const auto& c : job.context) context.push_back({{"kind", pipeline::to_string(c.kind)}, {"name", c.name}});
      dir.write(stem + "/" + file_safe(job.function) + ".transcript.json",
                json({{"function", job.function},
                      {"status", pipeline::to_string(job.status)},
                      {"context", context},
                      {"embedded_records", job.embedded_records},
                      {"flags", job.flags},
                      {"attempts", attempts}})
                        .dump(2) +
                    "\n");
      if (job.final_text) dir.write(stem + "/" + file_safe(job.function) + ".rs", *job.final_text);
      jobs.push_back({{"function", job.function},
                      {"status", pipeline::to_string(job.status)},
                      {"attempts", job.attempts.size()}});
      table << std::left << std::setw(28) << job.function << std::setw(18) << pipeline::to_string(job.status)
            << job.attempts.size() << " attempt(s)\n";
    }
    const auto& s = result.summary;
    total.functions += s.functions;
    total.compiled += s.compiled;
    total.compiled_safe += s.compiled_safe;
    total.compiled_unsafe += s.compiled_unsafe;
    total.failed += s.failed;
    total.unchecked += s.unchecked;
    files.push_back({{"input", input}, {"jobs", jobs}, {"warnings", result.warnings}});
    warnings.insert(warnings.end(), result.warnings.begin(), result.warnings.end());
  }
  cache.save(cache_dir);
  json summary = {{"functions", total.functions},
                  {"compiled", total.compiled},
                  {"compiled_safe", total.compiled_safe},
                  {"compiled_unsafe", total.compiled_unsafe},
                  {"failed", total.failed},
                  {"unchecked", total.unchecked},
                  {"unsafe_percent", total.unsafe_percent()},
                  {"dry_run", total.dry_run},
                  {"struct_cache_entries", cache.size()},
                  {"files", files},
                  {"warnings", warnings}};
  dir.write("transpile/summary.json", summary.dump(2) + "\n");
  std::ostringstream head;
  head << "functions " << total.functions << ", compiled " << total.compiled << "/" << total.functions << ", unsafe "
       << std::fixed << std::setprecision(1) << total.unsafe_percent() << "%";
  if (total.dry_run) head << " (dry run: no compiler configured, candidates unchecked)";
  head << "\n";
  dir.write("transpile/summary.txt", head.str() + table.str());
  out << head.str() << table.str();
  for (const auto& w : warnings) out << "warning: " << w << "\n";
  dir.manifest(cfg, 0);
  return 0;
}

}  // namespace symdiff::cli
