#include <CLI11.hpp>
#include <ostream>
#include <sstream>

#include "symdiff/cli/cli.hpp"

namespace symdiff::cli {

namespace {

void add_common(CLI::App* sub, RunConfig& cfg) {
  sub->add_option("inputs", cfg.inputs, "input files");
  sub->add_option("-o,--out", cfg.out_dir, "run directory")->capture_default_str();
  sub->add_option("-j,--workers", cfg.workers, "worker threads (0: all cores)")->capture_default_str();
  sub->add_option("--function", cfg.functions, "restrict to these functions");
}

void add_exec(CLI::App* sub, RunConfig& cfg) {
  auto& e = cfg.exec;
  sub->add_option("--depth-limit", e.depth_limit, "pointer levels that get a region")->capture_default_str();
  sub->add_option("--slice-length", e.slice_length, "bytes behind a str, vec or char pointer")->capture_default_str();
  sub->add_option("--loop-unroll", e.loop_unroll, "extra block visits per path")->capture_default_str();
  sub->add_option("--path-cap", e.path_cap, "path summaries per function")->capture_default_str();
  sub->add_option("--timeout", e.timeout_seconds, "seconds per function")->capture_default_str();
  sub->add_option("--feasibility-width", e.feasibility_width, "enumeration limit in input bits")->capture_default_str();
}

void add_score(CLI::App* sub, RunConfig& cfg) {
  auto& s = cfg.score;
  sub->add_option("--ged-exact-limit", s.ged.exact_limit, "largest graph searched exactly")->capture_default_str();
  sub->add_option("--ged-budget", s.ged.expansion_budget, "A* expansions before falling back to bounds")
      ->capture_default_str();
  sub->add_flag("--per-path", s.per_path, "pair paths instead of merging them");
  sub->add_flag("!--no-collapse-casts", s.normalize.collapse_casts, "keep redundant extension/truncation pairs");
  sub->add_flag("!--no-narrow", s.normalize.narrow, "keep arithmetic at its widened width");
  sub->add_flag("!--no-fold", s.normalize.fold, "skip constant folding");
  sub->add_flag("!--no-order-operands", s.normalize.order_operands, "keep commutative operand order");
  sub->add_flag("!--no-drop-safety", s.normalize.drop_safety, "keep safety assumptions in guards");
  sub->add_option("--align", cfg.align_file, "alignment spec JSON");
  sub->add_flag("--dot", cfg.dot, "write DOT graphs");
  sub->add_flag("--report-only", cfg.report_only, "exit 0 even when outputs diverge");
}

void add_pipeline(CLI::App* sub, RunConfig& cfg) {
  auto& l = cfg.limits;
  sub->add_option("--compile-retries", l.compile_retries, "re-requests after compile errors")->capture_default_str();
  sub->add_option("--unsafe-retries", l.unsafe_retries, "re-requests after unsafe findings")->capture_default_str();
  sub->add_option("--llm-retries", l.llm_retries, "repeats of a failed request")->capture_default_str();
  sub->add_option("--deny", l.deny, "callee paths counted as unsafe")->capture_default_str();
  sub->add_option("--llm", cfg.llm, "mock or http")->capture_default_str();
  sub->add_option("--mock-dir", cfg.mock_dir, "scripted responses for --llm mock");
  sub->add_option("--endpoint", cfg.endpoint, "http://host[:port]/path");
  sub->add_option("--model", cfg.model, "model name sent to the endpoint");
  sub->add_option("--token-env", cfg.token_env, "environment variable holding the API token")->capture_default_str();
  sub->add_option("--context-budget", cfg.context_budget, "context window in estimated tokens")->capture_default_str();
  sub->add_option("--compiler", cfg.compiler, "command with {file}; empty runs dry");
  sub->add_option("--cache-dir", cfg.cache_dir, "struct cache directory (default <out>/struct-cache)");
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  CLI::App app{"differential symbolic testing of c-dialect and rust-dialect functions", "symdiff"};
  app.set_config("--config", "", "TOML or INI file with the same options; unknown keys are errors");
  app.allow_config_extras(CLI::config_extras_mode::error);
  app.require_subcommand(1);

  auto* transpile = app.add_subcommand("transpile", "translate C functions through an LLM with compiler feedback");
  add_common(transpile, cfg);
  add_pipeline(transpile, cfg);

  auto* symtest = app.add_subcommand("symtest", "execute and score a c/rust mini-IR pair");
  add_common(symtest, cfg);
  add_exec(symtest, cfg);
  add_score(symtest, cfg);

  auto* score = app.add_subcommand("score", "score two KQuery files");
  add_common(score, cfg);
  add_score(score, cfg);

  auto* report = app.add_subcommand("report", "print the tables of a run directory");
  report->add_option("inputs", cfg.inputs, "run directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    std::ostringstream o, x;
    const int code = app.exit(e, o, x);
    out << o.str();
    err << x.str();
    return code == 0 ? 0 : 2;
  }
  for (auto* s : {transpile, symtest, score, report})
    if (s->parsed()) cfg.command = s->get_name();

  try {
    cfg.validate();
    if (cfg.command == "transpile") return cmd_transpile(cfg, out);
    if (cfg.command == "symtest") return cmd_symtest(cfg, out);
    if (cfg.command == "score") return cmd_score(cfg, out);
    return cmd_report(cfg, out);
  } catch (const std::exception& e) {
    err << "symdiff: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace symdiff::cli
