// One line per acceptance criterion. Exit status is the number of failures.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "ged_oracle.hpp"
#include "gen.hpp"
#include "interp.hpp"
#include "no_network.hpp"
#include "oracle_eval.hpp"
#include "pairs.hpp"
#include "soundness.hpp"
#include "symdiff/mir/text.hpp"
#include "symdiff/pipeline/chunk.hpp"
#include "symdiff/pipeline/compiler.hpp"
#include "symdiff/pipeline/llm.hpp"
#include "symdiff/pipeline/source.hpp"
#include "symdiff/pipeline/transpile.hpp"
#include "symdiff/s3/ged.hpp"
#include "symdiff/symexec/executor.hpp"
#include "symdiff/symgraph/kquery.hpp"
#include "symdiff/symgraph/normalize.hpp"

using namespace symdiff;

namespace {

// Pinned limits.
constexpr double kScanOptionSeconds = 5.0;
constexpr double kCsvSeconds = 5.0;
constexpr double kU8nextSeconds = 10.0;
constexpr double kEquivSeconds = 60.0;
constexpr double kSuiteSeconds = 300.0;
constexpr std::size_t kEquivPairs = 20;
constexpr std::size_t kSelfFunctions = 200;
constexpr std::size_t kSoundFunctions = 200;
constexpr unsigned kSoundBits = 16;
constexpr std::size_t kNormExprs = 1000;
constexpr std::size_t kGedPairs = 500;
constexpr std::size_t kGedNodes = 5;
constexpr std::size_t kGeneratedSummaries = 500;

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void report(int id, const char* name, const std::function<Outcome()>& body, double limit = 0) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (limit > 0 && s >= limit) {
    o.pass = false;
    o.detail += "; over the time limit";
  }
  failures += !o.pass;
  std::printf("[%s] %2d %-28s %7.2fs%s  %s\n", o.pass ? "PASS" : "FAIL", id, name, s,
              limit > 0 ? (" (<" + std::to_string(static_cast<int>(limit)) + "s)").c_str() : "", o.detail.c_str());
  std::fflush(stdout);
}

const s3::OutputScore* find_output(const s3::S3Report& r, const std::string& name) {
  for (const auto& o : r.outputs)
    if (o.output == name) return &o;
  return nullptr;
}

bool has_line(const std::vector<std::string>& lines, const std::string& needle) {
  return std::any_of(lines.begin(), lines.end(), [&](const std::string& l) { return l.find(needle) != std::string::npos; });
}

Outcome scan_option() {
  const auto r = oracle::score_fixture("bugs", "scan_option", "scan_option").report;
  const auto* ret = find_output(r, "ret");
  if (!ret) return {false, "no ret output"};
  const bool offsets = has_line(ret->diagnostics, "minimum return offset: c arg0+3, rust arg0+2");
  // The merged graphs are too large for exact search, so the merged score is
  // a bracket. Pairing paths keeps every graph small enough to be exact.
  const auto c = mir::parse_ir(oracle::read_text(oracle::fixture("bugs/scan_option.c.mir")));
  const auto rs = mir::parse_ir(oracle::read_text(oracle::fixture("bugs/scan_option.rs.mir")));
  s3::ScoreOptions per_path;
  per_path.per_path = true;
  const auto pp = oracle::score_pair(c, rs, "scan_option", {}, per_path).report;
  const auto* pret = find_output(pp, "ret");
  if (!pret) return {false, "no ret output in per-path mode"};
  std::ostringstream d;
  d << "offsets " << (offsets ? "c +3 / rust +2" : "missing") << ", merged " << (ret->approximate ? "<=" : "")
    << ret->distance << " (>=" << ret->lower_bound << "), per-path " << (pret->approximate ? "<=" : "exact ")
    << pret->distance;
  return {offsets && ret->lower_bound >= 1 && !pret->approximate && pret->distance >= 1, d.str()};
}

Outcome csv_set_blk_size() {
  const auto r = oracle::score_fixture("bugs", "csv_set_blk_size", "csv_set_blk_size").report;
  const auto* o = find_output(r, "arg0.blk_size");
  if (!o) return {false, "no arg0.blk_size output"};
  const bool guard = has_line(o->diagnostics, "constraint only in rust: arg0.blk_size != 0");
  std::ostringstream d;
  d << "guard " << (guard ? "arg0.blk_size != 0 found" : "missing") << ", distance " << o->distance << " (>= "
    << o->lower_bound << ")";
  return {guard && o->lower_bound >= 1, d.str()};
}

Outcome u8next() {
  const auto r = oracle::score_fixture("bugs", "u8next_", "u8next_").report;
  const auto* ch = find_output(r, "arg1");
  if (!ch) return {false, "no ch output"};
  const bool binds = has_line(ch->diagnostics, "c binds zext32(arg0[0]), rust binds zext32(arg0[0]) & 31");
  // concrete confirmation on bytes C2 41
  const auto c = mir::parse_ir(oracle::read_text(oracle::fixture("bugs/u8next_.c.mir")));
  const auto rs = mir::parse_ir(oracle::read_text(oracle::fixture("bugs/u8next_.rs.mir")));
  const std::vector<std::uint8_t> txt{0xC2, 0x41, 0, 0};
  const auto oc = oracle::interpret(c.functions[0], c.types, {oracle::Arg::buffer(txt), oracle::Arg::buffer({0, 0, 0, 0})});
  const auto orr = oracle::interpret(rs.functions[0], rs.types, {oracle::Arg::buffer(txt), oracle::Arg::buffer({0, 0, 0, 0})});
  const unsigned cv = oc.buffers.at(1)[0], rv = orr.buffers.at(1)[0];
  char d[160];
  std::snprintf(d, sizeof d, "ch divergent=%s (>= %llu), concrete ch c=0x%02X rust=0x%02X", ch->equivalent ? "no" : "yes",
                static_cast<unsigned long long>(ch->lower_bound), cv, rv);
  return {binds && !ch->equivalent && ch->lower_bound >= 1 && cv == 0xC2 && rv == 0x02, d};
}

Outcome equivalence_suite() {
  const std::vector<std::pair<std::string, std::vector<std::string>>> suite = {
      {"arith", {"add3", "mul_add", "sub_u8", "widen_sum", "abs_diff", "is_neg"}},
      {"index", {"get_at", "sum3", "arr_get", "count_zero3"}},
      {"option", {"deref_or", "set_if", "point_y", "load_plain", "swap_xy"}},
      {"buffers", {"fill3", "copy2", "upcase1", "put_pair", "put_through", "sbuf_mark"}},
      {"misc", {"clamp", "max_u8", "hash_len"}},
  };
  std::size_t pairs = 0, outputs = 0;
  std::string bad;
  for (const auto& [stem, names] : suite)
    for (const auto& n : names) {
      const auto r = oracle::score_fixture("equiv", stem, n).report;
      ++pairs;
      for (const auto& o : r.outputs) {
        ++outputs;
        if (o.distance != 0 || o.approximate) bad += " " + n + ":" + o.output;
      }
      if (r.outputs_total == 0) bad += " " + n + ":no-outputs";
    }
  return {bad.empty() && pairs >= kEquivPairs,
          std::to_string(pairs) + " pairs, " + std::to_string(outputs) + " outputs at distance 0" +
              (bad.empty() ? "" : "; nonzero:" + bad)};
}

Outcome self_comparison() {
  std::size_t outputs = 0, nonzero = 0;
  for (std::size_t i = 0; i < kSelfFunctions; ++i) {
    oracle::GenOptions o;
    o.dialect = i % 2 ? mir::Dialect::Rust : mir::Dialect::C;
    o.pointers = (i / 2) % 2;
    const auto p = mir::parse_ir(oracle::generate_function(70000 + i, o));
    const auto r = oracle::score_pair(p, p, "g").report;
    for (const auto& out : r.outputs) {
      ++outputs;
      nonzero += out.distance != 0;
    }
  }
  return {nonzero == 0, std::to_string(kSelfFunctions) + " functions, " + std::to_string(outputs) + " outputs, " +
                            std::to_string(nonzero) + " nonzero"};
}

Outcome soundness() {
  std::uint64_t valuations = 0;
  std::size_t paths = 0;
  for (std::size_t i = 0; i < kSoundFunctions; ++i) {
    oracle::GenOptions o;
    o.dialect = i % 2 ? mir::Dialect::Rust : mir::Dialect::C;
    o.max_input_bits = kSoundBits;
    const auto text = oracle::generate_function(90000 + i, o);
    const auto r = oracle::check_soundness(text);
    valuations += r.valuations;
    paths += r.paths;
    if (!r.ok) return {false, "function " + std::to_string(i) + ": " + r.failure};
  }
  return {true, std::to_string(kSoundFunctions) + " functions, " + std::to_string(paths) + " paths, " +
                    std::to_string(valuations) + " valuations, 100% agreement"};
}

Outcome normalization() {
  std::size_t changed = 0;
  for (std::size_t i = 0; i < kNormExprs; ++i) {
    oracle::ExprGen g(i);
    const auto e = g.make(g.width(), 4);
    const auto n = symgraph::normalize(e);
    changed += !sym::equal(e, n);
    oracle::Tape te(e, {"x", "y"}), tn(n, {"x", "y"});
    std::uint64_t v[2];
    for (unsigned x = 0; x < 256; ++x)
      for (unsigned y = 0; y < 256; ++y) {
        v[0] = x;
        v[1] = y;
        if (te.run(v) != tn.run(v))
          return {false, "value differs for expression " + std::to_string(i) + ": " + symgraph::print_expr(e)};
      }
    if (!sym::equal(symgraph::normalize(n), n)) return {false, "not idempotent on expression " + std::to_string(i)};
  }
  return {true, std::to_string(kNormExprs) + " expressions x 65536 valuations equal, idempotent; " +
                    std::to_string(changed) + " rewritten"};
}

Outcome ged_oracle() {
  const auto gs = oracle::small_graphs(4242, 40, kGedNodes);
  std::size_t pairs = 0;
  for (std::size_t i = 0; i < gs.size(); ++i)
    for (std::size_t j = i; j < gs.size(); ++j) {
      const auto r = s3::ged(gs[i], gs[j]);
      const auto back = s3::ged(gs[j], gs[i]);
      const auto bf = oracle::brute_force_ged(gs[i], gs[j]);
      if (r.approximate || r.distance != bf) return {false, "pair " + std::to_string(i) + "," + std::to_string(j)};
      if (back.distance != r.distance) return {false, "asymmetric pair"};
      if (i == j && r.distance != 0) return {false, "ged(a,a) != 0"};
      ++pairs;
    }
  return {pairs >= kGedPairs, std::to_string(pairs) + " pairs of <= " + std::to_string(kGedNodes) +
                                  " nodes equal to brute force; identity and symmetry hold"};
}

Outcome pipeline_contracts() {
  using namespace pipeline;
  const unsigned net_before = oracle::network_attempts();
  // retry bounds
  std::size_t patterns = 0;
  const auto u = ingest_c("int f(int a) { return a; }");
  for (const auto& [cr, ur] : std::vector<std::pair<int, int>>{{0, 0}, {1, 2}, {3, 3}}) {
    Limits lim;
    lim.compile_retries = cr;
    lim.unsafe_retries = ur;
    const std::size_t len = static_cast<std::size_t>(cr + ur + 2);
    std::size_t count = 1;
    for (std::size_t i = 0; i < len; ++i) count *= 3;
    for (std::size_t code = 0; code < count; ++code) {
      std::vector<std::string> responses;
      for (std::size_t i = 0, c = code; i < len; ++i, c /= 3)
        responses.push_back(std::string("```rust\nfn f(a: i32) -> i32 { ") +
                            (c % 3 == 0 ? "BROKEN" : c % 3 == 1 ? "unsafe { g() }" : "a") + " }\n```");
      MockClient m;
      m.script_task("function.f", responses);
      ScriptedAdapter cc;
      cc.set_judge([](const std::string& s) { return CompileResult{s.find("BROKEN") == std::string::npos, 0, ""}; });
      const auto job = transpile_with_feedback(u, "f", m, &cc, {}, lim);
      std::size_t cf = 0, us = 0;
      for (const auto& a : job.attempts) {
        cf += a.compile && !a.compile->ok;
        us += a.compile && a.compile->ok && !a.unsafe.empty();
      }
      if (job.attempts.size() > static_cast<std::size_t>(cr + ur + 1) || cf > static_cast<std::size_t>(cr + 1) ||
          us > static_cast<std::size_t>(ur + 1))
        return {false, "retry bound exceeded"};
      ++patterns;
    }
  }
  // struct cache byte identity
  const auto csv = ingest_c(oracle::read_text(oracle::fixture("pipeline/csv.c")));
  FileMockClient fm(oracle::fixture("pipeline/mock"));
  ScriptedAdapter ok;
  StructCache cache;
  const auto res = run_pipeline(csv, fm, &ok, cache, {}, 1);
  const auto entry = cache.get("csv_parser");
  std::size_t sharing = 0;
  for (const auto& job : res.jobs)
    if (job.embedded_records.count("csv_parser")) {
      if (!entry || job.embedded_records.at("csv_parser") != entry->content_hash ||
          job.attempts.at(0).prompts.at(0).find(entry->text) == std::string::npos)
        return {false, "cached struct text differs in " + job.function};
      ++sharing;
    }
  if (sharing < 2) return {false, "fewer than two functions share csv_parser"};
  // chunk reassembly
  std::string fn = "int big(int x) {\n";
  for (int i = 0; i < 200; ++i) fn += "  x = x + " + std::to_string(i) + ";\n";
  fn += "  return x;\n}\n";
  for (std::size_t budget : {60, 150, 400, 1000}) {
    std::vector<std::string> texts;
    for (const auto& c : chunk_function(fn, budget)) texts.push_back(c.text);
    if (reassemble(texts) != fn) return {false, "reassembly differs at budget " + std::to_string(budget)};
  }
  const unsigned net = oracle::network_attempts() - net_before;
  return {net == 0, std::to_string(patterns) + " retry patterns bounded; " + std::to_string(sharing) +
                        " functions embed identical csv_parser; reassembly exact; " + std::to_string(net) +
                        " connection attempts"};
}

Outcome kquery_and_dot() {
  std::size_t fixture_paths = 0;
  for (const char* dir : {"equiv", "bugs"})
    for (const auto& e : std::filesystem::directory_iterator(oracle::fixture(dir))) {
      const auto p = mir::parse_ir(oracle::read_text(e.path().string()));
      for (const auto& f : p.functions) {
        const symgraph::KQueryDoc doc{f.name, symexec::execute(f, p.types, {}).paths};
        const auto text = symgraph::to_kquery(doc);
        const auto back = symgraph::parse_kquery_doc(text);
        if (back.paths.size() != doc.paths.size()) return {false, f.name + ": path count"};
        for (std::size_t i = 0; i < doc.paths.size(); ++i)
          if (!(back.paths[i] == doc.paths[i])) return {false, f.name + ": path " + std::to_string(i)};
        if (symgraph::to_kquery(back) != text) return {false, f.name + ": reprint differs"};
        for (std::size_t i = 0; i < doc.paths.size(); ++i)
          if (doc.paths[i].ret) {
            const auto a = symgraph::to_dot(symgraph::to_graph(*doc.paths[i].ret), f.name);
            const auto b = symgraph::to_dot(symgraph::to_graph(*back.paths[i].ret), f.name);
            if (a != b || a != symgraph::to_dot(symgraph::to_graph(*doc.paths[i].ret), f.name))
              return {false, f.name + ": dot differs"};
          }
        fixture_paths += doc.paths.size();
      }
    }
  for (std::size_t i = 0; i < kGeneratedSummaries; ++i) {
    oracle::ExprGen g(5000 + i);
    const auto s = g.summary();
    const auto text = symgraph::to_kquery(s);
    if (!(symgraph::parse_kquery(text) == s)) return {false, "generated summary " + std::to_string(i)};
  }
  return {true, std::to_string(fixture_paths) + " fixture paths and " + std::to_string(kGeneratedSummaries) +
                    " generated summaries round-trip; dot stable"};
}

}  // namespace

int main(int argc, char** argv) {
  const auto t0 = std::chrono::steady_clock::now();
  report(1, "scan_option regression", scan_option, kScanOptionSeconds);
  report(2, "csv_set_blk_size regression", csv_set_blk_size, kCsvSeconds);
  report(3, "u8next_ regression", u8next, kU8nextSeconds);
  report(4, "equivalence suite", equivalence_suite, kEquivSeconds);
  report(5, "self-comparison", self_comparison);
  report(6, "executor soundness", soundness);
  report(7, "normalization soundness", normalization);
  report(8, "ged oracle", ged_oracle);
  report(9, "pipeline contracts", pipeline_contracts);
  report(10, "kquery and dot", kquery_and_dot);
  // The unit suites are passed on the command line and timed together with
  // everything above.
  report(11, "whole suite time", [&] {
    std::size_t ran = 0;
    for (int i = 1; i < argc; ++i) {
      const std::string cmd = std::string(argv[i]) + " > /dev/null 2>&1";
      if (std::system(cmd.c_str()) != 0) return Outcome{false, std::string(argv[i]) + " failed"};
      ++ran;
    }
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return Outcome{s < kSuiteSeconds, std::to_string(ran) + " unit suites plus criteria 1-10 in " +
                                          std::to_string(static_cast<int>(s)) + " s (< 300 s)"};
  });
  return failures;
}
