#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "no_network.hpp"
#include "pairs.hpp"
#include "symdiff/cli/cli.hpp"
#include "symdiff/mir/text.hpp"
#include "symdiff/symgraph/align.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run cli(std::vector<std::string> args) {
  args.insert(args.begin(), "symdiff");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = symdiff::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

fs::path tmp(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / ("symdiff-cli-" + name);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

std::string write(const fs::path& p, const std::string& text) {
  std::ofstream(p, std::ios::binary) << text;
  return p.string();
}

std::string fx(const std::string& rel) { return oracle::fixture(rel); }

}  // namespace

TEST_CASE("symtest on the equivalence fixtures exits 0") {
  for (const char* stem : {"arith", "index", "option", "buffers", "misc"}) {
    const fs::path out = tmp(std::string("equiv-") + stem);
    const auto r = cli({"symtest", fx(std::string("equiv/") + stem + ".c.mir"), fx(std::string("equiv/") + stem + ".rs.mir"),
                        "-o", out.string(), "-j", "1"});
    INFO(r.out, r.err);
    CHECK(r.code == 0);
    const auto summary = json::parse(oracle::read_text((out / "summary.json").string()));
    CHECK(summary["all_equivalent"] == true);
    CHECK(fs::exists(out / "manifest.json"));
  }
}

TEST_CASE("symtest on a bug pair exits 1 unless report-only") {
  const fs::path out = tmp("bug");
  const auto r = cli({"symtest", fx("bugs/u8next_.c.mir"), fx("bugs/u8next_.rs.mir"), "-o", out.string(), "--dot"});
  CHECK(r.code == 1);
  CHECK(r.out.find("divergent") != std::string::npos);
  CHECK(fs::exists(out / "dot" / "u8next_.arg1.c.dot"));
  CHECK(fs::exists(out / "summaries" / "u8next_.rust.kquery"));
  const auto manifest = json::parse(oracle::read_text((out / "manifest.json").string()));
  CHECK(manifest["exit_status"] == 1);
  CHECK(cli({"symtest", fx("bugs/u8next_.c.mir"), fx("bugs/u8next_.rs.mir"), "-o", out.string(), "--report-only"}).code ==
        0);
}

TEST_CASE("a function on one side only is reported missing") {
  const fs::path d = tmp("missing");
  const auto c = write(d / "a.c.mir", "fn c f(a: i32) -> i32 { e: ret a }\nfn c g(a: i32) -> i32 { e: ret a }\n");
  const auto r = write(d / "a.rs.mir", "fn rust f(a: i32) -> i32 { e: ret a }\n");
  const auto run = cli({"symtest", c, r, "-o", (d / "out").string()});
  CHECK(run.code == 1);
  const auto rep = json::parse(oracle::read_text((d / "out" / "reports" / "g.json").string()));
  CHECK(rep.dump().find("divergent-missing") != std::string::npos);
  CHECK(cli({"symtest", c, r, "-o", (d / "out2").string(), "--function", "f"}).code == 0);
  CHECK(cli({"symtest", c, r, "-o", (d / "out3").string(), "--function", "nope"}).code == 2);
}

TEST_CASE("score on kquery files") {
  const fs::path d = tmp("score");
  REQUIRE(cli({"symtest", fx("equiv/buffers.c.mir"), fx("equiv/buffers.rs.mir"), "-o", (d / "run").string()}).code == 0);
  const auto sums = d / "run" / "summaries";
  const auto c = (sums / "put_through.c.kquery").string();
  const auto r = (sums / "put_through.rust.kquery").string();
  CHECK(cli({"score", c, c, "-o", (d / "same").string()}).code == 0);

  // rust reports the vector's bytes under data; without the alignment they do not meet
  CHECK(cli({"score", c, r, "-o", (d / "raw").string()}).code == 1);
  const auto rp = symdiff::mir::parse_ir(oracle::read_text(fx("equiv/buffers.rs.mir")));
  const auto spec = symdiff::symgraph::derive_alignment(*rp.find("put_through"), rp.types);
  const auto align = write(d / "align.json", spec.to_json());
  CHECK(cli({"score", c, r, "--align", align, "-o", (d / "aligned").string()}).code == 0);

  // one changed constant
  const auto a = write(d / "a.kquery", "(declare x w32)\n(query [] (outputs (ret (Add w32 x 3))))\n");
  const auto b = write(d / "b.kquery", "(declare x w32)\n(query [] (outputs (ret (Add w32 x 2))))\n");
  const auto run = cli({"score", a, b, "-o", (d / "const").string()});
  INFO(run.out, run.err);
  CHECK(run.code == 1);
  const auto summary = json::parse(oracle::read_text((d / "const" / "summary.json").string()));
  CHECK(summary["functions"][0]["distance"] == 1);

  // malformed input names the position
  const auto bad = write(d / "bad.kquery", "(query [] (ret (Add w32 x");
  const auto err = cli({"score", bad, bad, "-o", (d / "bad").string()});
  CHECK(err.code == 2);
  CHECK(err.err.find("bad.kquery:") != std::string::npos);
}

TEST_CASE("config files use the same option names") {
  const fs::path d = tmp("config");
  const auto good = write(d / "good.toml", "[symtest]\nloop-unroll = 2\npath-cap = 64\n");
  const auto run = cli({"--config", good, "symtest", fx("equiv/index.c.mir"), fx("equiv/index.rs.mir"), "-o",
                        (d / "out").string()});
  CHECK(run.code == 0);
  const auto manifest = oracle::read_text((d / "out" / "manifest.json").string());
  CHECK(manifest.find("\"loop_unroll\": 2") != std::string::npos);
  const auto bad = write(d / "bad.toml", "[symtest]\nloop-unrol = 2\n");
  const auto r = cli({"--config", bad, "symtest", fx("equiv/index.c.mir"), fx("equiv/index.rs.mir"), "-o",
                      (d / "out2").string()});
  CHECK(r.code == 2);
  CHECK(cli({"symtest", fx("equiv/index.c.mir"), fx("equiv/index.rs.mir"), "--loop-unroll", "-3"}).code == 2);
  CHECK(cli({"symtest", fx("equiv/index.c.mir")}).code == 2);
  CHECK(cli({"frobnicate"}).code == 2);
}

TEST_CASE("run directories are reproducible and the report command replays them") {
  const fs::path a = tmp("det-a"), b = tmp("det-b");
  for (const auto& out : {a, b})
    cli({"symtest", fx("bugs/scan_option.c.mir"), fx("bugs/scan_option.rs.mir"), "-o", out.string(), "--dot"});
  for (const char* f : {"summary.json", "report.txt", "reports/scan_option.json", "reports/scan_option.txt",
                        "summaries/scan_option.c.kquery", "dot/scan_option.ret.c.dot"})
    CHECK(oracle::read_text((a / f).string()) == oracle::read_text((b / f).string()));
  const auto r1 = cli({"report", a.string()});
  const auto r2 = cli({"report", a.string()});
  CHECK(r1.code == 0);
  CHECK(r1.out == r2.out);
  CHECK(r1.out.find("minimum return offset") != std::string::npos);
  CHECK(cli({"report", tmp("empty").string()}).code == 2);
}

TEST_CASE("transpile with the scripted mock and a stand-in compiler") {
  const fs::path d = tmp("transpile");
  const auto r = cli({"transpile", fx("pipeline/csv.c"), "--mock-dir", fx("pipeline/mock"), "--compiler", "true {file}",
                      "-o", d.string(), "-j", "1"});
  INFO(r.out, r.err);
  CHECK(r.code == 0);
  const auto s = json::parse(oracle::read_text((d / "transpile" / "summary.json").string()));
  CHECK(s["functions"] == 3);
  CHECK(s["compiled"] == 3);
  CHECK(s["compiled_unsafe"] == 0);
  CHECK(s["dry_run"] == false);
  CHECK(fs::exists(d / "transpile" / "csv" / "csv_grow.rs"));
  const auto t = json::parse(oracle::read_text((d / "transpile" / "csv" / "csv_grow.transcript.json").string()));
  CHECK(t["attempts"].size() == 2);
  CHECK(fs::exists(d / "struct-cache" / "manifest.json"));

  // a failing compiler exhausts the compile retries
  const fs::path e = tmp("transpile-fail");
  cli({"transpile", fx("pipeline/csv.c"), "--mock-dir", fx("pipeline/mock"), "--compiler", "false {file}",
       "--compile-retries", "1", "-o", e.string()});
  const auto f = json::parse(oracle::read_text((e / "transpile" / "summary.json").string()));
  CHECK(f["failed"] == 3);
}

TEST_CASE("transpile without a compiler is a dry run") {
  const fs::path d = tmp("dry");
  const auto r = cli({"transpile", fx("pipeline/csv.c"), "--mock-dir", fx("pipeline/mock"), "-o", d.string()});
  CHECK(r.code == 0);
  CHECK(r.out.find("dry run") != std::string::npos);
  const auto s = json::parse(oracle::read_text((d / "transpile" / "summary.json").string()));
  CHECK(s["unchecked"] == 3);
  CHECK(s["compiled"] == 0);
}

TEST_CASE("empty C input transpiles nothing") {
  const fs::path d = tmp("empty-input");
  const auto c = write(d / "empty.c", "/* nothing here */\n");
  const auto r = cli({"transpile", c, "--mock-dir", fx("pipeline/mock"), "-o", (d / "out").string()});
  CHECK(r.code == 0);
  const auto s = json::parse(oracle::read_text((d / "out" / "transpile" / "summary.json").string()));
  CHECK(s["functions"] == 0);
  CHECK(cli({"transpile", (d / "missing.c").string(), "--mock-dir", fx("pipeline/mock"), "-o", (d / "o2").string()})
            .code == 2);
}

TEST_CASE("the http client sends nothing when connections are refused") {
  // connect() is replaced in this binary, so the attempt is counted, not made.
  const unsigned before = oracle::network_attempts();
  const fs::path out = tmp("http");
  const auto r = cli({"transpile", fx("pipeline/csv.c"), "--llm", "http", "--endpoint", "http://127.0.0.1:9/v1/chat",
                      "--model", "m", "--llm-retries", "0", "-o", out.string()});
  CHECK(r.code == 0);
  CHECK(oracle::network_attempts() > before);
  const auto s = json::parse(oracle::read_text((out / "transpile" / "summary.json").string()));
  CHECK(s["failed"] == 3);
}
