#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>

#include "gen.hpp"
#include "pairs.hpp"
#include "symdiff/mir/text.hpp"
#include "symdiff/symexec/executor.hpp"

using namespace symdiff;

namespace {

const s3::OutputScore& output(const s3::S3Report& r, const std::string& name) {
  for (const auto& o : r.outputs)
    if (o.output == name) return o;
  FAIL("no output " << name << " in\n" << s3::to_table(r));
  throw 0;
}

bool has_line(const std::vector<std::string>& lines, const std::string& needle) {
  return std::any_of(lines.begin(), lines.end(), [&](const std::string& l) { return l.find(needle) != std::string::npos; });
}

const std::vector<std::pair<std::string, std::vector<std::string>>> kEquiv = {
    {"arith", {"add3", "mul_add", "sub_u8", "widen_sum", "abs_diff", "is_neg"}},
    {"index", {"get_at", "sum3", "arr_get", "count_zero3"}},
    {"option", {"deref_or", "set_if", "point_y", "load_plain", "swap_xy"}},
    {"buffers", {"fill3", "copy2", "upcase1", "put_pair", "put_through", "sbuf_mark"}},
    {"misc", {"clamp", "max_u8", "hash_len"}},
};

}  // namespace

TEST_CASE("scan_option: the return offsets differ by one") {
  const auto r = oracle::score_fixture("bugs", "scan_option", "scan_option").report;
  const auto& ret = output(r, "ret");
  CHECK_FALSE(ret.equivalent);
  CHECK(ret.lower_bound >= 1);
  CHECK(ret.distance >= ret.lower_bound);
  CHECK(has_line(ret.diagnostics, "minimum return offset: c arg0+3, rust arg0+2"));
}

TEST_CASE("csv_set_blk_size: rust guards on the old field value") {
  const auto r = oracle::score_fixture("bugs", "csv_set_blk_size", "csv_set_blk_size").report;
  const auto& o = output(r, "arg0.blk_size");
  CHECK_FALSE(o.equivalent);
  CHECK(o.lower_bound >= 1);
  CHECK(has_line(o.diagnostics, "constraint only in rust: arg0.blk_size != 0"));
}

TEST_CASE("u8next_: ch binds the first byte in c and the masked byte in rust") {
  const auto r = oracle::score_fixture("bugs", "u8next_", "u8next_").report;
  CHECK(output(r, "ret").equivalent);
  const auto& ch = output(r, "arg1");
  CHECK_FALSE(ch.equivalent);
  CHECK(ch.lower_bound >= 1);
  CHECK(has_line(ch.diagnostics, "c binds zext32(arg0[0]), rust binds zext32(arg0[0]) & 31"));
}

TEST_CASE("hand-written equivalent pairs score zero on every output") {
  std::size_t pairs = 0;
  for (const auto& [stem, names] : kEquiv)
    for (const auto& name : names) {
      const auto r = oracle::score_fixture("equiv", stem, name).report;
      INFO(s3::to_table(r));
      CHECK(r.outputs_total > 0);
      for (const auto& o : r.outputs) {
        CHECK(o.distance == 0);
        CHECK_FALSE(o.approximate);
        CHECK(o.equivalent);
      }
      ++pairs;
    }
  CHECK(pairs >= 20);
}

TEST_CASE("every function scores zero against itself") {
  for (int d = 0; d < 2; ++d)
    for (std::uint64_t s = 0; s < 30; ++s) {
      oracle::GenOptions o;
      o.dialect = d ? mir::Dialect::Rust : mir::Dialect::C;
      o.pointers = s % 2;
      const auto text = oracle::generate_function(s, o);
      const auto p = mir::parse_ir(text);
      const auto r = oracle::score_pair(p, p, "g");
      INFO(text);
      for (const auto& out : r.report.outputs) CHECK(out.distance == 0);
      CHECK(r.report.equivalent());
    }
}

TEST_CASE("a changed constant is a divergence") {
  const auto c = mir::parse_ir("fn c f(a: i32) -> i32 { e: x = add a, 3\n ret x }");
  const auto r = mir::parse_ir("fn rust f(a: i32) -> i32 { e: x = add a, 2\n ret x }");
  const auto rep = oracle::score_pair(c, r, "f").report;
  CHECK(output(rep, "ret").distance == 1);
  CHECK_FALSE(rep.equivalent());
}

TEST_CASE("a checked operation matches the wrapping one on returning paths") {
  const auto c = mir::parse_ir("fn c f(a: i32, b: i32) -> i32 { e: x = add a, b\n ret x }");
  const auto r = mir::parse_ir("fn rust f(a: i32, b: i32) -> i32 { e: x = checked-add s a, b\n ret x }");
  const auto res = oracle::score_pair(c, r, "f");
  CHECK(res.report.equivalent());
  CHECK(res.report.rust_safety.panics == 1);
}

TEST_CASE("merging folds paths into a nested ite with an entry placeholder") {
  const auto p = mir::parse_ir(R"(fn c f(out o: ptr<i32>, a: i32) -> unit {
e:
  z = icmp eq a, 0
  br z, skip, set
set:
  store a, o
  ret
skip:
  ret
})");
  const auto res = symexec::execute(p.functions[0], p.types, {});
  const auto m = s3::merge_paths(res.paths, "arg0");
  REQUIRE(m.value);
  CHECK(m.paths == 2);
  CHECK((*m.value)->op() == sym::Op::Ite);
  CHECK(s3::pretty(*m.value).find("arg0@entry") != std::string::npos);
}

TEST_CASE("reports are deterministic") {
  const auto a = oracle::score_fixture("bugs", "u8next_", "u8next_").report;
  const auto b = oracle::score_fixture("bugs", "u8next_", "u8next_").report;
  CHECK(s3::to_json(a) == s3::to_json(b));
  CHECK(s3::to_table(a) == s3::to_table(b));
}

TEST_CASE("per-path pairing agrees on an equivalent pair") {
  s3::ScoreOptions o;
  o.per_path = true;
  const auto c = mir::parse_ir(oracle::read_text(oracle::fixture("equiv/misc.c.mir")));
  const auto r = mir::parse_ir(oracle::read_text(oracle::fixture("equiv/misc.rs.mir")));
  CHECK(oracle::score_pair(c, r, "clamp", {}, o).report.equivalent());
}

TEST_CASE("without normalization the c promotions show up") {
  s3::ScoreOptions o;
  o.normalize = symgraph::NormalizeOptions::none();
  const auto c = mir::parse_ir(oracle::read_text(oracle::fixture("equiv/arith.c.mir")));
  const auto r = mir::parse_ir(oracle::read_text(oracle::fixture("equiv/arith.rs.mir")));
  CHECK_FALSE(oracle::score_pair(c, r, "widen_sum", {}, o).report.equivalent());
  CHECK(oracle::score_pair(c, r, "widen_sum").report.equivalent());
}
