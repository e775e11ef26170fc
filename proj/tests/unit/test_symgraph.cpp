#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>

#include "gen.hpp"
#include "oracle_eval.hpp"
#include "pairs.hpp"
#include "symdiff/mir/text.hpp"
#include "symdiff/symexec/executor.hpp"
#include "symdiff/symgraph/graph.hpp"
#include "symdiff/symgraph/kquery.hpp"
#include "symdiff/symgraph/normalize.hpp"

using namespace symdiff;
using namespace symdiff::symgraph;
using sym::Op;

namespace {

std::vector<KQueryDoc> fixture_docs() {
  std::vector<KQueryDoc> docs;
  for (const char* dir : {"equiv", "bugs"})
    for (const auto& e : std::filesystem::directory_iterator(oracle::fixture(dir))) {
      const auto p = mir::parse_ir(oracle::read_text(e.path().string()));
      for (const auto& f : p.functions) docs.push_back({f.name, symexec::execute(f, p.types, {}).paths});
    }
  return docs;
}

// Exhaustive over two 8-bit symbols.
bool same_everywhere(const sym::ExprRef& a, const sym::ExprRef& b) {
  oracle::Tape ta(a, {"x", "y"}), tb(b, {"x", "y"});
  std::uint64_t v[2];
  for (unsigned x = 0; x < 256; ++x)
    for (unsigned y = 0; y < 256; ++y) {
      v[0] = x;
      v[1] = y;
      if (ta.run(v) != tb.run(v)) return false;
    }
  return true;
}

}  // namespace

TEST_CASE("kquery round-trips every fixture summary") {
  std::size_t paths = 0;
  for (const auto& doc : fixture_docs()) {
    const std::string text = to_kquery(doc);
    const KQueryDoc back = parse_kquery_doc(text);
    CHECK(back.function == doc.function);
    REQUIRE(back.paths.size() == doc.paths.size());
    for (std::size_t i = 0; i < doc.paths.size(); ++i) CHECK(back.paths[i] == doc.paths[i]);
    CHECK(to_kquery(back) == text);
    paths += doc.paths.size();
  }
  CHECK(paths > 50);
}

TEST_CASE("kquery round-trips generated summaries") {
  for (std::uint64_t s = 0; s < 200; ++s) {
    oracle::ExprGen g(s);
    const auto sum = g.summary();
    const std::string text = to_kquery(sum);
    INFO(text);
    const auto back = parse_kquery(text);
    CHECK(back == sum);
    CHECK(to_kquery(back) == text);
  }
}

TEST_CASE("kquery errors carry a position") {
  try {
    parse_kquery("(query [(Eq w8 x\n  ] false)");
    FAIL("no error");
  } catch (const KQueryError& e) {
    CHECK(e.line() >= 1);
    CHECK(e.column() >= 1);
  }
  CHECK_THROWS_AS(parse_expr("(Add w8 (w8 1))"), KQueryError);
  CHECK_THROWS_AS(parse_expr("(Frob w8 (w8 1) (w8 2))"), KQueryError);
}

TEST_CASE("expressions print in canonical form and parse back") {
  const auto x = sym::symbol("x", 8);
  const auto e = sym::binary(Op::Add, sym::unary(Op::ZExt, 8, sym::symbol("b", 1)), x);
  const auto text = print_expr(e);
  CHECK(text.find("Add w8") != std::string::npos);
  CHECK(sym::equal(parse_expr(text, "(declare x w8)\n(declare b w1)"), e));
}

TEST_CASE("graphs share structurally equal subexpressions") {
  const auto x = sym::symbol("x", 8);
  const auto a = sym::binary(Op::Add, sym::symbol("x", 8), sym::symbol("x", 8));
  const SymGraph g = to_graph(a);
  CHECK(g.nodes.size() == 2);
  CHECK(g.edges.size() == 2);
  const SymGraph h = to_graph(std::vector<sym::ExprRef>{a, sym::binary(Op::Mul, x, sym::constant(3, 8))});
  CHECK(h.nodes.size() == 4);
  CHECK(h.roots.size() == 2);
}

TEST_CASE("dot output is byte-stable") {
  for (const auto& doc : fixture_docs())
    for (const auto& p : doc.paths) {
      if (!p.ret) continue;
      const std::string one = to_dot(to_graph(*p.ret), doc.function);
      // rebuilt from text: different pointers, same content
      const auto again = parse_kquery(to_kquery(p));
      CHECK(to_dot(to_graph(*again.ret), doc.function) == one);
      CHECK(to_dot(to_graph(*p.ret), doc.function) == one);
    }
  oracle::ExprGen g(7);
  const auto e = g.make(16, 5);
  CHECK(to_dot(to_graph(e)) == to_dot(to_graph(e)));
}

TEST_CASE("normalization preserves values and is idempotent") {
  for (std::uint64_t s = 0; s < 200; ++s) {
    oracle::ExprGen g(s);
    const auto e = g.make(g.width(), 4);
    const auto n = normalize(e);
    INFO(print_expr(e), "\n  =>  ", print_expr(n));
    CHECK(same_everywhere(e, n));
    CHECK(sym::equal(normalize(n), n));
  }
}

TEST_CASE("each rule alone preserves values") {
  for (int rule = 0; rule < 5; ++rule)
    for (std::uint64_t s = 500; s < 540; ++s) {
      NormalizeOptions o = NormalizeOptions::none();
      bool* flags[] = {&o.collapse_casts, &o.narrow, &o.fold, &o.order_operands, &o.drop_safety};
      *flags[rule] = true;
      oracle::ExprGen g(s);
      const auto e = g.make(g.width(), 4);
      const auto n = normalize(e, o);
      INFO("rule ", rule, ": ", print_expr(e));
      CHECK(same_everywhere(e, n));
    }
}

TEST_CASE("language artifacts normalize away") {
  const auto x = sym::symbol("x", 8), y = sym::symbol("y", 8);
  // c promotes to int and truncates back
  const auto c = sym::unary(Op::Trunc, 8, sym::binary(Op::Add, sym::unary(Op::ZExt, 32, x), sym::unary(Op::ZExt, 32, y)));
  const auto r = sym::binary(Op::Add, x, y);
  CHECK(sym::equal(normalize(c), normalize(r)));
  // operand order
  CHECK(sym::equal(normalize(sym::binary(Op::Add, y, x)), normalize(r)));
  // safety assumptions
  CHECK(normalize(sym::safe(sym::binary(Op::Ult, x, y)))->is_const(1));
  NormalizeOptions keep;
  keep.drop_safety = false;
  CHECK(normalize(sym::safe(sym::binary(Op::Ult, x, y)), keep)->op() == Op::Safe);
  // folding
  CHECK(normalize(sym::binary(Op::Mul, sym::constant(3, 8), sym::constant(5, 8)))->is_const(15));
}
