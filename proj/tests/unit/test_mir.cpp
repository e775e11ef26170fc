#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>

#include "gen.hpp"
#include "pairs.hpp"
#include "symdiff/mir/layout.hpp"
#include "symdiff/mir/text.hpp"

using namespace symdiff::mir;

namespace {

IrError::Kind error_kind(const std::string& text) {
  try {
    parse_ir(text);
  } catch (const IrError& e) {
    return e.kind();
  }
  FAIL("expected an IrError for:\n" << text);
  return IrError::Kind::Syntax;
}

}  // namespace

TEST_CASE("fixtures print and reparse to the same program") {
  int files = 0;
  for (const char* dir : {"equiv", "bugs"})
    for (const auto& e : std::filesystem::directory_iterator(oracle::fixture(dir))) {
      const Program p = parse_ir(oracle::read_text(e.path().string()));
      const std::string text = print_ir(p);
      CHECK(parse_ir(text) == p);
      CHECK(print_ir(parse_ir(text)) == text);
      ++files;
    }
  CHECK(files >= 16);
}

TEST_CASE("generated functions round-trip") {
  for (int d = 0; d < 2; ++d)
    for (int ptr = 0; ptr < 2; ++ptr)
      for (std::uint64_t s = 0; s < 50; ++s) {
        oracle::GenOptions o;
        o.dialect = d ? Dialect::Rust : Dialect::C;
        o.pointers = ptr;
        const Program p = parse_ir(oracle::generate_function(s, o));
        CHECK(parse_ir(print_ir(p)) == p);
      }
}

TEST_CASE("header, types and comments") {
  const Program p = parse_ir(R"(
# leading comment
type pair = { a: i8, b: [2 x i16], next: ptr<pair> }
fn rust f(out o: ptr<pair>, s: vec, n: opt<ptr<i32>>) -> i64 {
entry:   # trailing comment
  l = slice-len s
  ret l
}
)");
  REQUIRE(p.functions.size() == 1);
  const auto& f = p.functions[0];
  CHECK(f.dialect == Dialect::Rust);
  CHECK(f.params[0].out);
  CHECK(f.params[1].type.kind() == TypeKind::ByteVec);
  CHECK(f.params[2].type.kind() == TypeKind::Optional);
  CHECK(f.ret == IrType::integer(64));
  CHECK(size_of(IrType::record("pair"), p.types) == 1 + 4 + kAddressBytes);
  const auto leaves = layout_of(IrType::record("pair"), p.types);
  REQUIRE(leaves.size() == 4);
  CHECK(leaves[2].path == ".b[1]");
  CHECK(leaves[2].offset == 3);
}

TEST_CASE("rust-only instructions are rejected in c functions") {
  CHECK(error_kind("fn c f(a: i32, b: i32) -> i32 { e: r = checked-add s a, b\n ret r }") == IrError::Kind::Dialect);
  CHECK(error_kind("fn c f(o: opt<ptr<i8>>) -> unit { e: p = option-unwrap o\n ret }") == IrError::Kind::Dialect);
  CHECK(error_kind("fn c f(s: ptr<i8>) -> unit { e: p = bounds-checked-index s, 0\n ret }") == IrError::Kind::Dialect);
  CHECK_NOTHROW(parse_ir("fn rust f(a: i32, b: i32) -> i32 { e: r = checked-add s a, b\n ret r }"));
}

TEST_CASE("structural and type errors") {
  CHECK(error_kind("fn c f(a: i32) -> i32 { e: ret b }") == IrError::Kind::UndefinedValue);
  CHECK(error_kind("fn c f(a: i32) -> i32 { e: r = add a, a\n r = add a, a\n ret r }") == IrError::Kind::Structure);
  CHECK(error_kind("fn c f(a: i32) -> i32 { e: jmp nowhere }") == IrError::Kind::Structure);
  CHECK(error_kind("fn c f(a: i32, b: i8) -> i32 { e: r = add a, b\n ret r }") == IrError::Kind::Type);
  CHECK(error_kind("fn c f(a: i32) -> i32 { e: r = frob a\n ret r }") == IrError::Kind::Syntax);
  CHECK(error_kind("fn c f(a: i32) -> i32 { e: ret a }\nfn c f(a: i32) -> i32 { e: ret a }") ==
        IrError::Kind::Structure);
}

TEST_CASE("a value used where its definition does not dominate") {
  const char* text = R"(fn c f(a: i1) -> i32 {
e:
  br a, l, r
l:
  x = const i32 1
  jmp j
r:
  jmp j
j:
  ret x
})";
  CHECK(error_kind(text) == IrError::Kind::UndefinedValue);
}

TEST_CASE("error locations point at the offending line") {
  try {
    parse_ir("fn c f(a: i32) -> i32 {\ne:\n  r = add a, a\n  q = ???\n  ret r\n}");
    FAIL("no error");
  } catch (const IrError& e) {
    CHECK(e.loc().line == 4);
  }
}
