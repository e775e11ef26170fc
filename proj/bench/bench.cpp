// Serial vs parallel timings for the two hot loops: exhaustive feasibility
// enumeration and batch scoring of many function pairs.
//
//   bench [--threads N] [--reps R]

#include <omp.h>

#include <CLI11.hpp>
#include <chrono>
#include <cstdio>
#include <string>
#include <vector>

#include "symdiff/mir/text.hpp"
#include "symdiff/s3/score.hpp"
#include "symdiff/symexec/executor.hpp"
#include "symdiff/symexec/feasibility.hpp"
#include "symdiff/symgraph/align.hpp"

using namespace symdiff;
using sym::ExprRef;
using sym::Op;

namespace {

template <class F>
double best_of(int reps, F&& f) {
  double best = 1e300;
  for (int i = 0; i < reps; ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    f();
    best = std::min(best, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  }
  return best;
}

// x*y == k over two w-bit inputs with k chosen unreachable, so the whole
// space is searched.
std::vector<ExprRef> hard_constraints(unsigned w) {
  const auto x = sym::symbol("x", w), y = sym::symbol("y", w);
  const auto prod = sym::binary(Op::Mul, sym::binary(Op::Or, x, sym::constant(1, w)), sym::binary(Op::Or, y, sym::constant(1, w)));
  return {sym::binary(Op::Eq, sym::binary(Op::And, prod, sym::constant(1, w)), sym::constant(0, w))};
}

// A chain of blocks that each add a constant and branch on the running value:
// 2^n paths, each scored.
std::string branchy(mir::Dialect d, int n, int k) {
  std::string s = std::string("fn ") + (d == mir::Dialect::C ? "c" : "rust") + " f(a: i16, b: i16) -> i16 {\n";
  s += "e:\n  acc = alloc i16\n  store a, acc\n  jmp b0\n";
  for (int i = 0; i < n; ++i) {
    const std::string b = "b" + std::to_string(i), nx = "b" + std::to_string(i + 1);
    s += b + ":\n  v" + std::to_string(i) + " = load i16, acc\n";
    s += "  t" + std::to_string(i) + " = icmp ult v" + std::to_string(i) + ", b\n";
    s += "  br t" + std::to_string(i) + ", " + b + "x, " + b + "y\n";
    s += b + "x:\n  u" + std::to_string(i) + " = add v" + std::to_string(i) + ", " + std::to_string(k + i) + "\n";
    s += "  store u" + std::to_string(i) + ", acc\n  jmp " + nx + "\n";
    s += b + "y:\n  jmp " + nx + "\n";
  }
  s += "b" + std::to_string(n) + ":\n  r = load i16, acc\n  ret r\n}\n";
  return s;
}

}  // namespace

int main(int argc, char** argv) {
  int threads = omp_get_num_procs();
  int reps = 3;
  CLI::App app{"kernel timings"};
  app.add_option("--threads", threads, "threads for the parallel runs")->capture_default_str();
  app.add_option("--reps", reps, "repetitions; the best time is reported")->capture_default_str();
  CLI11_PARSE(app, argc, argv);
  omp_set_num_threads(threads);

  std::printf("cores %d, parallel runs use %d threads, best of %d\n\n", omp_get_num_procs(), threads, reps);
  std::printf("feasibility enumeration (unsatisfiable, full space)\n");
  std::printf("%6s %12s %12s %8s\n", "bits", "serial s", "parallel s", "speedup");
  for (unsigned w : {8u, 10u, 11u, 12u}) {
    const auto cs = sym::CompiledSet::compile(hard_constraints(w), true);
    std::optional<std::uint64_t> a, b;
    const double ts = best_of(reps, [&] { a = sym::find_witness_serial(*cs); });
    const double tp = best_of(reps, [&] { b = sym::find_witness_parallel(*cs); });
    if (a != b) {
      std::fprintf(stderr, "kernels disagree at %u bits\n", 2 * w);
      return 1;
    }
    std::printf("%6u %12.4f %12.4f %7.2fx\n", 2 * w, ts, tp, ts / tp);
  }

  std::printf("\nbatch scoring (pairs scored per thread count)\n");
  std::vector<std::pair<mir::Program, mir::Program>> pairs;
  for (int i = 0; i < 48; ++i)
    pairs.emplace_back(mir::parse_ir(branchy(mir::Dialect::C, 8, i)), mir::parse_ir(branchy(mir::Dialect::Rust, 8, i + i % 2)));
  std::printf("%8s %8s %12s %8s\n", "threads", "pairs", "seconds", "speedup");
  double base = 0;
  for (int t : {1, threads}) {
    std::vector<std::uint64_t> dist(pairs.size());
    const double s = best_of(reps, [&] {
#pragma omp parallel for schedule(dynamic) num_threads(t)
      for (std::size_t i = 0; i < pairs.size(); ++i) {
        const auto& [c, r] = pairs[i];
        const auto ec = symexec::execute(c.functions[0], c.types, {});
        const auto er = symexec::execute(r.functions[0], r.types, {});
        const auto rep = s3::score_function(ec, er, symgraph::derive_alignment(r.functions[0], r.types));
        dist[i] = rep.outputs.empty() ? 0 : rep.outputs[0].distance;
      }
    });
    if (t == 1) base = s;
    std::printf("%8d %8zu %12.4f %7.2fx\n", t, pairs.size(), s, base / s);
    if (t == threads) break;
  }
  return 0;
}
