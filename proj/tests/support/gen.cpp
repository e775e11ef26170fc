#include "gen.hpp"

#include <random>
#include <sstream>
#include <vector>

namespace oracle {

using symdiff::mir::Dialect;

namespace {

struct Gen {
  std::mt19937_64 rng;
  GenOptions o;
  std::ostringstream os;
  unsigned next_id = 0;
  unsigned w = 8;  // working width
  std::vector<std::string> vals;  // values of width w visible in the current block

  bool rust() const { return o.dialect == Dialect::Rust; }
  unsigned pick(unsigned n) { return static_cast<unsigned>(rng() % n); }
  bool coin(unsigned pct) { return pick(100) < pct; }
  std::string fresh(const char* p) { return p + std::to_string(next_id++); }
  std::string ity(unsigned bits) const { return "i" + std::to_string(bits); }
  std::string any() { return vals[pick(vals.size())]; }

  std::string literal() {
    static const std::int64_t small[] = {0, 1, 2, 3, -1, 7, 255, 16};
    return std::to_string(coin(70) ? small[pick(8)] : static_cast<std::int64_t>(pick(1u << (w > 12 ? 12 : w))));
  }

  std::string operand() { return coin(25) ? literal() : any(); }

  // One value-producing instruction, appended to vals.
  void instr() {
    const std::string r = fresh("v");
    const unsigned k = pick(rust() ? 12 : 10);
    std::string a = any(), b = operand();
    switch (k) {
      case 0: os << "  " << r << " = add " << a << ", " << b << "\n"; break;
      case 1: os << "  " << r << " = sub " << a << ", " << b << "\n"; break;
      case 2: os << "  " << r << " = mul " << a << ", " << b << "\n"; break;
      case 3: os << "  " << r << " = " << (coin(50) ? "and " : "or ") << a << ", " << b << "\n"; break;
      case 4: os << "  " << r << " = xor " << a << ", " << b << "\n"; break;
      case 5: {
        static const char* sh[] = {"shl", "lshr", "ashr"};
        os << "  " << r << " = " << sh[pick(3)] << " " << a << ", " << pick(w) << "\n";
        break;
      }
      case 6: {
        static const char* pr[] = {"eq", "ne", "ult", "ule", "ugt", "uge", "slt", "sle", "sgt", "sge"};
        const std::string c = fresh("c");
        os << "  " << c << " = icmp " << pr[pick(10)] << " " << a << ", " << b << "\n";
        os << "  " << r << " = " << (coin(50) ? "zext " : "sext ") << c << " to " << ity(w) << "\n";
        break;
      }
      case 7: {
        // round trip through a narrower width
        const unsigned n = w == 16 ? 8 : 1;
        const std::string t = fresh("t");
        os << "  " << t << " = trunc " << a << " to " << ity(n) << "\n";
        os << "  " << r << " = " << (coin(50) ? "zext " : "sext ") << t << " to " << ity(w) << "\n";
        break;
      }
      case 8:
      case 9:
        if (k == 9 && rust()) {
          os << "  " << r << " = sdiv " << a << ", " << b << "\n";
        } else {
          os << "  " << r << " = udiv " << a << ", " << b << "\n";
        }
        break;
      default: {
        static const char* ck[] = {"checked-add", "checked-sub", "checked-mul"};
        os << "  " << r << " = " << ck[pick(3)] << (coin(50) ? " s " : " u ") << a << ", " << b << "\n";
        break;
      }
    }
    vals.push_back(r);
  }

  std::string run(const std::string& name) {
    w = coin(50) ? 8 : 16;
    // scalar parameters
    std::vector<std::pair<std::string, unsigned>> params;
    unsigned budget = o.max_input_bits;
    static const unsigned widths[] = {1, 8, 8, 16};
    const unsigned n_params = 1 + pick(3);
    for (unsigned i = 0; i < n_params && budget > 0; ++i) {
      unsigned bw = widths[pick(4)];
      while (bw > budget) bw = bw == 1 ? 0 : bw / 2 < 8 ? 1 : bw / 2;
      if (bw == 0) break;
      budget -= bw;
      params.push_back({"a" + std::to_string(i), bw});
    }
    const bool ptrs = o.pointers;
    if (ptrs) os << "type rec = { x: " << ity(w) << ", y: i8, z: [3 x " << ity(w) << "] }\n\n";
    os << "fn " << (rust() ? "rust " : "c ") << name << "(";
    for (std::size_t i = 0; i < params.size(); ++i) os << (i ? ", " : "") << params[i].first << ": " << ity(params[i].second);
    if (ptrs) {
      os << ", p: ptr<rec>, out o: ptr<" << ity(w) << ">";
      os << (rust() ? ", s: str, q: opt<ptr<" : ", s: ptr<i8>, q: ptr<") << ity(w) << (rust() ? ">>" : ">");
    }
    os << ") -> " << ity(w) << " {\n";

    const unsigned n_blocks = 1 + pick(o.max_blocks);
    const unsigned n_slots = n_blocks > 1 ? 1 + pick(3) : 0;
    os << "entry:\n";
    for (auto& [p, bw] : params) {
      const std::string r = fresh("x");
      if (bw == w) {
        os << "  " << r << " = add " << p << ", 0\n";
      } else if (bw < w) {
        os << "  " << r << " = " << (coin(50) ? "zext " : "sext ") << p << " to " << ity(w) << "\n";
      } else {
        os << "  " << r << " = trunc " << p << " to " << ity(w) << "\n";
      }
      vals.push_back(r);
    }
    if (vals.empty()) {
      const std::string r = fresh("x");
      os << "  " << r << " = const " << ity(w) << " 5\n";
      vals.push_back(r);
    }
    const std::vector<std::string> params_w = vals;
    for (unsigned s = 0; s < n_slots; ++s) {
      os << "  s" << s << " = alloc " << ity(w) << "\n";
      os << "  store " << any() << ", s" << s << "\n";
    }
    if (ptrs) pointer_reads();

    for (unsigned b = 0; b < n_blocks; ++b) {
      if (b > 0) {
        os << "b" << b << ":\n";
        vals = params_w;
        for (unsigned s = 0; s < n_slots; ++s)
          if (coin(60)) {
            const std::string r = fresh("l");
            os << "  " << r << " = load " << ity(w) << ", s" << s << "\n";
            vals.push_back(r);
          }
      }
      const unsigned k = 1 + pick(o.max_instrs);
      for (unsigned i = 0; i < k; ++i) instr();
      for (unsigned s = 0; s < n_slots; ++s)
        if (coin(40)) os << "  store " << any() << ", s" << s << "\n";
      if (ptrs && coin(50)) os << "  store " << any() << ", o\n";

      const unsigned rest = n_blocks - b - 1;
      if (rest == 0) {
        os << "  ret " << any() << "\n";
        break;
      }
      const std::string next = "b" + std::to_string(b + 1);
      if (coin(30)) {
        os << "  jmp " << next << "\n";
      } else {
        const std::string c = fresh("c");
        static const char* pr[] = {"eq", "ne", "ult", "slt", "ugt", "sge"};
        os << "  " << c << " = icmp " << pr[pick(6)] << " " << any() << ", " << operand() << "\n";
        std::string other = "b" + std::to_string(b + 1 + pick(rest));
        if (rust() && coin(15)) {
          other = "bp";
          panic_block = true;
        }
        if (coin(50)) os << "  br " << c << ", " << next << ", " << other << "\n";
        else os << "  br " << c << ", " << other << ", " << next << "\n";
      }
    }
    if (panic_block) os << "bp:\n  panic explicit\n";
    os << "}\n";
    return os.str();
  }

  // Loads from every pointer parameter in the entry block.
  void pointer_reads() {
    const std::string ty = ity(w);
    std::string r;
    r = fresh("f");
    os << "  " << r << " = field-addr p, x\n";
    const std::string px = fresh("v");
    os << "  " << px << " = load " << ty << ", " << r << "\n";
    vals.push_back(px);
    const std::string z = fresh("f"), e = fresh("e"), ez = fresh("v");
    os << "  " << z << " = field-addr p, z\n";
    os << "  " << e << " = index-addr " << z << ", " << pick(3) << "\n";
    os << "  " << ez << " = load " << ty << ", " << e << "\n";
    vals.push_back(ez);
    const std::string yb = fresh("f"), y = fresh("y"), yw = fresh("v");
    os << "  " << yb << " = field-addr p, y\n";
    os << "  " << y << " = load i8, " << yb << "\n";
    os << "  " << yw << " = " << (w == 8 ? "add " + y + ", 0" : "zext " + y + " to " + ty) << "\n";
    vals.push_back(yw);
    const std::string sb = fresh("b"), sv = fresh("y"), sw = fresh("v");
    if (rust()) {
      os << "  " << sb << " = bounds-checked-index s, " << pick(4) << "\n";
    } else {
      os << "  " << sb << " = index-addr s, " << pick(4) << "\n";
    }
    os << "  " << sv << " = load i8, " << sb << "\n";
    os << "  " << sw << " = " << (w == 8 ? "add " + sv + ", 0" : "sext " + sv + " to " + ty) << "\n";
    vals.push_back(sw);
    const std::string qp = fresh("q"), qv = fresh("v");
    if (rust()) os << "  " << qp << " = option-unwrap q\n";
    else os << "  " << qp << " = index-addr q, 0\n";
    os << "  " << qv << " = load " << ty << ", " << qp << "\n";
    vals.push_back(qv);
    const std::string cr = fresh("v");
    os << "  " << cr << " = call helper(" << any() << ") -> " << ty << "\n";
    vals.push_back(cr);
  }

  bool panic_block = false;
};

}  // namespace

std::string generate_function(std::uint64_t seed, const GenOptions& opts, const std::string& name) {
  Gen g;
  g.rng.seed(seed * 0x9E3779B97F4A7C15ull + 17);
  g.o = opts;
  return g.run(name);
}

}  // namespace oracle

namespace oracle {

using namespace symdiff;
using sym::ExprRef;
using sym::Op;

ExprGen::ExprGen(std::uint64_t seed, std::vector<std::pair<std::string, unsigned>> symbols) : syms_(std::move(symbols)) {
  rng.seed(seed * 0xD1B54A32D192ED03ull + 5);
}

unsigned ExprGen::width() {
  static const unsigned ws[] = {1, 8, 8, 16, 32};
  return ws[pick(5)];
}

ExprRef ExprGen::constant(unsigned w) {
  static const std::uint64_t interesting[] = {0, 1, 2, 0x7f, 0x80, 0xff, ~0ull, 0x8000};
  const std::uint64_t v = pick(3) == 0 ? rng() : interesting[pick(8)];
  return sym::constant(v & sym::mask(w), w);
}

ExprRef ExprGen::leaf(unsigned w) {
  const unsigned k = pick(memory_ ? 5 : 3);
  if (k == 0) return constant(w);
  if (k == 3 && w % 8 == 0) return sym::read("arg" + std::to_string(pick(2)), sym::constant(pick(4), 64), w);
  if (k == 4) return sym::ext_call("h", pick(2), pick(2), w);
  const auto& [name, sw] = syms_[pick(static_cast<unsigned>(syms_.size()))];
  ExprRef s = sym::symbol(name, sw);
  if (sw == w) return s;
  if (sw < w) return sym::unary(pick(2) ? Op::ZExt : Op::SExt, w, s);
  return sym::unary(Op::Trunc, w, s);
}

ExprRef ExprGen::make(unsigned w, unsigned depth) {
  if (depth == 0 || pick(4) == 0) return leaf(w);
  const unsigned k = pick(10);
  if (w == 1 && k < 5) {
    static const Op cmp[] = {Op::Eq, Op::Ne, Op::Ult, Op::Ule, Op::Slt, Op::Sle};
    const unsigned cw = 8 << pick(3);
    return sym::binary(cmp[pick(6)], make(cw, depth - 1), make(cw, depth - 1));
  }
  switch (k) {
    case 0:
    case 1: {
      // extension or truncation from another width
      const unsigned from = width();
      if (from < w) return sym::unary(pick(2) ? Op::ZExt : Op::SExt, w, make(from, depth - 1));
      if (from > w) return sym::unary(Op::Trunc, w, make(from, depth - 1));
      return make(w, depth - 1);
    }
    case 2: return sym::unary(pick(2) ? Op::Neg : Op::Not, w, make(w, depth - 1));
    case 3: return sym::ite(make(1, depth - 1), make(w, depth - 1), make(w, depth - 1));
    default: {
      static const Op ops[] = {Op::Add, Op::Sub, Op::Mul, Op::UDiv, Op::SDiv, Op::And,
                               Op::Or,  Op::Xor, Op::Shl, Op::LShr, Op::AShr, Op::Add};
      const Op op = ops[pick(12)];
      ExprRef b = (op == Op::Shl || op == Op::LShr || op == Op::AShr) && pick(2) ? sym::constant(pick(w + 1), w)
                                                                                 : make(w, depth - 1);
      return sym::binary(op, make(w, depth - 1), b);
    }
  }
}

symexec::PathSummary ExprGen::summary(bool memory) {
  memory_ = memory;
  symexec::PathSummary s;
  const unsigned nc = pick(4);
  for (unsigned i = 0; i < nc; ++i) {
    ExprRef c = make(1, 3);
    if (pick(4) == 0) c = sym::safe(c);
    s.constraints.push_back(c);
  }
  static const symexec::Terminal ts[] = {symexec::Terminal::Return, symexec::Terminal::Return,
                                         symexec::Terminal::Panic, symexec::Terminal::Undefined,
                                         symexec::Terminal::BudgetExhausted};
  s.terminal = ts[pick(5)];
  if (s.terminal == symexec::Terminal::Panic) s.code = pick(2) ? "overflow" : "index-out-of-bounds";
  if (s.terminal == symexec::Terminal::Undefined) s.code = "out-of-bounds";
  if (s.terminal == symexec::Terminal::BudgetExhausted && pick(2)) s.code = "loop-unroll";
  if (s.terminal == symexec::Terminal::Return) {
    if (pick(3)) s.ret = make(width(), 4);
    const unsigned no = pick(3);
    for (unsigned i = 0; i < no; ++i) s.outputs["arg" + std::to_string(i) + "[" + std::to_string(pick(4)) + "]"] = make(8, 3);
    s.ub = pick(5) == 0;
  }
  memory_ = false;
  return s;
}

}  // namespace oracle
