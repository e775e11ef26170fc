#include "symdiff/symexec/compiled.hpp"

#include <map>
#include <unordered_map>

namespace symdiff::sym {

namespace {

struct Builder {
  bool strip_safe;
  bool ok = true;
  std::unordered_map<const Expr*, std::uint32_t> index;
  std::map<std::string, std::uint32_t> atom_index;
  std::vector<Atom>* atoms;
  std::vector<std::uint32_t>* byte_atoms;

  std::uint32_t atom(const std::string& key, unsigned bits) {
    auto [it, fresh] = atom_index.emplace(key, static_cast<std::uint32_t>(atoms->size()));
    if (fresh) atoms->push_back({key, bits});
    return it->second;
  }
};

}  // namespace

std::optional<CompiledSet> CompiledSet::compile(const std::vector<ExprRef>& roots, bool strip_safe) {
  CompiledSet cs;
  Builder bld{strip_safe, true, {}, {}, &cs.atoms_, &cs.byte_atoms_};

  // Iterative post-order so deep ite chains do not exhaust the stack.
  auto emit = [&](const ExprRef& root) -> std::uint32_t {
    std::vector<std::pair<const Expr*, bool>> stack{{root.get(), false}};
    while (!stack.empty() && bld.ok) {
      auto [e, expanded] = stack.back();
      stack.pop_back();
      if (bld.index.count(e)) continue;
      if (!expanded) {
        stack.push_back({e, true});
        if (e->op() == Op::Read && !e->kid(0)->is_const()) {
          bld.ok = false;
          break;
        }
        if (e->op() != Op::Read)
          for (auto it = e->kids().rbegin(); it != e->kids().rend(); ++it) stack.push_back({it->get(), false});
        continue;
      }
      Node n{e->op(), e->width(), e->kids().empty() ? 0u : e->kid(0)->width()};
      switch (e->op()) {
        case Op::Const:
          n.value = e->value();
          break;
        case Op::Sym:
          n.value = bld.atom(e->name(), e->width());
          break;
        case Op::ExtCall:
          n.value = bld.atom(ext_call_key(e->name(), e->site(), e->occurrence()), e->width());
          break;
        case Op::Read: {
          n.a = static_cast<std::uint32_t>(cs.byte_atoms_.size());
          const std::uint64_t off = e->kid(0)->value();
          for (unsigned i = 0; i < e->width() / 8; ++i) cs.byte_atoms_.push_back(bld.atom(byte_key(e->name(), off + i), 8));
          break;
        }
        default:
          if (e->kids().size() > 0) n.a = bld.index.at(e->kid(0).get());
          if (e->kids().size() > 1) n.b = bld.index.at(e->kid(1).get());
          if (e->kids().size() > 2) n.c = bld.index.at(e->kid(2).get());
          if (e->op() == Op::Safe) n.value = bld.strip_safe ? 1 : 0;
      }
      bld.index.emplace(e, static_cast<std::uint32_t>(cs.nodes_.size()));
      cs.nodes_.push_back(n);
    }
    return bld.ok ? bld.index.at(root.get()) : 0;
  };

  for (const auto& r : roots) {
    const std::uint32_t id = emit(r);
    if (!bld.ok) return std::nullopt;
    cs.roots_.push_back(id);
    cs.root_end_.push_back(static_cast<std::uint32_t>(cs.nodes_.size()));
  }
  for (const auto& a : cs.atoms_) {
    cs.shifts_.push_back(cs.total_bits_);
    cs.total_bits_ += a.bits;
  }
  return cs;
}

void CompiledSet::decode(std::uint64_t index, std::vector<std::uint64_t>& atom_values) const {
  atom_values.resize(atoms_.size());
  for (std::size_t i = 0; i < atoms_.size(); ++i)
    atom_values[i] = shifts_[i] >= 64 ? 0 : (index >> shifts_[i]) & mask(atoms_[i].bits);
}

namespace {

inline std::uint64_t eval_node(const auto& n, const std::uint64_t* atoms, const std::uint32_t* byte_atoms,
                               const std::uint64_t* s) {
  switch (n.op) {
    case Op::Const: return n.value;
    case Op::Sym:
    case Op::ExtCall: return atoms[n.value];
    case Op::Read: {
      std::uint64_t r = 0;
      for (unsigned i = 0; i < n.width / 8; ++i) r |= (atoms[byte_atoms[n.a + i]] & 0xFF) << (8 * i);
      return r;
    }
    case Op::Ite: return (s[n.a] & 1) ? s[n.b] : s[n.c];
    case Op::Safe: return n.value == 1 ? s[n.a] : 1;  // value 1: evaluate the wrapped predicate
    default:
      if (is_unary(n.op)) return apply_unary(n.op, n.width, n.child_width, s[n.a]);
      return apply_binary(n.op, n.child_width, s[n.a], s[n.b]);
  }
}

}  // namespace

void CompiledSet::run(const std::uint64_t* atom_values, std::uint64_t* scratch) const {
  for (std::size_t i = 0; i < nodes_.size(); ++i)
    scratch[i] = eval_node(nodes_[i], atom_values, byte_atoms_.data(), scratch);
}

bool CompiledSet::all_true(const std::uint64_t* atom_values, std::uint64_t* scratch) const {
  std::size_t done = 0;
  for (std::size_t r = 0; r < roots_.size(); ++r) {
    for (; done < root_end_[r]; ++done)
      scratch[done] = eval_node(nodes_[done], atom_values, byte_atoms_.data(), scratch);
    if ((scratch[roots_[r]] & 1) == 0) return false;
  }
  return true;
}

Valuation CompiledSet::valuation(const std::vector<std::uint64_t>& atom_values) const {
  Valuation v;
  for (std::size_t i = 0; i < atoms_.size(); ++i) v[atoms_[i].key] = atom_values.at(i);
  return v;
}

}  // namespace symdiff::sym
