#include "symdiff/symexec/memory.hpp"

namespace symdiff::symexec {

using sym::ExprRef;
using sym::Op;

ExprRef byte_of(const ExprRef& e, unsigned j) {
  const unsigned w = e->width();
  if (w <= 8) return w == 8 ? e : sym::fold_unary(Op::ZExt, 8, e);
  ExprRef shifted = j == 0 ? e : sym::fold_binary(Op::LShr, e, sym::constant(8ULL * j, w));
  return sym::fold_unary(Op::Trunc, 8, shifted);
}

ExprRef MemRegion::initial(std::uint64_t off, unsigned bytes) const {
  if (zero_init) return sym::constant(0, bytes * 8);
  return sym::read(name, sym::constant(off, 64), bytes * 8);
}

const Cell* MemRegion::exact(std::uint64_t off, std::uint64_t size) const {
  auto it = cells.find(off);
  if (it == cells.end() || it->second.size != size) return nullptr;
  return &it->second;
}

bool MemRegion::overlaps_cells(std::uint64_t off, std::uint64_t size) const {
  auto it = cells.lower_bound(off);
  if (it != cells.end() && it->first < off + size) return true;
  if (it == cells.begin()) return false;
  --it;
  return it->first + it->second.size > off;
}

ExprRef MemRegion::load_bits(std::uint64_t off, unsigned bytes) const {
  const unsigned w = bytes * 8;
  if (const Cell* c = exact(off, bytes)) {
    const ExprRef& e = c->value.expr;
    if (e->width() == w) return e;
    return e->width() < w ? sym::fold_unary(Op::ZExt, w, e) : sym::fold_unary(Op::Trunc, w, e);
  }
  if (!overlaps_cells(off, bytes)) return initial(off, bytes);
  ExprRef acc;
  for (unsigned j = 0; j < bytes; ++j) {
    const std::uint64_t at = off + j;
    ExprRef b;
    auto it = cells.upper_bound(at);
    if (it != cells.begin()) {
      --it;
      if (it->first + it->second.size > at) b = byte_of(it->second.value.expr, static_cast<unsigned>(at - it->first));
    }
    if (!b) b = initial(at, 1);
    if (bytes == 1) return b;
    ExprRef wide = sym::fold_unary(Op::ZExt, w, b);
    if (j) wide = sym::fold_binary(Op::Shl, wide, sym::constant(8ULL * j, w));
    acc = acc ? sym::fold_binary(Op::Or, acc, wide) : wide;
  }
  return acc;
}

void MemRegion::store(std::uint64_t off, std::uint64_t size, Value v) {
  // Split cells that stick out of the new range into single bytes.
  std::vector<std::pair<std::uint64_t, Cell>> keep;
  auto it = cells.lower_bound(off);
  if (it != cells.begin()) {
    auto prev = std::prev(it);
    if (prev->first + prev->second.size > off) it = prev;
  }
  while (it != cells.end() && it->first < off + size) {
    const std::uint64_t start = it->first;
    const Cell old = it->second;
    it = cells.erase(it);
    for (std::uint64_t j = 0; j < old.size; ++j) {
      const std::uint64_t at = start + j;
      if (at >= off && at < off + size) continue;
      keep.push_back({at, Cell{1, Value::scalar(byte_of(old.value.expr, static_cast<unsigned>(j))), old.written}});
    }
  }
  for (auto& [at, c] : keep) cells.emplace(at, std::move(c));
  cells[off] = Cell{size, std::move(v), true};
}

std::vector<std::pair<std::uint64_t, std::uint64_t>> MemRegion::write_set() const {
  std::vector<std::pair<std::uint64_t, std::uint64_t>> out;
  for (const auto& [off, c] : cells)
    if (c.written) out.push_back({off, c.size});
  return out;
}

std::string MemRegion::leaf_path(std::uint64_t off) const {
  if (buffer) return name + "[" + std::to_string(off) + "]";
  for (const auto& leaf : layout)
    if (leaf.offset == off) return name + leaf.path;
  return name + "+" + std::to_string(off);
}

}  // namespace symdiff::symexec
