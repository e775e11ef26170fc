#include "symdiff/mir/layout.hpp"

#include <stdexcept>

namespace symdiff::mir {

namespace {

const RecordDef& lookup(const TypeTable& types, const std::string& name) {
  auto it = types.find(name);
  if (it == types.end()) throw std::invalid_argument("unknown record type '" + name + "'");
  return it->second;
}

void flatten(const IrType& t, const TypeTable& types, std::uint64_t base, const std::string& path,
             std::vector<LayoutLeaf>& out) {
  switch (t.kind()) {
    case TypeKind::Int:
    case TypeKind::Address:
      out.push_back({base, t, path});
      return;
    case TypeKind::Unit:
      return;
    case TypeKind::Optional:
      flatten(t.inner(), types, base, path, out);
      return;
    case TypeKind::StrSlice:
    case TypeKind::ByteVec:
      out.push_back({base, IrType::address(IrType::integer(8)), path + ".data"});
      out.push_back({base + kAddressBytes, IrType::integer(64), path + ".len"});
      if (t.kind() == TypeKind::ByteVec)
        out.push_back({base + 2 * kAddressBytes, IrType::integer(64), path + ".cap"});
      return;
    case TypeKind::Array: {
      const std::uint64_t stride = size_of(t.inner(), types);
      for (std::uint64_t i = 0; i < t.count(); ++i)
        flatten(t.inner(), types, base + i * stride, path + "[" + std::to_string(i) + "]", out);
      return;
    }
    case TypeKind::Record: {
      std::uint64_t off = base;
      for (const auto& f : lookup(types, t.record_name()).fields) {
        flatten(f.type, types, off, path + "." + f.name, out);
        off += size_of(f.type, types);
      }
      return;
    }
  }
}

}  // namespace

std::uint64_t size_of(const IrType& t, const TypeTable& types) {
  switch (t.kind()) {
    case TypeKind::Int:
      return t.bits() < 8 ? 1 : t.bits() / 8;
    case TypeKind::Address:
      return kAddressBytes;
    case TypeKind::Unit:
      return 0;
    case TypeKind::StrSlice:
      return 2 * kAddressBytes;
    case TypeKind::ByteVec:
      return 3 * kAddressBytes;
    case TypeKind::Optional:
      return size_of(t.inner(), types);
    case TypeKind::Array:
      return size_of(t.inner(), types) * t.count();
    case TypeKind::Record: {
      std::uint64_t total = 0;
      for (const auto& f : lookup(types, t.record_name()).fields) total += size_of(f.type, types);
      return total;
    }
  }
  return 0;
}

std::vector<LayoutLeaf> layout_of(const IrType& t, const TypeTable& types) {
  std::vector<LayoutLeaf> out;
  flatten(t, types, 0, "", out);
  return out;
}

}  // namespace symdiff::mir
