#include "symdiff/symexec/symbolize.hpp"

#include "symdiff/mir/layout.hpp"

namespace symdiff::symexec {

using mir::IrType;
using mir::TypeKind;

namespace {

// Region names may not contain brackets (they are KQuery atoms).
std::string child_name(const std::string& region, const std::string& leaf_path) {
  if (leaf_path.empty()) return region + ".*";
  std::string out = region;
  for (char c : leaf_path) {
    if (c == '[') out += '.';
    else if (c != ']') out += c;
  }
  return out;
}

struct Seeder {
  const mir::TypeTable& types;
  const ExecConfig& cfg;
  MemRegion& region;
  unsigned depth;

  void cell(std::uint64_t off, std::uint64_t size, Value v) { region.cells[off] = Cell{size, std::move(v), false}; }

  void walk(const IrType& t, std::uint64_t off, const std::string& path) {
    switch (t.kind()) {
      case TypeKind::Int:
      case TypeKind::Unit:
        return;
      case TypeKind::Optional:
        walk(t.inner(), off, path);
        return;
      case TypeKind::Address:
        cell(off, mir::kAddressBytes, input_pointer(child_name(region.name, path), t.inner(), depth + 1, cfg));
        return;
      case TypeKind::StrSlice:
      case TypeKind::ByteVec: {
        const auto n = sym::constant(cfg.slice_length, 64);
        cell(off, mir::kAddressBytes,
             input_pointer(child_name(region.name, path + ".data"), IrType::integer(8), depth + 1, cfg));
        cell(off + 8, 8, Value::scalar(n));
        if (t.kind() == TypeKind::ByteVec) cell(off + 16, 8, Value::scalar(n));
        return;
      }
      case TypeKind::Array: {
        const auto stride = mir::size_of(t.inner(), types);
        for (std::uint64_t i = 0; i < t.count(); ++i)
          walk(t.inner(), off + i * stride, path + "[" + std::to_string(i) + "]");
        return;
      }
      case TypeKind::Record: {
        std::uint64_t at = off;
        for (const auto& f : types.at(t.record_name()).fields) {
          walk(f.type, at, path + "." + f.name);
          at += mir::size_of(f.type, types);
        }
        return;
      }
    }
  }
};

}  // namespace

Value input_pointer(const std::string& path, const IrType& pointee, unsigned depth, const ExecConfig& cfg) {
  if (depth > cfg.depth_limit) return Value::scalar(sym::constant(0, 64));
  return Value{sym::symbol(path, 64), std::nullopt, std::make_shared<const LazyTarget>(LazyTarget{path, pointee, depth}), {}};
}

Value materialize(const LazyTarget& target, const mir::TypeTable& types, const ExecConfig& cfg,
                  std::vector<MemRegion>& regions, bool eager) {
  if (target.depth > cfg.depth_limit) return Value::scalar(sym::constant(0, 64));
  MemRegion r;
  r.name = target.path;
  const IrType& t = target.pointee.unwrap_optional();
  if (t.is_int() && t.bits() == 8) {
    r.buffer = true;
    r.size = cfg.slice_length;
  } else {
    r.size = mir::size_of(t, types);
    r.layout = mir::layout_of(t, types);
  }
  r.type = t;
  Seeder{types, cfg, r, target.depth}.walk(t, 0, "");
  const std::size_t idx = regions.size();
  regions.push_back(std::move(r));
  if (eager) {
    std::vector<std::uint64_t> lazy_offsets;
    for (const auto& [off, c] : regions[idx].cells)
      if (c.value.lazy) lazy_offsets.push_back(off);
    for (auto off : lazy_offsets) {
      const LazyTarget next = *regions[idx].cells.at(off).value.lazy;
      Value v = materialize(next, types, cfg, regions, true);
      regions[idx].cells.at(off).value = std::move(v);
    }
  }
  return Value{sym::symbol(target.path, 64), PtrInfo{idx, sym::constant(0, 64)}, nullptr, {}};
}

Symbolization symbolize(const mir::IrFunction& fn, const mir::TypeTable& types, const ExecConfig& cfg, bool eager) {
  Symbolization s;
  for (std::size_t i = 0; i < fn.params.size(); ++i) {
    const auto& p = fn.params[i];
    const std::string name = "arg" + std::to_string(i);
    const IrType& t = p.type.unwrap_optional();
    switch (t.kind()) {
      case TypeKind::Int:
        s.env[p.name] = Value::scalar(sym::symbol(name, t.bits()));
        break;
      case TypeKind::Address:
        s.env[p.name] = materialize(LazyTarget{name, t.inner(), 1}, types, cfg, s.regions, eager);
        break;
      case TypeKind::StrSlice:
      case TypeKind::ByteVec: {
        Value data = materialize(LazyTarget{name, IrType::integer(8), 1}, types, cfg, s.regions, eager);
        Value v;
        v.expr = data.expr;
        v.parts.push_back(std::move(data));
        v.parts.push_back(Value::scalar(sym::constant(cfg.slice_length, 64)));
        if (t.kind() == TypeKind::ByteVec) v.parts.push_back(Value::scalar(sym::constant(cfg.slice_length, 64)));
        s.env[p.name] = std::move(v);
        break;
      }
      default:
        throw UnsupportedParam("parameter '" + p.name + "' of " + fn.name + " has unsupported type " +
                               p.type.to_string() + " (pass records and arrays by address)");
    }
  }
  return s;
}

}  // namespace symdiff::symexec
