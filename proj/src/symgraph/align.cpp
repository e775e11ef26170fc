#include "symdiff/symgraph/align.hpp"

#include <algorithm>
#include <json.hpp>

namespace symdiff::symgraph {

using mir::IrType;
using mir::TypeKind;

std::string AlignStep::to_string() const {
  switch (kind) {
    case StepKind::UnwrapOptional: return "unwrap-optional";
    case StepKind::Deref: return "deref";
    case StepKind::Field: return "field:" + field;
    case StepKind::Index: return "index:" + std::to_string(index);
    case StepKind::ProjectSliceData: return "project-slice-data";
    case StepKind::ProjectVectorData: return "project-vector-data";
  }
  return "?";
}

std::optional<AlignStep> AlignStep::parse(const std::string& s) {
  if (s == "unwrap-optional") return AlignStep{StepKind::UnwrapOptional, {}, 0};
  if (s == "deref") return AlignStep{StepKind::Deref, {}, 0};
  if (s == "project-slice-data") return AlignStep{StepKind::ProjectSliceData, {}, 0};
  if (s == "project-vector-data") return AlignStep{StepKind::ProjectVectorData, {}, 0};
  if (s.rfind("field:", 0) == 0 && s.size() > 6) return AlignStep{StepKind::Field, s.substr(6), 0};
  if (s.rfind("index:", 0) == 0 && s.size() > 6) {
    const auto digits = s.substr(6);
    if (!std::all_of(digits.begin(), digits.end(), [](char c) { return c >= '0' && c <= '9'; })) return std::nullopt;
    return AlignStep{StepKind::Index, {}, std::stoull(digits)};
  }
  return std::nullopt;
}

std::string AlignmentSpec::to_json() const {
  nlohmann::json j;
  j["entries"] = nlohmann::json::array();
  for (const auto& e : entries) {
    nlohmann::json steps = nlohmann::json::array();
    for (const auto& s : e.steps) steps.push_back(s.to_string());
    j["entries"].push_back({{"output", e.output}, {"steps", steps}});
  }
  return j.dump(2);
}

AlignmentSpec AlignmentSpec::from_json(const std::string& text) {
  AlignmentSpec spec;
  try {
    const auto j = nlohmann::json::parse(text);
    for (const auto& e : j.at("entries")) {
      AlignEntry entry{e.at("output").get<std::string>(), {}};
      for (const auto& s : e.at("steps")) {
        auto step = AlignStep::parse(s.get<std::string>());
        if (!step) throw AlignmentError("unknown alignment step '" + s.get<std::string>() + "'");
        entry.steps.push_back(*step);
      }
      if (entry.steps.empty()) throw AlignmentError("alignment entry '" + entry.output + "' has no steps");
      spec.entries.push_back(std::move(entry));
    }
  } catch (const nlohmann::json::exception& ex) {
    throw AlignmentError(std::string("bad alignment spec: ") + ex.what());
  }
  return spec;
}

namespace {

// Same spelling the symbolizer uses for nested region names.
std::string region_form(const std::string& leaf) {
  std::string out;
  for (char c : leaf) {
    if (c == '[') out += '.';
    else if (c != ']') out += c;
  }
  return out;
}

struct Deriver {
  const mir::TypeTable& types;
  unsigned depth_limit;
  AlignmentSpec spec;

  void value(const std::string& region, const std::string& path, const IrType& t, unsigned depth,
             std::vector<AlignStep> steps) {
    switch (t.kind()) {
      case TypeKind::Optional:
        steps.push_back({StepKind::UnwrapOptional, {}, 0});
        value(region, path, t.inner(), depth, std::move(steps));
        return;
      case TypeKind::Address: {
        if (depth >= depth_limit) return;
        steps.push_back({StepKind::Deref, {}, 0});
        const std::string child = path.empty() ? region + ".*" : region_form(region + path);
        value(child, "", t.inner(), depth + 1, std::move(steps));
        return;
      }
      case TypeKind::StrSlice:
      case TypeKind::ByteVec:
        steps.push_back({t.kind() == TypeKind::StrSlice ? StepKind::ProjectSliceData : StepKind::ProjectVectorData, {}, 0});
        spec.entries.push_back({region + path, std::move(steps)});
        return;
      case TypeKind::Array:
        for (std::uint64_t i = 0; i < t.count(); ++i) {
          auto s = steps;
          s.push_back({StepKind::Index, {}, i});
          value(region, path + "[" + std::to_string(i) + "]", t.inner(), depth, std::move(s));
        }
        return;
      case TypeKind::Record: {
        auto it = types.find(t.record_name());
        if (it == types.end()) return;
        for (const auto& f : it->second.fields) {
          auto s = steps;
          s.push_back({StepKind::Field, f.name, 0});
          value(region, path + "." + f.name, f.type, depth, std::move(s));
        }
        return;
      }
      default: return;
    }
  }
};

// A fat value that is a whole pointee corresponds to a C pointer whose
// target region is named `<region>.*`.
std::string c_side_name(const AlignEntry& e) {
  std::size_t i = e.steps.size() - 1;
  while (i > 0 && e.steps[i - 1].kind == StepKind::UnwrapOptional) --i;
  const bool pointee = i > 0 && e.steps[i - 1].kind == StepKind::Deref;
  return region_form(e.output) + (pointee ? ".*" : "");
}

}  // namespace

AlignmentSpec derive_alignment(const mir::IrFunction& fn, const mir::TypeTable& types, unsigned depth_limit) {
  Deriver d{types, depth_limit, {}};
  if (fn.dialect != mir::Dialect::Rust) return d.spec;
  {
    std::vector<AlignStep> steps;
    const IrType* t = &fn.ret;
    for (; t->kind() == TypeKind::Optional; t = &t->inner()) steps.push_back({StepKind::UnwrapOptional, {}, 0});
    if (t->is_fat()) {
      steps.push_back({t->kind() == TypeKind::StrSlice ? StepKind::ProjectSliceData : StepKind::ProjectVectorData, {}, 0});
      d.spec.entries.push_back({"ret", std::move(steps)});
    }
  }
  for (std::size_t i = 0; i < fn.params.size(); ++i) {
    const auto& p = fn.params[i];
    if (!p.out) continue;
    // A fat parameter passed by value already reports arg<i>[k].
    const IrType& t = p.type.unwrap_optional();
    if (!t.is_address()) continue;
    std::vector<AlignStep> steps;
    for (const IrType* w = &p.type; w->kind() == TypeKind::Optional; w = &w->inner())
      steps.push_back({StepKind::UnwrapOptional, {}, 0});
    steps.push_back({StepKind::Deref, {}, 0});
    d.value("arg" + std::to_string(i), "", t.inner(), 1, std::move(steps));
  }
  return d.spec;
}

std::map<std::string, sym::ExprRef> align_outputs(const symexec::PathSummary& s, const AlignmentSpec& spec,
                                                  std::map<std::string, std::string>* failures) {
  std::map<std::string, sym::ExprRef> out;
  if (s.ret) out["ret"] = *s.ret;
  for (const auto& [path, e] : s.outputs) {
    std::optional<std::string> renamed = path;
    const AlignEntry* covering = nullptr;
    bool handled = false;
    for (const auto& entry : spec.entries) {
      const auto& proj = entry.steps.back();
      const bool vec = proj.kind == StepKind::ProjectVectorData;
      if (!vec && proj.kind != StepKind::ProjectSliceData) continue;
      const std::string data = region_form(entry.output) + ".data[";
      if (path.rfind(data, 0) == 0) {
        renamed = c_side_name(entry) + path.substr(data.size() - 1);
        handled = true;
        break;
      }
      if (path == entry.output + ".len" || (vec && path == entry.output + ".cap")) {
        renamed.reset();
        handled = true;
        break;
      }
      const bool under = path.size() > entry.output.size() && path.rfind(entry.output, 0) == 0 &&
                         (path[entry.output.size()] == '.' || path[entry.output.size()] == '[');
      if (under && (!covering || entry.output.size() > covering->output.size())) covering = &entry;
    }
    if (!handled && covering) {
      // Only nested fat values may extend a fat value's path.
      bool nested = false;
      for (const auto& entry : spec.entries)
        if (entry.output.size() > covering->output.size() && path.rfind(entry.output, 0) == 0) nested = true;
      if (!nested && failures)
        (*failures)[path] = "projection " + covering->steps.back().to_string() + " does not fit output '" + path + "'";
    }
    if (renamed) out[*renamed] = e;
  }
  return out;
}

}  // namespace symdiff::symgraph
