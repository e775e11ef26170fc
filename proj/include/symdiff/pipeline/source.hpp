#pragma once

#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace symdiff::pipeline {

struct CFunction {
  std::string name;
  std::string text;    // verbatim definition
  std::string header;  // everything before the body, trimmed
  int line = 0;
  std::set<std::string> types;    // records, typedefs, enums (canonical names)
  std::set<std::string> macros;
  std::set<std::string> callees;
  std::set<std::string> external;  // referenced names the unit does not define
};

struct CField {
  std::string name;
  std::string type;  // declarator text without the name, e.g. "char *", "char [16]"
  bool bytes = false;  // char pointer or char array
};

/// Functions and definitions of a C-subset source file.
struct SourceUnit {
  std::vector<CFunction> functions;
  std::map<std::string, std::string> records;   // struct/union tag (or alias) -> definition text
  std::map<std::string, std::vector<CField>> record_fields;
  std::map<std::string, std::string> typedefs;  // alias or enum name -> definition text
  std::map<std::string, std::string> aliases;   // typedef name -> record it names
  std::map<std::string, std::string> macros;    // name -> #define line
  std::map<std::string, std::string> prototypes;  // declared-only functions
  std::map<std::string, std::string> enum_constants;  // enumerator -> enum name
  std::vector<std::string> warnings;

  const CFunction* find(std::string_view name) const;
};

/// Regex- and bracket-balance based extraction. Items that cannot be
/// classified are skipped with a warning.
SourceUnit ingest_c(std::string_view source);

enum class FragmentKind { Macro, Typedef, Record, Declaration };

struct ContextFragment {
  FragmentKind kind = FragmentKind::Macro;
  std::string name;
  std::string text;
  friend bool operator==(const ContextFragment&, const ContextFragment&) = default;
};

const char* to_string(FragmentKind k);

/// Transitive closure of the records, typedefs and macros fn refers to,
/// dependencies first, followed by one-line declarations of its callees.
std::vector<ContextFragment> build_context(const SourceUnit& u, std::string_view fn);

struct FieldUse {
  std::string function;
  std::string snippet;
  friend bool operator==(const FieldUse&, const FieldUse&) = default;
};

/// For each byte-sequence field of the record, every statement of the unit
/// that accesses `x.field` or `x->field`.
std::map<std::string, std::vector<FieldUse>> analyze_field_usage(const SourceUnit& u, std::string_view record);

}  // namespace symdiff::pipeline
