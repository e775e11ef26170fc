#pragma once

#include <deque>
#include <filesystem>
#include <functional>
#include <mutex>
#include <string>
#include <string_view>
#include <vector>

namespace symdiff::pipeline {

struct CompileResult {
  bool ok = false;
  int exit_code = 0;
  std::string diagnostics;
};

class CompilerAdapter {
 public:
  virtual ~CompilerAdapter() = default;
  /// Thread-safe.
  virtual CompileResult compile(const std::string& source, const std::string& unit_name) = 0;
};

/// Runs a shell command with `{file}` replaced by a temporary source file.
/// Exit status 0 means compiled; diagnostics come from stderr.
class CommandAdapter : public CompilerAdapter {
 public:
  CommandAdapter(std::string command_template, std::filesystem::path work_dir);
  CompileResult compile(const std::string& source, const std::string& unit_name) override;

 private:
  std::string template_;
  std::filesystem::path dir_;
  std::mutex mu_;
  unsigned long serial_ = 0;
};

/// Test double: results come from a queue, then from the judge, else ok.
class ScriptedAdapter : public CompilerAdapter {
 public:
  using Judge = std::function<CompileResult(const std::string& source)>;
  void push(CompileResult r);
  void set_judge(Judge j);
  CompileResult compile(const std::string& source, const std::string& unit_name) override;
  std::size_t calls() const;

 private:
  mutable std::mutex mu_;
  std::deque<CompileResult> queue_;
  Judge judge_;
  std::size_t calls_ = 0;
};

struct UnsafeFinding {
  int line = 0;
  std::string what;  // "unsafe" or the denied path
  friend bool operator==(const UnsafeFinding&, const UnsafeFinding&) = default;
};

/// Lexical scan of Rust text outside comments and literals. A deny entry
/// ending in "::" matches any path starting with it; other entries match a
/// called path equal to or ending in "::<entry>".
std::vector<UnsafeFinding> scan_unsafe(std::string_view rust, const std::vector<std::string>& deny);

}  // namespace symdiff::pipeline
