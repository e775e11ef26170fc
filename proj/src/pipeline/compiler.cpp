#include "symdiff/pipeline/compiler.hpp"

#include <sys/wait.h>

#include <cctype>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace symdiff::pipeline {

CommandAdapter::CommandAdapter(std::string command_template, std::filesystem::path work_dir)
    : template_(std::move(command_template)), dir_(std::move(work_dir)) {
  std::filesystem::create_directories(dir_);
}

namespace {
std::string shell_quote(const std::string& s) {
  std::string out = "'";
  for (char c : s) {
    if (c == '\'') out += "'\\''";
    else out += c;
  }
  return out + "'";
}

std::string safe_name(const std::string& s) {
  std::string out;
  for (char c : s) out += std::isalnum(static_cast<unsigned char>(c)) || c == '_' ? c : '_';
  return out.empty() ? "unit" : out;
}
}  // namespace

CompileResult CommandAdapter::compile(const std::string& source, const std::string& unit_name) {
  unsigned long n;
  {
    std::lock_guard lock(mu_);
    n = ++serial_;
  }
  const auto stem = dir_ / (safe_name(unit_name) + "." + std::to_string(n));
  const auto src = stem.string() + ".rs";
  const auto err = stem.string() + ".stderr";
  {
    std::ofstream out(src, std::ios::binary);
    out << source;
  }
  std::string cmd = template_;
  for (std::size_t at; (at = cmd.find("{file}")) != std::string::npos;) cmd.replace(at, 6, shell_quote(src));
  cmd += " >/dev/null 2>" + shell_quote(err);
  const int status = std::system(cmd.c_str());
  CompileResult r;
  r.exit_code = status == -1 ? -1 : WIFEXITED(status) ? WEXITSTATUS(status) : 128 + WTERMSIG(status);
  r.ok = r.exit_code == 0;
  std::ifstream in(err, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  r.diagnostics = ss.str();
  return r;
}

void ScriptedAdapter::push(CompileResult r) {
  std::lock_guard lock(mu_);
  queue_.push_back(std::move(r));
}

void ScriptedAdapter::set_judge(Judge j) {
  std::lock_guard lock(mu_);
  judge_ = std::move(j);
}

CompileResult ScriptedAdapter::compile(const std::string& source, const std::string&) {
  std::unique_lock lock(mu_);
  ++calls_;
  if (!queue_.empty()) {
    auto r = std::move(queue_.front());
    queue_.pop_front();
    return r;
  }
  if (judge_) {
    auto j = judge_;
    lock.unlock();
    return j(source);
  }
  return {true, 0, {}};
}

std::size_t ScriptedAdapter::calls() const {
  std::lock_guard lock(mu_);
  return calls_;
}

namespace {

struct Path {
  std::string text;
  int line;
  bool called;
};

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

// Identifier paths (a::b::c) outside comments, strings and char literals.
std::vector<Path> rust_paths(std::string_view s) {
  std::vector<Path> out;
  std::size_t i = 0;
  int line = 1;
  auto skip_to = [&](std::size_t j) {
    for (; i < j && i < s.size(); ++i)
      if (s[i] == '\n') ++line;
  };
  while (i < s.size()) {
    const char c = s[i];
    if (c == '\n') {
      ++line;
      ++i;
    } else if (c == '/' && i + 1 < s.size() && s[i + 1] == '/') {
      skip_to(s.find('\n', i) == std::string_view::npos ? s.size() : s.find('\n', i));
    } else if (c == '/' && i + 1 < s.size() && s[i + 1] == '*') {
      // block comments nest
      int depth = 0;
      std::size_t j = i;
      while (j < s.size()) {
        if (s.compare(j, 2, "/*") == 0) {
          ++depth;
          j += 2;
        } else if (s.compare(j, 2, "*/") == 0) {
          j += 2;
          if (--depth == 0) break;
        } else {
          ++j;
        }
      }
      skip_to(j);
    } else if (c == 'r' && i + 1 < s.size() && (s[i + 1] == '"' || s[i + 1] == '#') &&
               (i == 0 || !ident_char(s[i - 1]))) {
      std::size_t j = i + 1, hashes = 0;
      while (j < s.size() && s[j] == '#') ++hashes, ++j;
      if (j >= s.size() || s[j] != '"') {
        ++i;
        continue;
      }
      const std::string close = "\"" + std::string(hashes, '#');
      const std::size_t e = s.find(close, j + 1);
      skip_to(e == std::string_view::npos ? s.size() : e + close.size());
    } else if (c == '"') {
      std::size_t j = i + 1;
      while (j < s.size() && s[j] != '"') j += s[j] == '\\' ? 2 : 1;
      skip_to(j + 1);
    } else if (c == '\'') {
      // char literal, or a lifetime
      if (i + 2 < s.size() && s[i + 1] == '\\') {
        const std::size_t e = s.find('\'', i + 2);
        skip_to(e == std::string_view::npos ? s.size() : e + 1);
      } else if (i + 2 < s.size() && s[i + 2] == '\'') {
        skip_to(i + 3);
      } else {
        ++i;
        while (i < s.size() && ident_char(s[i])) ++i;
      }
    } else if (ident_start(c)) {
      const int at = line;
      std::size_t j = i;
      for (;;) {
        while (j < s.size() && ident_char(s[j])) ++j;
        if (j + 2 < s.size() && s[j] == ':' && s[j + 1] == ':' && ident_start(s[j + 2])) j += 2;
        else break;
      }
      std::size_t k = j;
      while (k < s.size() && (s[k] == ' ' || s[k] == '\t')) ++k;
      if (k < s.size() && s[k] == '!') ++k;  // macros
      out.push_back({std::string(s.substr(i, j - i)), at, k < s.size() && s[k] == '('});
      i = j;
    } else {
      ++i;
    }
  }
  return out;
}

}  // namespace

std::vector<UnsafeFinding> scan_unsafe(std::string_view rust, const std::vector<std::string>& deny) {
  std::vector<UnsafeFinding> out;
  for (const auto& p : rust_paths(rust)) {
    if (p.text == "unsafe") {
      out.push_back({p.line, "unsafe"});
      continue;
    }
    for (const auto& d : deny) {
      if (d.empty()) continue;
      const bool prefix = d.size() >= 2 && d.compare(d.size() - 2, 2, "::") == 0;
      bool hit;
      if (prefix) {
        hit = p.text.rfind(d, 0) == 0 || p.text.find("::" + d) != std::string::npos;
      } else {
        hit = p.called && (p.text == d || (p.text.size() > d.size() + 2 &&
                                           p.text.compare(p.text.size() - d.size() - 2, d.size() + 2, "::" + d) == 0));
      }
      if (hit) {
        out.push_back({p.line, p.text});
        break;
      }
    }
  }
  return out;
}

}  // namespace symdiff::pipeline
