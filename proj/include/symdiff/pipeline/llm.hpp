#pragma once

#include <cstdint>
#include <deque>
#include <filesystem>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace symdiff::pipeline {

class LlmError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class LlmClient {
 public:
  virtual ~LlmClient() = default;
  /// Context window in estimator tokens.
  virtual std::size_t context_budget() const = 0;
  /// Thread-safe. Throws LlmError.
  virtual std::string complete(const std::string& prompt) = 0;
};

/// 64-bit FNV-1a.
std::uint64_t prompt_hash(std::string_view prompt);
std::string hash_hex(std::uint64_t h);

/// Every prompt starts with a "// task: <kind> <name> [i/k]" line; the key
/// is "<kind>.<name>[.i]". Empty when the line is absent.
std::string task_key(std::string_view prompt);

/// Scripted responses. Lookup order: exact prompt hash, task key (the n-th
/// call for a key takes the n-th response, the last one repeats), responder,
/// fallback queue.
class MockClient : public LlmClient {
 public:
  using Responder = std::function<std::optional<std::string>(const std::string& prompt)>;

  explicit MockClient(std::size_t budget = 16000) : budget_(budget) {}

  void script(std::string_view prompt, std::string response);
  void script_task(const std::string& key, std::vector<std::string> responses);
  void enqueue(std::string response);
  void set_responder(Responder r);
  /// Makes the next n calls throw, to exercise client retries.
  void fail_next(unsigned n);

  std::size_t context_budget() const override { return budget_; }
  std::string complete(const std::string& prompt) override;

  std::size_t calls() const;
  std::vector<std::string> prompts() const;

 private:
  std::size_t budget_;
  mutable std::mutex mu_;
  std::map<std::uint64_t, std::string> by_hash_;
  std::map<std::string, std::vector<std::string>> by_task_;
  std::map<std::string, std::size_t> task_calls_;
  std::deque<std::string> queue_;
  Responder responder_;
  unsigned failures_ = 0;
  std::vector<std::string> prompts_;
};

/// Reads responses from a directory: `<hash>.txt` for an exact prompt,
/// then `<key>.<n>.txt` and `<key>.txt` for the n-th call of a task key.
class FileMockClient : public LlmClient {
 public:
  explicit FileMockClient(std::filesystem::path dir, std::size_t budget = 16000);

  std::size_t context_budget() const override { return budget_; }
  std::string complete(const std::string& prompt) override;
  std::size_t calls() const;

 private:
  std::filesystem::path dir_;
  std::size_t budget_;
  mutable std::mutex mu_;
  std::map<std::string, std::size_t> task_calls_;
  std::size_t calls_ = 0;
};

/// Chat-completions style endpoint over plain HTTP. The token is read from
/// the named environment variable at call time.
class HttpClient : public LlmClient {
 public:
  HttpClient(std::string endpoint, std::string model, std::string token_env, std::size_t budget = 16000,
             int timeout_seconds = 120);

  std::size_t context_budget() const override { return budget_; }
  std::string complete(const std::string& prompt) override;

 private:
  std::string host_, path_, model_, token_env_;
  int port_ = 80;
  std::size_t budget_;
  int timeout_;
};

}  // namespace symdiff::pipeline
