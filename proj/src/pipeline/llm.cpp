#include "symdiff/pipeline/llm.hpp"

#include <cstdio>
#include <fstream>
#include <regex>
#include <sstream>

namespace symdiff::pipeline {

std::uint64_t prompt_hash(std::string_view prompt) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : prompt) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string hash_hex(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string task_key(std::string_view prompt) {
  static const std::regex re(R"(^// task: ([a-z]+) ([A-Za-z_]\w*)(?: (\d+)/\d+)?)");
  const std::string first(prompt.substr(0, prompt.find('\n')));
  std::smatch m;
  if (!std::regex_search(first, m, re)) return {};
  std::string key = m[1].str() + "." + m[2].str();
  if (m[3].matched) key += "." + m[3].str();
  return key;
}

void MockClient::script(std::string_view prompt, std::string response) {
  std::lock_guard lock(mu_);
  by_hash_[prompt_hash(prompt)] = std::move(response);
}

void MockClient::script_task(const std::string& key, std::vector<std::string> responses) {
  std::lock_guard lock(mu_);
  by_task_[key] = std::move(responses);
}

void MockClient::enqueue(std::string response) {
  std::lock_guard lock(mu_);
  queue_.push_back(std::move(response));
}

void MockClient::set_responder(Responder r) {
  std::lock_guard lock(mu_);
  responder_ = std::move(r);
}

void MockClient::fail_next(unsigned n) {
  std::lock_guard lock(mu_);
  failures_ = n;
}

std::string MockClient::complete(const std::string& prompt) {
  std::unique_lock lock(mu_);
  prompts_.push_back(prompt);
  if (failures_ > 0) {
    --failures_;
    throw LlmError("scripted failure");
  }
  if (auto it = by_hash_.find(prompt_hash(prompt)); it != by_hash_.end()) return it->second;
  const std::string key = task_key(prompt);
  if (auto it = by_task_.find(key); it != by_task_.end() && !it->second.empty()) {
    const std::size_t n = task_calls_[key]++;
    return it->second[std::min(n, it->second.size() - 1)];
  }
  if (responder_) {
    auto r = responder_;
    lock.unlock();
    if (auto out = r(prompt)) return *out;
    lock.lock();
  }
  if (!queue_.empty()) {
    std::string r = std::move(queue_.front());
    queue_.pop_front();
    return r;
  }
  throw LlmError("no scripted response for prompt " + hash_hex(prompt_hash(prompt)) +
                 (key.empty() ? "" : " (task " + key + ")"));
}

std::size_t MockClient::calls() const {
  std::lock_guard lock(mu_);
  return prompts_.size();
}

std::vector<std::string> MockClient::prompts() const {
  std::lock_guard lock(mu_);
  return prompts_;
}

FileMockClient::FileMockClient(std::filesystem::path dir, std::size_t budget) : dir_(std::move(dir)), budget_(budget) {
  if (!std::filesystem::is_directory(dir_)) throw LlmError("mock directory '" + dir_.string() + "' does not exist");
}

namespace {
std::optional<std::string> slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}
}  // namespace

std::string FileMockClient::complete(const std::string& prompt) {
  const std::string h = hash_hex(prompt_hash(prompt));
  const std::string key = task_key(prompt);
  std::size_t n = 0;
  {
    std::lock_guard lock(mu_);
    ++calls_;
    if (!key.empty()) n = ++task_calls_[key];
  }
  if (auto r = slurp(dir_ / (h + ".txt"))) return *r;
  if (!key.empty()) {
    if (auto r = slurp(dir_ / (key + "." + std::to_string(n) + ".txt"))) return *r;
    if (auto r = slurp(dir_ / (key + ".txt"))) return *r;
  }
  throw LlmError("no mock response in '" + dir_.string() + "' for prompt " + h +
                 (key.empty() ? "" : " (task " + key + ")"));
}

std::size_t FileMockClient::calls() const {
  std::lock_guard lock(mu_);
  return calls_;
}

}  // namespace symdiff::pipeline
