#include "symdiff/pipeline/struct_cache.hpp"

#include <fstream>
#include <json.hpp>
#include <mutex>
#include <sstream>

#include "symdiff/pipeline/llm.hpp"

namespace symdiff::pipeline {

StructCache::StructCache(const StructCache& o) : entries_(o.entries()) {}

StructCache& StructCache::operator=(const StructCache& o) {
  if (this != &o) {
    auto copy = o.entries();
    std::unique_lock lock(mu_);
    entries_ = std::move(copy);
  }
  return *this;
}

std::optional<CacheEntry> StructCache::get(const std::string& record) const {
  std::shared_lock lock(mu_);
  auto it = entries_.find(record);
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

void StructCache::put(const std::string& record, std::string text, std::string source_hash, bool translated) {
  CacheEntry e;
  e.content_hash = hash_hex(prompt_hash(text));
  e.text = std::move(text);
  e.source_hash = std::move(source_hash);
  e.translated = translated;
  std::unique_lock lock(mu_);
  entries_[record] = std::move(e);
}

std::map<std::string, CacheEntry> StructCache::entries() const {
  std::shared_lock lock(mu_);
  return entries_;
}

std::size_t StructCache::size() const {
  std::shared_lock lock(mu_);
  return entries_.size();
}

void StructCache::save(const std::filesystem::path& dir) const {
  std::filesystem::create_directories(dir);
  nlohmann::json manifest = {{"version", 1}, {"records", nlohmann::json::object()}};
  for (const auto& [name, e] : entries()) {
    std::ofstream(dir / (name + ".rs"), std::ios::binary) << e.text;
    manifest["records"][name] = {
        {"content_hash", e.content_hash}, {"source_hash", e.source_hash}, {"translated", e.translated}};
  }
  std::ofstream(dir / "manifest.json", std::ios::binary) << manifest.dump(2) << "\n";
}

StructCache StructCache::load(const std::filesystem::path& dir, std::vector<std::string>* warnings) {
  StructCache c;
  std::ifstream in(dir / "manifest.json");
  if (!in) return c;
  nlohmann::json manifest;
  try {
    manifest = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    if (warnings) warnings->push_back("struct cache manifest unreadable: " + std::string(e.what()));
    return c;
  }
  if (!manifest.contains("records") || !manifest["records"].is_object()) return c;
  for (const auto& [name, meta] : manifest["records"].items()) {
    std::ifstream f(dir / (name + ".rs"), std::ios::binary);
    std::ostringstream ss;
    ss << f.rdbuf();
    const std::string text = ss.str();
    const std::string want = meta.value("content_hash", "");
    if (!f || hash_hex(prompt_hash(text)) != want) {
      if (warnings) warnings->push_back("struct cache entry '" + name + "' is stale or missing; dropped");
      continue;
    }
    c.put(name, text, meta.value("source_hash", ""), meta.value("translated", true));
  }
  return c;
}

}  // namespace symdiff::pipeline
