#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

namespace symdiff::pipeline {

struct CacheEntry {
  std::string text;          // Rust definition, or the raw C text when untranslated
  std::string content_hash;  // of text
  std::string source_hash;   // of the struct prompt that produced it
  bool translated = true;
  friend bool operator==(const CacheEntry&, const CacheEntry&) = default;
};

/// Record name -> pre-translated definition. Reads may run concurrently.
class StructCache {
 public:
  StructCache() = default;
  StructCache(const StructCache& o);
  StructCache& operator=(const StructCache& o);

  std::optional<CacheEntry> get(const std::string& record) const;
  void put(const std::string& record, std::string text, std::string source_hash, bool translated = true);
  std::map<std::string, CacheEntry> entries() const;
  std::size_t size() const;

  /// One `<record>.rs` file per entry plus manifest.json.
  void save(const std::filesystem::path& dir) const;
  /// Entries whose file is missing or does not match its hash are dropped
  /// and listed in `warnings`. A missing directory gives an empty cache.
  static StructCache load(const std::filesystem::path& dir, std::vector<std::string>* warnings = nullptr);

 private:
  mutable std::shared_mutex mu_;
  std::map<std::string, CacheEntry> entries_;
};

}  // namespace symdiff::pipeline
