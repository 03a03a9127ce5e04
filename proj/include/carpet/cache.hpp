#pragma once

// Content-addressed run cache: keys are hashes of canonical instance
// encodings, values are full run records. Write-once per key; hash
// collisions fall back to a miss through an equality check on the stored
// canonical encoding.

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>

#include <json.hpp>

#include "carpet/io.hpp"

namespace carpet {

struct RunRecord {
  std::string command;        // canonical command string
  std::string instance_hash;  // content hash of the canonical encoding
  json result;                // embedded result payload
  std::string versions;
  std::uint64_t seed = 0;
  long wall_ms = 0;
};

inline json to_json(const RunRecord& r) {
  return json{{"command", r.command}, {"instance_hash", r.instance_hash},
              {"result", r.result},   {"versions", r.versions},
              {"seed", r.seed},       {"wall_ms", r.wall_ms}};
}

// FNV-1a over the canonical encoding, twice with different offsets
inline std::string content_hash(const std::string& canonical) {
  auto fnv = [&](std::uint64_t h) {
    for (unsigned char c : canonical) {
      h ^= c;
      h *= 1099511628211ull;
    }
    return h;
  };
  char buf[33];
  std::snprintf(buf, sizeof buf, "%016llx%016llx",
                static_cast<unsigned long long>(fnv(14695981039346656037ull)),
                static_cast<unsigned long long>(fnv(0x8967a71f0e3d5c1bull)));
  return buf;
}

class RunCache {
 public:
  explicit RunCache(std::string dir) : dir_(std::move(dir)) {}

  static std::string default_dir() {
    if (const char* env = std::getenv("CARPET_CACHE_DIR")) return env;
    return ".carpet-cache";
  }

  const std::string& dir() const { return dir_; }

  // hit only when the stored canonical encoding matches exactly
  std::optional<json> lookup(const std::string& canonical, bool* corrupt = nullptr) const {
    const std::filesystem::path path = entry_path(canonical);
    if (!std::filesystem::exists(path)) return std::nullopt;
    std::ifstream in(path, std::ios::binary);
    json j = json::parse(in, nullptr, false);
    if (j.is_discarded() || !j.is_object() || !j.contains("key") || !j.contains("record")) {
      if (corrupt) *corrupt = true;
      return std::nullopt;
    }
    if (j["key"].get<std::string>() != canonical) return std::nullopt;  // hash collision
    return j["record"];
  }

  void store(const std::string& canonical, const json& record) const {
    std::filesystem::create_directories(dir_);
    const json wrapper{{"key", canonical}, {"record", record}};
    std::ofstream out(entry_path(canonical), std::ios::binary | std::ios::trunc);
    out << wrapper.dump();
  }

  // removes every cache entry; returns the number of files dropped
  std::size_t clear() const {
    std::size_t n = 0;
    if (!std::filesystem::exists(dir_)) return 0;
    for (const auto& entry : std::filesystem::directory_iterator(dir_)) {
      if (entry.path().extension() == ".json") {
        std::filesystem::remove(entry.path());
        ++n;
      }
    }
    return n;
  }

 private:
  std::filesystem::path entry_path(const std::string& canonical) const {
    return std::filesystem::path(dir_) / (content_hash(canonical) + ".json");
  }

  std::string dir_;
};

}  // namespace carpet
