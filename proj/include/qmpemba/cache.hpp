#pragma once

#include <atomic>
#include <filesystem>
#include <mutex>
#include <optional>
#include <string>

#include "qmpemba/mpemba.hpp"

namespace qmpemba {

/// Bumped whenever the cached payload or the numerics behind it change.
inline constexpr const char* kCacheVersionTag = "qmpemba-spectrum-v1";

struct CacheKey {
  std::string canonical;  ///< serialized inputs
  std::string digest;     ///< SHA-256 of `canonical`, lowercase hex
};

/// Key of a per-cell spectral summary. Epsilon and the angle grid only enter
/// the mask, so they are not part of the key.
CacheKey spectral_cache_key(const ChainParams& p);

/// Directory of key-named JSON entries holding CellSpectrum payloads.
/// Safe for concurrent use; writes go through a temporary file and a rename.
class SpectrumCache {
public:
  explicit SpectrumCache(std::filesystem::path directory);

  /// Corrupt or mismatching entries count as a miss and emit a warning.
  std::optional<CellSpectrum> lookup(const CacheKey& key);
  void store(const CacheKey& key, const CellSpectrum& payload);

  const std::filesystem::path& directory() const { return dir_; }
  std::size_t hits() const { return hits_; }
  std::size_t misses() const { return misses_; }
  std::size_t warnings() const { return warnings_; }

private:
  std::filesystem::path entry_path(const CacheKey& key) const;

  std::filesystem::path dir_;
  std::mutex write_mutex_;
  std::atomic<std::size_t> hits_{0};
  std::atomic<std::size_t> misses_{0};
  std::atomic<std::size_t> warnings_{0};
};

}  // namespace qmpemba
