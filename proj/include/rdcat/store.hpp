#pragma once

#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>

#include "rdcat/model.hpp"

namespace rdcat {

// Per-slug access counters. Lives beside the snapshots so counts survive
// snapshot swaps; merged into records at read time.
class AccessCounter {
 public:
  std::uint64_t increment(const std::string& id);
  std::uint64_t get(const std::string& id) const;

 private:
  mutable std::mutex mutex_;
  std::unordered_map<std::string, std::uint64_t> counts_;
};

// Single-writer, multi-reader holder of the published snapshot. Readers take
// a shared_ptr and keep a consistent view for as long as they hold it.
class CatalogStore {
 public:
  CatalogStore();
  explicit CatalogStore(CatalogSnapshot initial);

  std::shared_ptr<const CatalogSnapshot> current() const;

  // Publishes `next` after a referential-integrity check and returns the new
  // version, which is strictly greater than the previous one.
  std::uint64_t swap(CatalogSnapshot next);

  // Copy-on-write single-record replacement (publishes a new version).
  std::uint64_t upsert(DatasetRecord record);

  // Record with its live access count merged in.
  std::optional<DatasetRecord> get(const std::string& id) const;

  AccessCounter& access_counter() { return counter_; }
  const AccessCounter& access_counter() const { return counter_; }

 private:
  std::uint64_t publish_locked(CatalogSnapshot next);

  mutable std::mutex read_mutex_;
  std::mutex write_mutex_;
  std::shared_ptr<const CatalogSnapshot> current_;
  AccessCounter counter_;
};

}  // namespace rdcat
