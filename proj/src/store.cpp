#include "rdcat/store.hpp"

#include <algorithm>

#include "rdcat/error.hpp"

namespace rdcat {

std::uint64_t AccessCounter::increment(const std::string& id) {
  std::lock_guard lock(mutex_);
  return ++counts_[id];
}

std::uint64_t AccessCounter::get(const std::string& id) const {
  std::lock_guard lock(mutex_);
  auto it = counts_.find(id);
  return it == counts_.end() ? 0 : it->second;
}

CatalogStore::CatalogStore() : current_(std::make_shared<const CatalogSnapshot>()) {}

CatalogStore::CatalogStore(CatalogSnapshot initial) : CatalogStore() { swap(std::move(initial)); }

std::shared_ptr<const CatalogSnapshot> CatalogStore::current() const {
  std::lock_guard lock(read_mutex_);
  return current_;
}

std::uint64_t CatalogStore::swap(CatalogSnapshot next) {
  check_integrity(next);
  std::lock_guard writer(write_mutex_);
  return publish_locked(std::move(next));
}

std::uint64_t CatalogStore::upsert(DatasetRecord record) {
  std::lock_guard writer(write_mutex_);
  CatalogSnapshot next = *current();
  std::string id = record.id;
  next.records.insert_or_assign(std::move(id), std::move(record));
  check_integrity(next);
  return publish_locked(std::move(next));
}

std::uint64_t CatalogStore::publish_locked(CatalogSnapshot next) {
  next.version = std::max(current()->version + 1, next.version);
  auto published = std::make_shared<const CatalogSnapshot>(std::move(next));
  std::lock_guard lock(read_mutex_);
  current_ = published;
  return published->version;
}

std::optional<DatasetRecord> CatalogStore::get(const std::string& id) const {
  auto snapshot = current();
  auto it = snapshot->records.find(id);
  if (it == snapshot->records.end()) return std::nullopt;
  DatasetRecord out = it->second;
  out.access_count += counter_.get(id);
  return out;
}

}  // namespace rdcat
