#pragma once

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <set>
#include <string>

namespace rdcat {

struct FetchPolicy {
  std::chrono::milliseconds timeout{std::chrono::seconds(30)};  // per file
  std::uint64_t max_file_bytes = 256ull << 20;
  std::size_t max_files = 200;  // per download request
  std::filesystem::path cache_dir;  // empty: a private directory under the system temp dir
  std::uint64_t max_cache_bytes = 2ull << 30;

  // Throws Error(InvalidArgument) unless every limit is positive.
  void validate() const;
};

// Fetch-on-demand file cache. Remote files (http://, https://, file://) are
// stored under the cache directory keyed by the SHA-256 of the URL and
// evicted least-recently-used once the total exceeds max_cache_bytes. Files
// held by a Lease are never evicted. Thread-safe; concurrent requests for
// the same URL share one upstream transfer.
class FileCache {
 public:
  class Lease {
   public:
    Lease() = default;
    Lease(Lease&&) noexcept;
    Lease& operator=(Lease&&) noexcept;
    Lease(const Lease&) = delete;
    Lease& operator=(const Lease&) = delete;
    ~Lease();

    const std::filesystem::path& path() const { return path_; }
    std::uint64_t size() const { return size_; }
    // Reads the whole file.
    std::string read() const;

   private:
    friend class FileCache;
    FileCache* cache_ = nullptr;
    std::string key_;
    std::filesystem::path path_;
    std::uint64_t size_ = 0;
  };

  explicit FileCache(FetchPolicy policy);
  ~FileCache();
  FileCache(const FileCache&) = delete;
  FileCache& operator=(const FileCache&) = delete;

  // Cache-first. Throws Error(UpstreamFetchFailed) naming the URL on
  // transport errors, non-200 responses, oversize files or timeouts.
  Lease fetch(const std::string& url);
  std::string fetch_bytes(const std::string& url) { return fetch(url).read(); }

  const FetchPolicy& policy() const { return policy_; }
  std::uint64_t upstream_fetches() const { return upstream_fetches_.load(); }
  std::uint64_t cached_bytes() const;
  std::size_t cached_files() const;

 private:
  struct Entry {
    std::uint64_t size = 0;
    std::uint64_t last_used = 0;
    int pins = 0;
  };

  void release(const std::string& key);
  void evict_locked();
  std::uint64_t download(const std::string& url, const std::filesystem::path& target);

  FetchPolicy policy_;
  bool owns_dir_ = false;
  mutable std::mutex mutex_;
  std::condition_variable in_flight_done_;
  std::set<std::string> in_flight_;
  std::map<std::string, Entry> entries_;
  std::uint64_t total_bytes_ = 0;
  std::uint64_t clock_ = 0;
  std::atomic<std::uint64_t> upstream_fetches_{0};
};

}  // namespace rdcat
