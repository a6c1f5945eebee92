#include "rdcat/fetch.hpp"

#include <cctype>
#include <fstream>
#include <unistd.h>

#include <httplib.h>
#include <openssl/evp.h>

#include "rdcat/error.hpp"
#include "rdcat/text.hpp"

namespace fs = std::filesystem;

namespace rdcat {

namespace {

std::string sha256_hex(std::string_view text) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_Digest(text.data(), text.size(), md, &len, EVP_sha256(), nullptr);
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += kHex[md[i] >> 4];
    out += kHex[md[i] & 15];
  }
  return out;
}

bool is_cache_key(const std::string& name) {
  return name.size() == 64 && name.find_first_not_of("0123456789abcdef") == std::string::npos;
}

[[noreturn]] void fail(const std::string& url, const std::string& why) {
  throw Error(Errc::UpstreamFetchFailed, url + ": " + why);
}

// "%41" style escapes in file:// paths.
std::string percent_decode(std::string_view s) {
  std::string out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '%' && i + 2 < s.size() && std::isxdigit(static_cast<unsigned char>(s[i + 1])) &&
        std::isxdigit(static_cast<unsigned char>(s[i + 2]))) {
      out += static_cast<char>(std::stoi(std::string(s.substr(i + 1, 2)), nullptr, 16));
      i += 2;
    } else {
      out += s[i];
    }
  }
  return out;
}

}  // namespace

void FetchPolicy::validate() const {
  if (timeout.count() <= 0 || max_file_bytes == 0 || max_files == 0 || max_cache_bytes == 0)
    throw Error(Errc::InvalidArgument, "fetch limits must be strictly positive");
}

FileCache::Lease::Lease(Lease&& other) noexcept { *this = std::move(other); }

FileCache::Lease& FileCache::Lease::operator=(Lease&& other) noexcept {
  if (this != &other) {
    if (cache_) cache_->release(key_);
    cache_ = std::exchange(other.cache_, nullptr);
    key_ = std::move(other.key_);
    path_ = std::move(other.path_);
    size_ = other.size_;
  }
  return *this;
}

FileCache::Lease::~Lease() {
  if (cache_) cache_->release(key_);
}

std::string FileCache::Lease::read() const { return read_file(path_.string()); }

FileCache::FileCache(FetchPolicy policy) : policy_(std::move(policy)) {
  policy_.validate();
  if (policy_.cache_dir.empty()) {
    policy_.cache_dir = fs::temp_directory_path() / ("rdcat-cache-" + std::to_string(::getpid()) + "-" +
                                                     std::to_string(reinterpret_cast<std::uintptr_t>(this)));
    owns_dir_ = true;
  }
  std::error_code ec;
  fs::create_directories(policy_.cache_dir, ec);
  if (ec) throw Error(Errc::IoError, "cannot create cache directory '" + policy_.cache_dir.string() + "'");
  // Adopt files left by an earlier process; drop partial transfers.
  for (const auto& entry : fs::directory_iterator(policy_.cache_dir)) {
    const auto name = entry.path().filename().string();
    if (!entry.is_regular_file()) continue;
    if (!is_cache_key(name)) {
      if (name.find(".part") != std::string::npos) fs::remove(entry.path(), ec);
      continue;
    }
    Entry e;
    e.size = entry.file_size();
    e.last_used = ++clock_;
    total_bytes_ += e.size;
    entries_[name] = e;
  }
  std::lock_guard lock(mutex_);
  evict_locked();
}

FileCache::~FileCache() {
  if (owns_dir_) {
    std::error_code ec;
    fs::remove_all(policy_.cache_dir, ec);
  }
}

std::uint64_t FileCache::cached_bytes() const {
  std::lock_guard lock(mutex_);
  return total_bytes_;
}

std::size_t FileCache::cached_files() const {
  std::lock_guard lock(mutex_);
  return entries_.size();
}

FileCache::Lease FileCache::fetch(const std::string& url) {
  const std::string key = sha256_hex(url);
  Lease lease;
  lease.key_ = key;
  lease.path_ = policy_.cache_dir / key;

  std::unique_lock lock(mutex_);
  in_flight_done_.wait(lock, [&] { return !in_flight_.contains(key); });
  if (auto it = entries_.find(key); it != entries_.end()) {
    ++it->second.pins;
    it->second.last_used = ++clock_;
    lease.cache_ = this;
    lease.size_ = it->second.size;
    return lease;
  }
  in_flight_.insert(key);
  lock.unlock();

  std::uint64_t size = 0;
  try {
    size = download(url, lease.path_);
  } catch (...) {
    lock.lock();
    in_flight_.erase(key);
    in_flight_done_.notify_all();
    throw;
  }

  lock.lock();
  in_flight_.erase(key);
  Entry e;
  e.size = size;
  e.last_used = ++clock_;
  e.pins = 1;
  entries_[key] = e;
  total_bytes_ += size;
  evict_locked();
  in_flight_done_.notify_all();
  lease.cache_ = this;
  lease.size_ = size;
  return lease;
}

void FileCache::release(const std::string& key) {
  std::lock_guard lock(mutex_);
  if (auto it = entries_.find(key); it != entries_.end() && it->second.pins > 0) --it->second.pins;
  evict_locked();
}

void FileCache::evict_locked() {
  while (total_bytes_ > policy_.max_cache_bytes) {
    auto victim = entries_.end();
    for (auto it = entries_.begin(); it != entries_.end(); ++it)
      if (it->second.pins == 0 && (victim == entries_.end() || it->second.last_used < victim->second.last_used))
        victim = it;
    if (victim == entries_.end()) return;  // everything pinned
    std::error_code ec;
    fs::remove(policy_.cache_dir / victim->first, ec);
    total_bytes_ -= victim->second.size;
    entries_.erase(victim);
  }
}

std::uint64_t FileCache::download(const std::string& url, const fs::path& target) {
  static std::atomic<std::uint64_t> part_counter{0};
  const fs::path part = target.string() + ".part" + std::to_string(++part_counter);
  upstream_fetches_.fetch_add(1);
  std::uint64_t received = 0;

  if (url.starts_with("file://")) {
    fs::path source = percent_decode(url.substr(7));
    std::error_code ec;
    auto size = fs::file_size(source, ec);
    if (ec) fail(url, "cannot read local file");
    if (size > policy_.max_file_bytes) fail(url, "file exceeds the size limit");
    fs::copy_file(source, part, fs::copy_options::overwrite_existing, ec);
    if (ec) fail(url, "cannot copy local file: " + ec.message());
    received = size;
  } else if (url.starts_with("http://") || url.starts_with("https://")) {
    const auto host_begin = url.find("://") + 3;
    const auto path_begin = url.find('/', host_begin);
    const std::string origin = url.substr(0, path_begin);
    const std::string path = path_begin == std::string::npos ? "/" : url.substr(path_begin);

    httplib::Client client(origin);
    const auto secs = std::chrono::duration_cast<std::chrono::seconds>(policy_.timeout);
    const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(policy_.timeout - secs);
    client.set_connection_timeout(secs.count(), usecs.count());
    client.set_read_timeout(secs.count(), usecs.count());
    client.set_follow_location(true);

    std::ofstream out(part, std::ios::binary | std::ios::trunc);
    if (!out) fail(url, "cannot write cache file");
    const auto deadline = std::chrono::steady_clock::now() + policy_.timeout;
    std::string problem;
    int status = 0;
    auto res = client.Get(
        path,
        [&](const httplib::Response& r) {
          status = r.status;
          return r.status == 200;
        },
        [&](const char* data, std::size_t n) {
          received += n;
          if (received > policy_.max_file_bytes) {
            problem = "file exceeds the size limit";
            return false;
          }
          if (std::chrono::steady_clock::now() > deadline) {
            problem = "timed out";
            return false;
          }
          out.write(data, static_cast<std::streamsize>(n));
          return static_cast<bool>(out);
        });
    out.close();
    std::error_code ec;
    if (!problem.empty() || status != 200 || !res || !out) {
      fs::remove(part, ec);
      if (!problem.empty()) fail(url, problem);
      if (status != 0 && status != 200) fail(url, "HTTP status " + std::to_string(status));
      if (!res) fail(url, httplib::to_string(res.error()));
      fail(url, "cannot write cache file");
    }
  } else {
    fail(url, "unsupported URL scheme");
  }

  std::error_code ec;
  fs::rename(part, target, ec);
  if (ec) {
    fs::remove(part, ec);
    fail(url, "cannot store cache file");
  }
  return received;
}

}  // namespace rdcat
