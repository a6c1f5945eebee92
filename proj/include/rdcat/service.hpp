#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "rdcat/fetch.hpp"
#include "rdcat/store.hpp"

namespace httplib {
class Server;
}

namespace rdcat {

struct ServiceOptions {
  FetchPolicy fetch;
  std::vector<std::string> chips;
  std::size_t default_page_size = 20;
  // Seed for listings requested without sort/seed; std::random_device when empty.
  std::function<std::uint64_t()> seed_source;
};

// Read-only JSON API over the store's current snapshot. Each request reads
// the snapshot pointer once, so a concurrent swap never mixes versions in a
// response; every JSON body carries "snapshot_version" and every response
// an X-Snapshot-Version header.
//
//   GET /api/datasets                        q chips combine sort seed page page_size lang
//   GET /api/datasets/{id}                   lang (counts an access)
//   GET /api/datasets/{id}/available-dates   year month
//   GET /api/datasets/{id}/download          from to format=original|ascii  -> application/zip
//   GET /api/datasets/{id}/related           limit
//   GET /api/datasets/{id}/visuals           from to
//   GET /api/datasets/{id}/visuals/image     t  (timestamp; omitted for static visuals: index i)
//   GET /api/datasets/{id}/thumbnail
//   GET /api/network
//   GET /api/chips
class CatalogService {
 public:
  CatalogService(CatalogStore& store, ServiceOptions options);
  ~CatalogService();

  void register_routes(httplib::Server& server);

  FileCache& cache() { return *cache_; }
  CatalogStore& store() { return store_; }

 private:
  CatalogStore& store_;
  ServiceOptions options_;
  std::unique_ptr<FileCache> cache_;
};

}  // namespace rdcat
