#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rdcat/model.hpp"
#include "rdcat/store.hpp"

namespace rdcat {

enum class Combine { AND, OR };

struct SearchQuery {
  std::string text;  // space-delimited terms
  std::vector<std::string> chips;
  Combine combine = Combine::AND;
  Lang lang = Lang::en;
};

struct SortOrder {
  enum class Kind { random, access_desc, title_asc };
  Kind kind = Kind::title_asc;
  std::uint64_t seed = 0;  // random only

  static SortOrder random(std::uint64_t seed) { return {Kind::random, seed}; }
  static SortOrder access_desc() { return {Kind::access_desc, 0}; }
  static SortOrder title_asc() { return {Kind::title_asc, 0}; }
};

struct SearchResult {
  std::size_t total = 0;
  std::vector<DatasetRecord> items;
};

bool matches_term(const DatasetRecord& record, std::string_view term, Lang lang);
bool matches_chip(const DatasetRecord& record, std::string_view chip);
bool matches(const DatasetRecord& record, const SearchQuery& query);

// Random order: records are first ordered by slug, then shuffled with
// Fisher-Yates driven by std::mt19937_64(seed), drawing index j in [0, i]
// by rejection sampling on the raw 64-bit output (no std distribution, whose
// output is implementation-defined). The permutation is therefore identical
// on every platform and process.
// access_desc: access_count descending, slug ascending.
// title_asc: ASCII case-folded title in `lang`, slug ascending.
std::vector<DatasetRecord> sort_records(std::vector<DatasetRecord> records, const SortOrder& order,
                                        Lang lang = Lang::en);

// Throws Error(InvalidPage) unless page >= 1 and 1 <= page_size <= 100.
// Records carry live access counts from `counter` when given.
SearchResult search(const CatalogSnapshot& snapshot, const AccessCounter* counter, const SearchQuery& query,
                    const SortOrder& sort, std::size_t page, std::size_t page_size);

// Increments the side-table count; Error(UnknownDataset) when the current
// snapshot has no such record.
std::uint64_t record_access(CatalogStore& store, const std::string& id);

// Chip list: plain text, one chip per line.
std::vector<std::string> load_chips(std::string_view text);

}  // namespace rdcat
