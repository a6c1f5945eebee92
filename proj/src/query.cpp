#include "rdcat/query.hpp"

#include <algorithm>
#include <limits>
#include <random>
#include <tuple>

#include "rdcat/error.hpp"
#include "rdcat/text.hpp"
#include "rdcat/textnet.hpp"

namespace rdcat {

namespace {

bool contains_folded(std::string_view haystack, std::string_view folded_needle) {
  return to_lower_ascii(haystack).find(folded_needle) != std::string::npos;
}

bool equals_folded(std::string_view a, std::string_view b) { return to_lower_ascii(a) == to_lower_ascii(b); }

// Uniform draw in [0, bound) from raw generator output.
std::uint64_t bounded(std::mt19937_64& rng, std::uint64_t bound) {
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % bound;
  for (;;) {
    std::uint64_t v = rng();
    if (v < limit) return v % bound;
  }
}

}  // namespace

bool matches_term(const DatasetRecord& record, std::string_view term, Lang lang) {
  const auto needle = to_lower_ascii(term);
  if (contains_folded(record.title.get(lang), needle) || contains_folded(record.snippet.get(lang), needle) ||
      contains_folded(record.description.get(lang), needle))
    return true;
  return std::any_of(record.keywords.begin(), record.keywords.end(),
                     [&](const std::string& k) { return contains_folded(k, needle); });
}

bool matches_chip(const DatasetRecord& record, std::string_view chip) {
  auto eq = [&](const std::string& v) { return equals_folded(v, chip); };
  return std::any_of(record.keywords.begin(), record.keywords.end(), eq) ||
         std::any_of(record.discipline.begin(), record.discipline.end(), eq);
}

bool matches(const DatasetRecord& record, const SearchQuery& query) {
  auto terms = split_whitespace(query.text);
  if (terms.empty() && query.chips.empty()) return true;
  const bool all = query.combine == Combine::AND;
  for (const auto& term : terms) {
    bool hit = matches_term(record, term, query.lang);
    if (all && !hit) return false;
    if (!all && hit) return true;
  }
  for (const auto& chip : query.chips) {
    bool hit = matches_chip(record, chip);
    if (all && !hit) return false;
    if (!all && hit) return true;
  }
  return all;
}

std::vector<DatasetRecord> sort_records(std::vector<DatasetRecord> records, const SortOrder& order, Lang lang) {
  switch (order.kind) {
    case SortOrder::Kind::random: {
      std::sort(records.begin(), records.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
      std::mt19937_64 rng(order.seed);
      for (std::size_t i = records.size(); i > 1; --i) {
        auto j = bounded(rng, i);
        std::swap(records[i - 1], records[j]);
      }
      break;
    }
    case SortOrder::Kind::access_desc:
      std::sort(records.begin(), records.end(), [](const auto& a, const auto& b) {
        if (a.access_count != b.access_count) return a.access_count > b.access_count;
        return a.id < b.id;
      });
      break;
    case SortOrder::Kind::title_asc: {
      std::vector<std::pair<std::string, std::size_t>> keys;
      keys.reserve(records.size());
      for (std::size_t i = 0; i < records.size(); ++i) keys.emplace_back(to_lower_ascii(records[i].title.get(lang)), i);
      std::sort(keys.begin(), keys.end(), [&](const auto& a, const auto& b) {
        return std::tie(a.first, records[a.second].id) < std::tie(b.first, records[b.second].id);
      });
      std::vector<DatasetRecord> out;
      out.reserve(records.size());
      for (const auto& k : keys) out.push_back(std::move(records[k.second]));
      return out;
    }
  }
  return records;
}

SearchResult search(const CatalogSnapshot& snapshot, const AccessCounter* counter, const SearchQuery& query,
                    const SortOrder& sort, std::size_t page, std::size_t page_size) {
  if (page < 1) throw Error(Errc::InvalidPage, "page must be >= 1");
  if (page_size < 1 || page_size > 100) throw Error(Errc::InvalidPage, "page_size must be within 1..100");

  std::vector<DatasetRecord> hits;
  for (const auto& [id, record] : snapshot.records) {
    if (!matches(record, query)) continue;
    hits.push_back(record);
    if (counter) hits.back().access_count = record.access_count + counter->get(id);
  }
  SearchResult result;
  result.total = hits.size();
  hits = sort_records(std::move(hits), sort, query.lang);
  const std::size_t begin = (page - 1) * page_size;
  if (page - 1 > hits.size() / page_size) return result;
  for (std::size_t i = begin; i < hits.size() && i < begin + page_size; ++i) result.items.push_back(std::move(hits[i]));
  return result;
}

std::uint64_t record_access(CatalogStore& store, const std::string& id) {
  auto snapshot = store.current();
  if (!snapshot->records.contains(id)) throw Error(Errc::UnknownDataset, "unknown dataset '" + id + "'");
  return store.access_counter().increment(id);
}

std::vector<std::string> load_chips(std::string_view text) { return parse_word_list(text); }

}  // namespace rdcat
