#pragma once

#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "rdcat/model.hpp"

namespace rdcat {

// Turns a title into terms. Implementations must be thread-safe.
class Tokenizer {
 public:
  virtual ~Tokenizer() = default;
  virtual std::vector<std::string> tokenize(std::string_view title) const = 0;
};

// Dictionary/stopword driven tokenizer:
//  1. split on anything but ASCII letters, digits, '-' and non-ASCII bytes;
//     hyphens survive only inside a word; ASCII is lowercased
//  2. drop stopwords and words shorter than 2 characters
//  3. greedily replace the longest run of words spelling a dictionary phrase
//     (after the same normalisation) with the phrase as one term
class RuleBasedTokenizer final : public Tokenizer {
 public:
  RuleBasedTokenizer() = default;
  RuleBasedTokenizer(const std::vector<std::string>& phrases, const std::vector<std::string>& stopwords);

  std::vector<std::string> tokenize(std::string_view title) const override;

  // Built-in English stopword list.
  static std::vector<std::string> default_stopwords();

 private:
  std::vector<std::string> words(std::string_view text) const;

  struct Phrase {
    std::vector<std::string> words;
    std::string term;
  };
  std::vector<Phrase> phrases_;  // longest first
  std::set<std::string> stopwords_;
};

// Plain-text list: one entry per line; blank lines and '#' comments skipped.
std::vector<std::string> parse_word_list(std::string_view text);

std::vector<std::string> tokenize_title(std::string_view title, const std::vector<std::string>& phrases,
                                        const std::vector<std::string>& stopwords);

struct CooccurrenceOptions {
  std::size_t min_count = 2;
  std::size_t min_co = 2;
};

// Per-title term sets; nodes with count >= min_count, edges between kept
// nodes with co_count >= min_co. Nodes and edges come back in export order.
CooccurrenceGraph build_cooccurrence(const std::vector<std::string>& titles, const Tokenizer& tokenizer,
                                     const CooccurrenceOptions& options = {});

// JSON document:
//   {"total_titles": N,
//    "nodes": [{"term": t, "count": c, "rate": r}, ...],
//    "edges": [{"source": a, "target": b, "count": c}, ...]}
// nodes by count desc then term asc; edges by count desc then (a, b) asc.
std::string export_graph(const CooccurrenceGraph& graph);
CooccurrenceGraph parse_graph(std::string_view document);

}  // namespace rdcat
