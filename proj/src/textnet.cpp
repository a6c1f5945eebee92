#include "rdcat/textnet.hpp"

#include <algorithm>
#include <map>
#include <tuple>

#include <json.hpp>

#include "rdcat/error.hpp"
#include "rdcat/text.hpp"

namespace rdcat {

namespace {

bool word_byte(unsigned char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '-' || c >= 0x80;
}

std::vector<std::string> raw_words(std::string_view text) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && !word_byte(static_cast<unsigned char>(text[i]))) ++i;
    std::size_t start = i;
    while (i < text.size() && word_byte(static_cast<unsigned char>(text[i]))) ++i;
    std::string_view chunk = text.substr(start, i - start);
    while (!chunk.empty() && chunk.front() == '-') chunk.remove_prefix(1);
    while (!chunk.empty() && chunk.back() == '-') chunk.remove_suffix(1);
    if (!chunk.empty()) out.push_back(to_lower_ascii(chunk));
  }
  return out;
}

}  // namespace

std::vector<std::string> RuleBasedTokenizer::default_stopwords() {
  return {"a",    "an",    "and",  "are",  "as",   "at",   "be",    "by",   "for",  "from", "in",
          "into", "is",    "it",   "its",  "of",   "on",   "or",    "over", "than", "that", "the",
          "their", "these", "this", "to",   "was",  "were", "which", "with", "using", "via", "during"};
}

RuleBasedTokenizer::RuleBasedTokenizer(const std::vector<std::string>& phrases,
                                       const std::vector<std::string>& stopwords) {
  for (const auto& s : stopwords)
    for (auto& w : raw_words(s)) stopwords_.insert(std::move(w));
  for (const auto& p : phrases) {
    auto all = raw_words(p);
    Phrase phrase;
    phrase.words = words(p);
    if (phrase.words.empty()) continue;
    for (std::size_t i = 0; i < all.size(); ++i) phrase.term += (i ? " " : "") + all[i];
    phrases_.push_back(std::move(phrase));
  }
  std::sort(phrases_.begin(), phrases_.end(), [](const Phrase& a, const Phrase& b) {
    if (a.words.size() != b.words.size()) return a.words.size() > b.words.size();
    return a.words < b.words;
  });
  phrases_.erase(std::unique(phrases_.begin(), phrases_.end(),
                             [](const Phrase& a, const Phrase& b) { return a.words == b.words; }),
                 phrases_.end());
}

std::vector<std::string> RuleBasedTokenizer::words(std::string_view text) const {
  auto all = raw_words(text);
  std::erase_if(all, [&](const std::string& w) { return utf8_length(w) < 2 || stopwords_.contains(w); });
  return all;
}

std::vector<std::string> RuleBasedTokenizer::tokenize(std::string_view title) const {
  auto ws = words(title);
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < ws.size()) {
    const Phrase* match = nullptr;
    for (const auto& phrase : phrases_) {
      if (phrase.words.size() > ws.size() - i) continue;
      if (std::equal(phrase.words.begin(), phrase.words.end(), ws.begin() + static_cast<std::ptrdiff_t>(i))) {
        match = &phrase;
        break;
      }
    }
    if (match) {
      out.push_back(match->term);
      i += match->words.size();
    } else {
      out.push_back(ws[i++]);
    }
  }
  return out;
}

std::vector<std::string> parse_word_list(std::string_view text) {
  std::vector<std::string> out;
  for (const auto& line : split(text, '\n')) {
    auto entry = trim(line);
    if (entry.empty() || entry.front() == '#') continue;
    out.emplace_back(entry);
  }
  return out;
}

std::vector<std::string> tokenize_title(std::string_view title, const std::vector<std::string>& phrases,
                                        const std::vector<std::string>& stopwords) {
  return RuleBasedTokenizer(phrases, stopwords).tokenize(title);
}

CooccurrenceGraph build_cooccurrence(const std::vector<std::string>& titles, const Tokenizer& tokenizer,
                                     const CooccurrenceOptions& options) {
  std::map<std::string, std::size_t> counts;
  std::map<std::pair<std::string, std::string>, std::size_t> pair_counts;
  for (const auto& title : titles) {
    auto terms = tokenizer.tokenize(title);
    std::set<std::string> unique(terms.begin(), terms.end());
    for (auto a = unique.begin(); a != unique.end(); ++a) {
      ++counts[*a];
      for (auto b = std::next(a); b != unique.end(); ++b) ++pair_counts[{*a, *b}];
    }
  }

  CooccurrenceGraph graph;
  graph.total_titles = titles.size();
  std::set<std::string> kept;
  for (const auto& [term, count] : counts) {
    if (count < options.min_count) continue;
    kept.insert(term);
    graph.nodes.push_back({term, count, static_cast<double>(count) / static_cast<double>(titles.size())});
  }
  for (const auto& [pair, co] : pair_counts)
    if (co >= options.min_co && kept.contains(pair.first) && kept.contains(pair.second))
      graph.edges.push_back({pair.first, pair.second, co});

  std::sort(graph.nodes.begin(), graph.nodes.end(), [](const GraphNode& a, const GraphNode& b) {
    return std::tie(b.count, a.term) < std::tie(a.count, b.term);
  });
  std::sort(graph.edges.begin(), graph.edges.end(), [](const GraphEdge& a, const GraphEdge& b) {
    if (a.co_count != b.co_count) return a.co_count > b.co_count;
    return std::tie(a.term_a, a.term_b) < std::tie(b.term_a, b.term_b);
  });
  return graph;
}

std::string export_graph(const CooccurrenceGraph& input) {
  CooccurrenceGraph graph = input;
  std::sort(graph.nodes.begin(), graph.nodes.end(), [](const GraphNode& a, const GraphNode& b) {
    return std::tie(b.count, a.term) < std::tie(a.count, b.term);
  });
  std::sort(graph.edges.begin(), graph.edges.end(), [](const GraphEdge& a, const GraphEdge& b) {
    if (a.co_count != b.co_count) return a.co_count > b.co_count;
    return std::tie(a.term_a, a.term_b) < std::tie(b.term_a, b.term_b);
  });

  nlohmann::ordered_json doc;
  doc["total_titles"] = graph.total_titles;
  doc["nodes"] = nlohmann::ordered_json::array();
  for (const auto& n : graph.nodes) doc["nodes"].push_back({{"term", n.term}, {"count", n.count}, {"rate", n.rate}});
  doc["edges"] = nlohmann::ordered_json::array();
  for (const auto& e : graph.edges)
    doc["edges"].push_back({{"source", e.term_a}, {"target", e.term_b}, {"count", e.co_count}});
  return doc.dump(2) + "\n";
}

CooccurrenceGraph parse_graph(std::string_view document) {
  try {
    auto doc = nlohmann::json::parse(document);
    CooccurrenceGraph graph;
    graph.total_titles = doc.at("total_titles").get<std::size_t>();
    for (const auto& n : doc.at("nodes"))
      graph.nodes.push_back({n.at("term").get<std::string>(), n.at("count").get<std::size_t>(), n.at("rate").get<double>()});
    for (const auto& e : doc.at("edges"))
      graph.edges.push_back(
          {e.at("source").get<std::string>(), e.at("target").get<std::string>(), e.at("count").get<std::size_t>()});
    return graph;
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::ParseError, std::string("graph document: ") + e.what());
  }
}

}  // namespace rdcat
