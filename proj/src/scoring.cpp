#include "rdcat/scoring.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <thread>
#include <tuple>
#include <variant>

#include "rdcat/error.hpp"
#include "rdcat/filename_template.hpp"
#include "rdcat/registry.hpp"
#include "rdcat/text.hpp"

namespace rdcat {

namespace {

// Runs task(i) for i in [0, count) on `jobs` threads. Each task writes only
// its own slot, so results do not depend on scheduling.
template <typename Task>
void parallel_for(std::size_t count, std::size_t jobs, Task&& task) {
  jobs = std::max<std::size_t>(1, std::min(jobs, count));
  if (jobs == 1) {
    for (std::size_t i = 0; i < count; ++i) task(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::jthread> workers;
  workers.reserve(jobs);
  for (std::size_t w = 0; w < jobs; ++w)
    workers.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) task(i);
    });
}

using Loaded = std::variant<std::monostate, TimeSeries, Histogram, std::string>;

}  // namespace

GranuleDataSource::GranuleDataSource(const CatalogSnapshot& snapshot, Fetch fetch)
    : snapshot_(snapshot), fetch_(std::move(fetch)), formats_(FormatRegistry::with_defaults()) {}

std::vector<std::string> GranuleDataSource::granule_urls(const DatasetConfig& config) const {
  auto tmpl = FilenameTemplate::parse(config.data_url_template);
  if (config.granularity == Granularity::static_ || !tmpl.has_time_tokens()) return {config.data_url_template};
  std::vector<std::string> urls;
  for (auto t : snapshot_.manifest_for(config).timestamps) urls.push_back(tmpl.expand(truncate_to(t, config.granularity)));
  return urls;
}

TimeSeries GranuleDataSource::series(const DatasetRecord& record, const DatasetConfig& config) const {
  if (config.score_variable.empty())
    throw Error(Errc::InvalidArgument, "config '" + config.id + "' names no score_variable");
  std::vector<std::pair<Instant, double>> samples;
  for (const auto& url : granule_urls(config)) {
    auto bytes = fetch_(url);
    auto part = extract_timeseries(formats_.read(as_bytes_view(bytes)), config.score_variable);
    for (std::size_t i = 0; i < part.times.size(); ++i) samples.emplace_back(part.times[i], part.values[i]);
  }
  if (samples.empty()) throw Error(Errc::EmptySelection, "dataset '" + record.id + "' has no granules");
  std::stable_sort(samples.begin(), samples.end(), [](const auto& a, const auto& b) { return a.first < b.first; });

  TimeSeries out;
  for (const auto& [t, v] : samples) {
    if (!out.times.empty() && t == out.times.back()) continue;
    if (std::isnan(v)) out.gaps.push_back(out.times.size());
    out.times.push_back(t);
    out.values.push_back(v);
  }
  return out;
}

Histogram GranuleDataSource::histogram(const DatasetRecord& record, const DatasetConfig& config) const {
  if (config.score_variable.empty())
    throw Error(Errc::InvalidArgument, "config '" + config.id + "' names no score_variable");
  auto urls = granule_urls(config);
  if (urls.empty()) throw Error(Errc::EmptySelection, "dataset '" + record.id + "' has no granules");
  auto bytes = fetch_(urls.front());
  auto ds = formats_.read(as_bytes_view(bytes));
  const auto* var = ds.variable(config.score_variable);
  if (!var) throw Error(Errc::NoSuchVariable, "no variable named '" + config.score_variable + "'");
  if (var->dimension_ids.size() != 1 || var->type == NcType::Char)
    throw Error(Errc::NonScalarVariable, "composition variable must be 1-D numeric");

  Histogram h;
  const std::size_t n = value_count(var->data);
  for (std::size_t i = 0; i < n; ++i) h.masses.push_back(is_fill_value(*var, i) ? 0.0 : value_as_double(var->data, i));
  const auto* coord = ds.variable(ds.dimensions[var->dimension_ids.front()].name);
  if (coord && coord != var && coord->dimension_ids == var->dimension_ids && coord->type != NcType::Char) {
    for (std::size_t i = 0; i < n; ++i) h.positions.push_back(value_as_double(coord->data, i));
  } else {
    h.positions.resize(n);
    std::iota(h.positions.begin(), h.positions.end(), 0.0);
  }
  return h;
}

double median(std::vector<double> values) {
  if (values.empty()) throw Error(Errc::InvalidArgument, "median of an empty list");
  std::sort(values.begin(), values.end());
  std::size_t mid = values.size() / 2;
  return values.size() % 2 ? values[mid] : (values[mid - 1] + values[mid]) / 2.0;
}

ScoreMatrix compute_score_matrix(const CatalogSnapshot& snapshot, const DatasetDataSource& source,
                                 const ScoringOptions& options) {
  std::vector<const DatasetRecord*> datasets;
  for (const auto& [id, record] : snapshot.records)
    if (record.data_kind == DataKind::time_series || record.data_kind == DataKind::composition)
      if (snapshot.config_for(record)) datasets.push_back(&record);

  std::vector<Loaded> loaded(datasets.size());
  parallel_for(datasets.size(), options.jobs, [&](std::size_t i) {
    const auto& record = *datasets[i];
    const auto& config = *snapshot.config_for(record);
    try {
      if (record.data_kind == DataKind::time_series)
        loaded[i] = source.series(record, config);
      else
        loaded[i] = source.histogram(record, config);
    } catch (const std::exception& e) {
      loaded[i] = std::string(e.what());
    }
  });

  struct Pair {
    std::size_t a, b;
  };
  std::vector<Pair> pairs;
  for (std::size_t a = 0; a < datasets.size(); ++a)
    for (std::size_t b = a + 1; b < datasets.size(); ++b)
      if (datasets[a]->data_kind == datasets[b]->data_kind && !std::holds_alternative<std::string>(loaded[a]) &&
          !std::holds_alternative<std::string>(loaded[b]))
        pairs.push_back({a, b});

  struct Outcome {
    std::optional<double> detail;
    std::string error;
  };
  std::vector<Outcome> outcomes(pairs.size());
  parallel_for(pairs.size(), options.jobs, [&](std::size_t k) {
    const auto& [a, b] = pairs[k];
    try {
      if (const auto* sa = std::get_if<TimeSeries>(&loaded[a])) {
        auto aligned = align_series(*sa, std::get<TimeSeries>(loaded[b]), options.alignment);
        outcomes[k].detail = pearson(aligned.x, aligned.y);
      } else {
        outcomes[k].detail = emd(std::get<Histogram>(loaded[a]), std::get<Histogram>(loaded[b]));
      }
    } catch (const std::exception& e) {
      outcomes[k].error = e.what();
    }
  });

  ScoreMatrix result;
  for (std::size_t i = 0; i < datasets.size(); ++i)
    if (const auto* err = std::get_if<std::string>(&loaded[i])) result.failures.push_back({datasets[i]->id, "", *err});

  std::vector<double> distances;
  for (std::size_t k = 0; k < pairs.size(); ++k)
    if (outcomes[k].detail && datasets[pairs[k].a]->data_kind == DataKind::composition)
      distances.push_back(*outcomes[k].detail);
  const double sigma = distances.empty() ? 0.0 : median(distances);

  for (std::size_t k = 0; k < pairs.size(); ++k) {
    const auto& a = *datasets[pairs[k].a];
    const auto& b = *datasets[pairs[k].b];
    if (!outcomes[k].detail) {
      result.failures.push_back({a.id, b.id, outcomes[k].error});
      continue;
    }
    RelatednessScore s;
    s.dataset_a = a.id;
    s.dataset_b = b.id;
    s.detail = *outcomes[k].detail;
    if (a.data_kind == DataKind::time_series) {
      s.method = ScoreMethod::pearson;
      s.score = std::abs(s.detail);
    } else {
      s.method = ScoreMethod::emd;
      // All distances zero means every composition is identical.
      s.score = sigma > 0.0 ? 1.0 / (1.0 + s.detail / sigma) : 1.0;
    }
    result.scores.push_back(std::move(s));
  }
  std::sort(result.scores.begin(), result.scores.end(), [](const auto& x, const auto& y) {
    return std::tie(x.dataset_a, x.dataset_b) < std::tie(y.dataset_a, y.dataset_b);
  });
  return result;
}

std::string format_score_table(const std::vector<RelatednessScore>& scores) {
  std::string out = "a_id\tb_id\tmethod\tscore\tdetail\n";
  for (const auto& s : scores)
    out += s.dataset_a + "\t" + s.dataset_b + "\t" + std::string(to_string(s.method)) + "\t" + format_double(s.score) +
           "\t" + format_double(s.detail) + "\n";
  return out;
}

std::vector<RelatednessScore> parse_score_table(std::string_view text) {
  std::vector<RelatednessScore> out;
  bool header = true;
  for (const auto& line : split(text, '\n')) {
    if (trim(line).empty()) continue;
    if (header) {
      header = false;
      if (line.starts_with("a_id")) continue;
    }
    auto f = split(line, '\t');
    if (f.size() != 5) throw Error(Errc::ParseError, "score table line needs 5 fields: '" + line + "'");
    RelatednessScore s;
    s.dataset_a = f[0];
    s.dataset_b = f[1];
    s.method = parse_score_method(f[2]);
    try {
      s.score = std::stod(f[3]);
      s.detail = std::stod(f[4]);
    } catch (const std::exception&) {
      throw Error(Errc::ParseError, "bad number in score table line '" + line + "'");
    }
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<RelatedEntry> top_related(const CatalogSnapshot& snapshot, std::string_view id, std::size_t k,
                                      double threshold) {
  if (k == 0) throw Error(Errc::InvalidArgument, "k must be at least 1");
  if (!(threshold >= 0.0 && threshold <= 1.0)) throw Error(Errc::InvalidArgument, "threshold must be within [0, 1]");
  if (!snapshot.records.contains(std::string(id))) throw Error(Errc::UnknownDataset, "unknown dataset '" + std::string(id) + "'");

  std::vector<RelatedEntry> out;
  for (const auto& s : snapshot.scores) {
    if (s.score < threshold) continue;
    if (s.dataset_a == id)
      out.push_back({s.dataset_b, s.score, s.method});
    else if (s.dataset_b == id)
      out.push_back({s.dataset_a, s.score, s.method});
  }
  std::sort(out.begin(), out.end(), [](const RelatedEntry& x, const RelatedEntry& y) {
    if (x.score != y.score) return x.score > y.score;
    return x.id < y.id;
  });
  if (out.size() > k) out.resize(k);
  return out;
}

}  // namespace rdcat
