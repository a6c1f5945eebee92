#pragma once

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rdcat/emd.hpp"
#include "rdcat/model.hpp"
#include "rdcat/netcdf.hpp"
#include "rdcat/relatedness.hpp"

namespace rdcat {

// Supplies the numeric content of a dataset to the scoring engine.
class DatasetDataSource {
 public:
  virtual ~DatasetDataSource() = default;
  // Implementations may throw; the failure is recorded against the dataset.
  virtual TimeSeries series(const DatasetRecord& record, const DatasetConfig& config) const = 0;
  virtual Histogram histogram(const DatasetRecord& record, const DatasetConfig& config) const = 0;
};

// Reads granules through `fetch` (URL -> bytes) and decodes them with the
// format registry. Time series concatenate every manifest granule of the
// config's score_variable; composition histograms come from the first
// granule, with masses from score_variable and positions from the coordinate
// variable of its dimension (bin indices when there is none).
class GranuleDataSource final : public DatasetDataSource {
 public:
  using Fetch = std::function<std::string(const std::string& url)>;

  GranuleDataSource(const CatalogSnapshot& snapshot, Fetch fetch);

  TimeSeries series(const DatasetRecord& record, const DatasetConfig& config) const override;
  Histogram histogram(const DatasetRecord& record, const DatasetConfig& config) const override;

 private:
  std::vector<std::string> granule_urls(const DatasetConfig& config) const;

  const CatalogSnapshot& snapshot_;
  Fetch fetch_;
  FormatRegistry formats_;
};

struct ScoringOptions {
  AlignmentSpec alignment;
  std::size_t jobs = 1;
};

struct ScoreFailure {
  std::string dataset_a;
  std::string dataset_b;  // empty when loading dataset_a itself failed
  std::string reason;
};

struct ScoreMatrix {
  std::vector<RelatednessScore> scores;  // sorted by (dataset_a, dataset_b)
  std::vector<ScoreFailure> failures;
};

// Pearson (score |r|) for every pair of time-series datasets and EMD (score
// 1 / (1 + d / sigma), sigma the median pairwise distance) for every pair of
// composition datasets. Pair failures are reported, never fatal. Output is
// identical for any value of options.jobs.
ScoreMatrix compute_score_matrix(const CatalogSnapshot& snapshot, const DatasetDataSource& source,
                                 const ScoringOptions& options = {});

// Tab-separated "a_id b_id method score detail" lines with a header row.
std::string format_score_table(const std::vector<RelatednessScore>& scores);
std::vector<RelatednessScore> parse_score_table(std::string_view text);

struct RelatedEntry {
  std::string id;
  double score = 0.0;
  ScoreMethod method = ScoreMethod::pearson;
  friend bool operator==(const RelatedEntry&, const RelatedEntry&) = default;
};

// Neighbours with score >= threshold, by score descending then id
// ascending, at most k. Throws Error(UnknownDataset) or
// Error(InvalidArgument) for k == 0 or threshold outside [0, 1].
std::vector<RelatedEntry> top_related(const CatalogSnapshot& snapshot, std::string_view id, std::size_t k = 10,
                                      double threshold = 0.7);

double median(std::vector<double> values);

}  // namespace rdcat
