#pragma once

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "rdcat/model.hpp"
#include "rdcat/netcdf.hpp"

namespace httplib {
class Server;
}

namespace testing_support {

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }
  // Writes `content` to a path relative to the directory, creating parents.
  std::filesystem::path write(const std::string& relative, const std::string& content) const;

 private:
  std::filesystem::path path_;
};

std::string fixture_path(const std::string& relative);
std::string read_fixture(const std::string& relative);

// Minimal NetCDF classic (CDF-1) encoder written straight from the format
// description, used to build fixtures the reader has never seen. A dimension
// of length 0 is the record dimension; its record count is `numrecs`.
struct NcAttr {
  std::string name;
  rdcat::NcType type = rdcat::NcType::Char;
  std::string text;
  std::vector<double> values;
};

struct NcVar {
  std::string name;
  std::vector<std::size_t> dims;
  rdcat::NcType type = rdcat::NcType::Double;
  std::vector<NcAttr> attrs;
  std::vector<double> values;  // row-major, every record
};

struct NcFile {
  std::vector<std::pair<std::string, std::size_t>> dims;
  std::size_t numrecs = 0;
  std::vector<NcAttr> attrs;
  std::vector<NcVar> vars;
};

std::string encode_netcdf(const NcFile& file);

// One-variable time series file: "time" in seconds since `epoch` plus `name`.
std::string series_netcdf(const std::string& name, const std::string& epoch, const std::vector<double>& seconds,
                          const std::vector<double>& values);

// Composition file: "bin" coordinate plus `name` masses over it.
std::string composition_netcdf(const std::string& name, const std::vector<double>& positions,
                               const std::vector<double>& masses);

struct SpaseDoc {
  std::string resource_id = "spase://IUGONET/NumericalData/Test/mag";
  std::optional<std::string> title = "Syowa magnetometer";
  std::optional<std::string> title_ja;
  std::optional<std::string> description;
  std::string resource_type = "NumericalData";
  std::string start = "2019-01-01T00:00:00Z";
  std::string stop = "2019-12-31T00:00:00Z";
  std::vector<std::pair<std::string, std::string>> contacts;  // person, role
  std::vector<std::string> keywords;
  std::string measurement_type;
};
std::string spase_xml(const SpaseDoc& doc);

struct IsoDoc {
  std::string file_identifier = "jp.nipr.test.0001";
  std::optional<std::string> title = "Adelie penguin specimen";
  std::optional<std::string> title_ja;
  std::optional<std::string> abstract;
  std::optional<std::string> begin;
  std::optional<std::string> end;
  std::optional<std::string> site;
  std::vector<std::string> keywords;
  std::string topic;
  std::string contact_name;
};
std::string iso_xml(const IsoDoc& doc);

// HTTP file server on 127.0.0.1 with per-path hit counters.
class StubServer {
 public:
  StubServer();
  ~StubServer();
  StubServer(const StubServer&) = delete;
  StubServer& operator=(const StubServer&) = delete;

  void put(const std::string& path, std::string content);
  std::string url(const std::string& path) const;
  int port() const { return port_; }
  std::uint64_t hits() const { return hits_.load(); }
  std::uint64_t hits(const std::string& path) const;

 private:
  std::unique_ptr<httplib::Server> server_;
  std::thread thread_;
  int port_ = 0;
  mutable std::mutex mutex_;
  std::map<std::string, std::string> files_;
  std::map<std::string, std::uint64_t> per_path_;
  std::atomic<std::uint64_t> hits_{0};
};

// Synthetic corpus for the scoring engine: `series` daily time-series
// datasets (mixed 1- and 5-minute cadences) and `compositions` static
// composition datasets, with their granule bytes keyed by URL.
struct ScoreCorpus {
  rdcat::CatalogSnapshot snapshot;
  std::map<std::string, std::string> files;
};
ScoreCorpus make_score_corpus(std::size_t series, std::size_t compositions, std::uint64_t seed);

// Catalog of `n` records with titles, descriptions, keywords and discipline
// tags drawn from a small vocabulary (some Japanese titles), each with its
// own config.
rdcat::CatalogSnapshot make_search_corpus(std::size_t n, std::uint64_t seed);
extern const std::vector<std::string> kSearchVocabulary;
extern const std::vector<std::string> kSearchChips;

// Writes `spase` SPASE and `iso` ISO 19115 documents under <root>/metadata
// and one YAML config per document (with a manifest for time series) under
// <root>/configs. Configs link by source_id for even indices and by slug for
// odd ones.
void write_ingest_corpus(const std::filesystem::path& root, std::size_t spase, std::size_t iso);

// Extracts `archive` with Python's zipfile (CRC-checked). ok is false when
// the extractor rejects the archive.
struct Unzipped {
  bool ok = false;
  std::vector<std::string> names;
  std::vector<std::string> contents;
};
Unzipped python_unzip(const std::string& archive);

// Record and matching config that pass validate_record.
rdcat::DatasetRecord make_record(const std::string& id, const std::string& title);
rdcat::DatasetConfig make_config(const std::string& id, rdcat::Granularity granularity = rdcat::Granularity::daily);

}  // namespace testing_support
