// rdcat: operator tool for the offline catalog pipeline and the API server.
//
//   rdcat ingest <metadata-dir> <config-dir> --out <snapshot-dir>
//   rdcat score --snapshot <dir> [--threshold r] [--jobs n] [--export scores.tsv]
//   rdcat textnet --snapshot <dir> [--min-count k] [--min-co k] [--phrases f] [--stopwords f]
//   rdcat convert <file.nc> [--ascii out.txt] [--var name]... [--delimiter c]
//   rdcat serve --snapshot <dir> --listen <host:port>
//
// Exit status: 0 success, 1 partial failure, 2 fatal. Failures are reported
// on stderr as one JSON document.

#include <atomic>
#include <csignal>
#include <filesystem>
#include <iostream>
#include <thread>

#include <CLI11.hpp>
#include <httplib.h>
#include <json.hpp>

#include "rdcat/convert.hpp"
#include "rdcat/error.hpp"
#include "rdcat/fetch.hpp"
#include "rdcat/ingest.hpp"
#include "rdcat/netcdf.hpp"
#include "rdcat/query.hpp"
#include "rdcat/scoring.hpp"
#include "rdcat/service.hpp"
#include "rdcat/snapshot_io.hpp"
#include "rdcat/store.hpp"
#include "rdcat/text.hpp"
#include "rdcat/textnet.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

constexpr int kOk = 0;
constexpr int kPartial = 1;
constexpr int kFatal = 2;

void report(std::string_view status, const ordered_json& errors) {
  ordered_json doc;
  doc["status"] = status;
  doc["errors"] = errors;
  std::cerr << doc.dump(2) << "\n";
}

ordered_json error_json(const std::string& subject, std::string_view code, const std::string& message) {
  return {{"file", subject}, {"code", code}, {"message", message}};
}

int fatal(const std::exception& e) {
  std::string code = "Error";
  std::string message = e.what();
  if (const auto* err = dynamic_cast<const rdcat::Error*>(&e)) {
    code = rdcat::to_string(err->code());
    message = err->detail();
  }
  report("fatal", ordered_json::array({{{"code", code}, {"message", message}}}));
  return kFatal;
}

// Version of an existing snapshot at `dir`, or 0.
std::uint64_t previous_version(const fs::path& dir) {
  try {
    auto index = nlohmann::json::parse(rdcat::read_file((dir / "index.json").string()));
    return index.at("version").get<std::uint64_t>();
  } catch (const std::exception&) {
    return 0;
  }
}

std::vector<std::string> read_list(const std::string& path) { return rdcat::parse_word_list(rdcat::read_file(path)); }

struct IngestArgs {
  std::string metadata_dir, config_dir, out;
  std::vector<std::string> kinds;
};

int run_ingest(const IngestArgs& a) {
  rdcat::IngestOptions options;
  for (const auto& k : a.kinds) {
    auto eq = k.find('=');
    if (eq == std::string::npos) throw rdcat::Error(rdcat::Errc::InvalidArgument, "--kind expects ID=KIND, got '" + k + "'");
    options.kind_overrides[k.substr(0, eq)] = rdcat::parse_data_kind(k.substr(eq + 1));
  }
  auto ingested = rdcat::ingest_directory(a.metadata_dir, options);
  auto configs = rdcat::load_config_directory(a.config_dir);

  std::vector<rdcat::FileError> errors = ingested.errors;
  errors.insert(errors.end(), configs.errors.begin(), configs.errors.end());
  auto snapshot = rdcat::assemble_snapshot(std::move(ingested.records), std::move(configs), errors);
  snapshot.version = previous_version(a.out) + 1;
  rdcat::write_snapshot(snapshot, a.out);

  std::cout << "ingested " << snapshot.records.size() << " records, " << snapshot.configs.size() << " configs into "
            << a.out << "\n";
  if (errors.empty()) return kOk;
  ordered_json list = ordered_json::array();
  for (const auto& e : errors) list.push_back(error_json(e.file, rdcat::to_string(e.code), e.message));
  report("partial", list);
  return kPartial;
}

struct ScoreArgs {
  std::string snapshot, export_path, cache_dir;
  std::optional<double> threshold;
  std::optional<std::size_t> top_k;
  std::size_t jobs = 1;
  double cadence_seconds = 60;
  std::size_t min_overlap = 16;
  std::string aggregation = "mean";
};

int run_score(const ScoreArgs& a) {
  auto snapshot = rdcat::read_snapshot(a.snapshot);
  if (a.threshold) snapshot.settings.related_threshold = *a.threshold;
  if (a.top_k) snapshot.settings.related_top_k = *a.top_k;
  if (!(snapshot.settings.related_threshold >= 0.0 && snapshot.settings.related_threshold <= 1.0))
    throw rdcat::Error(rdcat::Errc::InvalidArgument, "--threshold must be within [0, 1]");

  rdcat::FetchPolicy policy;
  if (!a.cache_dir.empty()) policy.cache_dir = a.cache_dir;
  rdcat::FileCache cache(policy);
  rdcat::GranuleDataSource source(snapshot, [&](const std::string& url) { return cache.fetch_bytes(url); });

  rdcat::ScoringOptions options;
  options.jobs = std::max<std::size_t>(1, a.jobs);
  options.alignment.cadence = std::chrono::microseconds(static_cast<std::int64_t>(a.cadence_seconds * 1e6));
  options.alignment.min_overlap_points = a.min_overlap;
  options.alignment.aggregation = a.aggregation == "nearest" ? rdcat::Aggregation::nearest : rdcat::Aggregation::mean;
  auto matrix = rdcat::compute_score_matrix(snapshot, source, options);

  snapshot.scores = matrix.scores;
  snapshot.version += 1;
  rdcat::write_snapshot(snapshot, a.snapshot);
  if (!a.export_path.empty()) {
    auto table = rdcat::format_score_table(matrix.scores);
    if (a.export_path == "-")
      std::cout << table;
    else
      rdcat::write_file(a.export_path, table);
  }
  std::cerr << "scored " << matrix.scores.size() << " pairs\n";
  if (!matrix.failures.empty()) {
    ordered_json list = ordered_json::array();
    for (const auto& f : matrix.failures)
      list.push_back({{"dataset_a", f.dataset_a}, {"dataset_b", f.dataset_b}, {"message", f.reason}});
    report("skipped", list);
  }
  return kOk;
}

struct TextnetArgs {
  std::string snapshot, phrases, stopwords, export_path;
  std::size_t min_count = 2, min_co = 2;
};

int run_textnet(const TextnetArgs& a) {
  auto snapshot = rdcat::read_snapshot(a.snapshot);
  auto phrases = a.phrases.empty() ? std::vector<std::string>{} : read_list(a.phrases);
  auto stopwords = a.stopwords.empty() ? rdcat::RuleBasedTokenizer::default_stopwords() : read_list(a.stopwords);
  rdcat::RuleBasedTokenizer tokenizer(phrases, stopwords);

  std::vector<std::string> titles;
  for (const auto& [id, record] : snapshot.records) titles.push_back(record.title.en);
  snapshot.graph = rdcat::build_cooccurrence(titles, tokenizer, {a.min_count, a.min_co});
  snapshot.version += 1;
  rdcat::write_snapshot(snapshot, a.snapshot);
  if (!a.export_path.empty()) {
    auto doc = rdcat::export_graph(snapshot.graph);
    if (a.export_path == "-")
      std::cout << doc;
    else
      rdcat::write_file(a.export_path, doc);
  }
  std::cerr << "graph: " << snapshot.graph.nodes.size() << " nodes, " << snapshot.graph.edges.size() << " edges\n";
  return kOk;
}

struct ConvertArgs {
  std::string input, ascii;
  std::vector<std::string> variables;
  std::string delimiter = ",";
};

int run_convert(const ConvertArgs& a) {
  if (a.delimiter.size() != 1) throw rdcat::Error(rdcat::Errc::InvalidArgument, "--delimiter must be one character");
  auto dataset = rdcat::FormatRegistry::with_defaults().read(rdcat::as_bytes_view(rdcat::read_file(a.input)));
  rdcat::AsciiOptions options;
  options.variables = a.variables;
  options.delimiter = a.delimiter[0];
  auto text = rdcat::to_ascii(dataset, options);
  if (a.ascii.empty() || a.ascii == "-")
    std::cout << text;
  else
    rdcat::write_file(a.ascii, text);
  return kOk;
}

struct ServeArgs {
  std::string snapshot, listen = "127.0.0.1:8080", cache_dir, chips;
  std::uint64_t cache_max_mb = 2048;
  double reload_seconds = 5;
};

std::atomic<httplib::Server*> g_server{nullptr};

int run_serve(const ServeArgs& a) {
  auto colon = a.listen.rfind(':');
  if (colon == std::string::npos) throw rdcat::Error(rdcat::Errc::InvalidArgument, "--listen expects HOST:PORT");
  const std::string host = a.listen.substr(0, colon);
  const int port = std::stoi(a.listen.substr(colon + 1));

  rdcat::CatalogStore store(rdcat::read_snapshot(a.snapshot));
  rdcat::ServiceOptions options;
  if (!a.cache_dir.empty()) options.fetch.cache_dir = a.cache_dir;
  options.fetch.max_cache_bytes = a.cache_max_mb << 20;
  if (!a.chips.empty()) options.chips = read_list(a.chips);
  rdcat::CatalogService service(store, options);

  httplib::Server server;
  service.register_routes(server);
  g_server = &server;
  std::signal(SIGINT, [](int) {
    if (auto* s = g_server.load()) s->stop();
  });
  std::signal(SIGTERM, [](int) {
    if (auto* s = g_server.load()) s->stop();
  });

  // Picks up snapshots re-written by ingest/score/textnet.
  std::jthread reloader([&](std::stop_token stop) {
    if (a.reload_seconds <= 0) return;
    auto seen = previous_version(a.snapshot);
    while (!stop.stop_requested()) {
      for (int i = 0; i < static_cast<int>(a.reload_seconds * 10) && !stop.stop_requested(); ++i)
        std::this_thread::sleep_for(std::chrono::milliseconds(100));
      auto now = previous_version(a.snapshot);
      if (now == seen) continue;
      try {
        store.swap(rdcat::read_snapshot(a.snapshot));
        seen = now;
        std::cerr << "loaded snapshot version " << now << "\n";
      } catch (const std::exception& e) {
        std::cerr << "snapshot reload failed: " << e.what() << "\n";
      }
    }
  });

  std::cerr << "listening on " << host << ":" << port << "\n";
  if (!server.listen(host, port)) throw rdcat::Error(rdcat::Errc::IoError, "cannot listen on " + a.listen);
  g_server = nullptr;
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Research-data catalog pipeline and API server"};
  app.require_subcommand(1);

  IngestArgs ingest;
  auto* ingest_cmd = app.add_subcommand("ingest", "Parse metadata + dataset configs into a snapshot");
  ingest_cmd->add_option("metadata_dir", ingest.metadata_dir, "Directory of SPASE / ISO 19115 XML files")->required();
  ingest_cmd->add_option("config_dir", ingest.config_dir, "Directory of per-dataset YAML configs")->required();
  ingest_cmd->add_option("--out", ingest.out, "Snapshot directory to write")->required();
  ingest_cmd->add_option("--kind", ingest.kinds, "data_kind override, ID=KIND (repeatable)");

  ScoreArgs score;
  auto* score_cmd = app.add_subcommand("score", "Compute relatedness scores into a snapshot");
  score_cmd->add_option("--snapshot", score.snapshot, "Snapshot directory")->required();
  score_cmd->add_option("--threshold", score.threshold, "Related-dataset threshold stored in the snapshot");
  score_cmd->add_option("--top-k", score.top_k, "Related-dataset list length stored in the snapshot");
  score_cmd->add_option("--jobs", score.jobs, "Worker threads");
  score_cmd->add_option("--export", score.export_path, "Also write the score table (TSV); '-' for stdout");
  score_cmd->add_option("--cadence", score.cadence_seconds, "Alignment cadence in seconds");
  score_cmd->add_option("--min-overlap", score.min_overlap, "Minimum aligned points per pair");
  score_cmd->add_option("--aggregation", score.aggregation, "mean or nearest")->check(CLI::IsMember({"mean", "nearest"}));
  score_cmd->add_option("--cache-dir", score.cache_dir, "Granule cache directory");

  TextnetArgs textnet;
  auto* textnet_cmd = app.add_subcommand("textnet", "Build the title co-occurrence graph into a snapshot");
  textnet_cmd->add_option("--snapshot", textnet.snapshot, "Snapshot directory")->required();
  textnet_cmd->add_option("--min-count", textnet.min_count, "Minimum titles per term");
  textnet_cmd->add_option("--min-co", textnet.min_co, "Minimum titles per term pair");
  textnet_cmd->add_option("--phrases", textnet.phrases, "Phrase dictionary, one per line");
  textnet_cmd->add_option("--stopwords", textnet.stopwords, "Stopword list, one per line (replaces the built-in list)");
  textnet_cmd->add_option("--export", textnet.export_path, "Also write the graph document; '-' for stdout");

  ConvertArgs convert;
  auto* convert_cmd = app.add_subcommand("convert", "Convert a NetCDF classic file to delimited text");
  convert_cmd->add_option("input", convert.input, "NetCDF file")->required();
  convert_cmd->add_option("--ascii", convert.ascii, "Output file (stdout when omitted)");
  convert_cmd->add_option("--var", convert.variables, "Variable to include (repeatable)");
  convert_cmd->add_option("--delimiter", convert.delimiter, "Field delimiter");

  ServeArgs serve;
  auto* serve_cmd = app.add_subcommand("serve", "Serve the catalog API");
  serve_cmd->add_option("--snapshot", serve.snapshot, "Snapshot directory")->required();
  serve_cmd->add_option("--listen", serve.listen, "HOST:PORT");
  serve_cmd->add_option("--cache-dir", serve.cache_dir, "Download cache directory");
  serve_cmd->add_option("--cache-max-mb", serve.cache_max_mb, "Download cache size limit");
  serve_cmd->add_option("--chips", serve.chips, "Preset search chips, one per line");
  serve_cmd->add_option("--reload-interval", serve.reload_seconds, "Seconds between snapshot checks; 0 disables");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    app.exit(e);
    return kFatal;
  }

  try {
    if (*ingest_cmd) return run_ingest(ingest);
    if (*score_cmd) return run_score(score);
    if (*textnet_cmd) return run_textnet(textnet);
    if (*convert_cmd) return run_convert(convert);
    if (*serve_cmd) return run_serve(serve);
  } catch (const std::exception& e) {
    return fatal(e);
  }
  return kFatal;
}
