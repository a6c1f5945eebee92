#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <sys/wait.h>

#include <json.hpp>

#include "rdcat/scoring.hpp"
#include "rdcat/snapshot_io.hpp"
#include "rdcat/text.hpp"
#include "rdcat/textnet.hpp"
#include "test_support.hpp"

using namespace rdcat;
using testing_support::TempDir;
namespace fs = std::filesystem;

namespace {

struct Run {
  int status = -1;
  std::string out;
  std::string err;
};

Run run_cli(const TempDir& dir, const std::string& args) {
  const auto out = dir / "stdout.txt", err = dir / "stderr.txt";
  const std::string cmd = std::string(RDCAT_CLI_PATH) + " " + args + " >" + out.string() + " 2>" + err.string();
  const int raw = std::system(cmd.c_str());
  Run r;
  r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  r.out = read_file(out.string());
  r.err = read_file(err.string());
  return r;
}

// Writes the corpus granules to disk and points the configs at them.
CatalogSnapshot local_score_corpus(const TempDir& dir, std::size_t series, std::size_t compositions) {
  const std::string remote = "https://data.example/";
  auto corpus = testing_support::make_score_corpus(series, compositions, 5);
  const std::string local = "file://" + (dir / "granules").string() + "/";
  for (const auto& [url, bytes] : corpus.files) dir.write("granules/" + url.substr(remote.size()), bytes);
  for (auto& [id, config] : corpus.snapshot.configs)
    config.data_url_template = local + config.data_url_template.substr(remote.size());
  return corpus.snapshot;
}

}  // namespace

TEST(Cli, IngestValidCorpus) {
  TempDir dir;
  testing_support::write_ingest_corpus(dir.path(), 2, 1);
  auto run = run_cli(dir, "ingest " + (dir / "metadata").string() + " " + (dir / "configs").string() + " --out " +
                              (dir / "snap").string());
  EXPECT_EQ(run.status, 0) << run.err;
  auto snap = read_snapshot(dir / "snap");
  EXPECT_EQ(snap.records.size(), 3u);
  EXPECT_EQ(snap.version, 1u);
  run = run_cli(dir, "ingest " + (dir / "metadata").string() + " " + (dir / "configs").string() + " --out " +
                         (dir / "snap").string());
  EXPECT_EQ(read_snapshot(dir / "snap").version, 2u);
}

TEST(Cli, IngestPartialFailureExitsOne) {
  TempDir dir;
  testing_support::write_ingest_corpus(dir.path(), 2, 1);
  dir.write("metadata/spase/broken.xml", "<Spase xmlns=\"http://www.spase-group.org/data/schema\">");
  auto run = run_cli(dir, "ingest " + (dir / "metadata").string() + " " + (dir / "configs").string() + " --out " +
                              (dir / "snap").string());
  EXPECT_EQ(run.status, 1);
  auto report = nlohmann::json::parse(run.err);
  EXPECT_EQ(report["status"], "partial");
  ASSERT_EQ(report["errors"].size(), 1u);
  EXPECT_NE(report["errors"][0]["file"].get<std::string>().find("broken.xml"), std::string::npos);
  EXPECT_EQ(report["errors"][0]["code"], "XmlError");
  EXPECT_EQ(read_snapshot(dir / "snap").records.size(), 3u);
}

TEST(Cli, FatalErrorsExitTwo) {
  TempDir dir;
  auto run = run_cli(dir, "ingest " + (dir / "nothing").string() + " " + (dir / "nothing").string() + " --out " +
                              (dir / "snap").string());
  EXPECT_EQ(run.status, 2);
  EXPECT_EQ(nlohmann::json::parse(run.err)["status"], "fatal");
  EXPECT_EQ(run_cli(dir, "score --snapshot " + (dir / "nothing").string()).status, 2);
  EXPECT_EQ(run_cli(dir, "frobnicate").status, 2);
  EXPECT_EQ(run_cli(dir, "convert " + (dir / "missing.nc").string()).status, 2);
}

TEST(Cli, ScoreIsIdenticalForAnyJobCount) {
  TempDir dir;
  auto snap = local_score_corpus(dir, 8, 4);
  write_snapshot(snap, dir / "one");
  write_snapshot(snap, dir / "eight");
  auto one = run_cli(dir, "score --snapshot " + (dir / "one").string() + " --jobs 1 --export " +
                              (dir / "one.tsv").string() + " --cache-dir " + (dir / "cache1").string());
  auto eight = run_cli(dir, "score --snapshot " + (dir / "eight").string() + " --jobs 8 --export " +
                                (dir / "eight.tsv").string() + " --cache-dir " + (dir / "cache8").string());
  ASSERT_EQ(one.status, 0) << one.err;
  ASSERT_EQ(eight.status, 0) << eight.err;
  const auto a = read_file((dir / "one.tsv").string());
  EXPECT_EQ(a, read_file((dir / "eight.tsv").string()));
  EXPECT_EQ(a, read_file((dir / "one" / "scores.tsv").string()));
  EXPECT_EQ(read_file((dir / "one" / "scores.tsv").string()), read_file((dir / "eight" / "scores.tsv").string()));
  // 8 series -> 28 pairs, 4 compositions -> 6 pairs.
  EXPECT_EQ(parse_score_table(a).size(), 34u);
  EXPECT_EQ(read_snapshot(dir / "one").version, snap.version + 1);
}

TEST(Cli, TextnetExportMatchesLibrary) {
  TempDir dir;
  auto snap = testing_support::make_search_corpus(40, 9);
  write_snapshot(snap, dir / "snap");
  dir.write("phrases.txt", "# dictionary\nSyowa Station\ncosmic noise absorption\n");
  auto run = run_cli(dir, "textnet --snapshot " + (dir / "snap").string() + " --phrases " +
                              (dir / "phrases.txt").string() + " --export -");
  ASSERT_EQ(run.status, 0) << run.err;
  std::vector<std::string> titles;
  for (const auto& [id, r] : snap.records) titles.push_back(r.title.en);
  RuleBasedTokenizer tokenizer({"Syowa Station", "cosmic noise absorption"}, RuleBasedTokenizer::default_stopwords());
  const auto expected = export_graph(build_cooccurrence(titles, tokenizer));
  EXPECT_EQ(run.out, expected);
  EXPECT_EQ(read_file((dir / "snap" / "graph.json").string()), expected);
}

TEST(Cli, ConvertMatchesGolden) {
  TempDir dir;
  auto run = run_cli(dir, "convert " + testing_support::fixture_path("netcdf/simple_v1.nc"));
  ASSERT_EQ(run.status, 0) << run.err;
  EXPECT_EQ(run.out, testing_support::read_fixture("ascii/simple_v1.txt"));
  run = run_cli(dir, "convert " + testing_support::fixture_path("netcdf/multi_v1.nc") +
                         " --var time --var counts --delimiter \"$(printf '\\t')\" --ascii " + (dir / "out.tsv").string());
  ASSERT_EQ(run.status, 0) << run.err;
  EXPECT_EQ(read_file((dir / "out.tsv").string()), testing_support::read_fixture("ascii/multi_v1_counts.tsv"));
  EXPECT_EQ(run_cli(dir, "convert " + testing_support::fixture_path("netcdf/simple_v1.json")).status, 2);
}
