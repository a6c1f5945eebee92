#include <gtest/gtest.h>

#include <atomic>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "rdcat/convert.hpp"
#include "rdcat/netcdf.hpp"
#include "rdcat/query.hpp"
#include "rdcat/service.hpp"
#include "rdcat/textnet.hpp"
#include "test_support.hpp"

using namespace rdcat;
using nlohmann::json;
using testing_support::StubServer;

namespace {

std::string mag_file(int day) {
  return testing_support::series_netcdf("h", "2024-04-0" + std::to_string(day) + "T00:00:00Z", {0, 60, 120},
                                        {1.5 * day, -1e30, 2.25 * day});
}

// Catalog whose granules and images live on a stub upstream server.
CatalogSnapshot service_snapshot(const StubServer& up) {
  CatalogSnapshot snap;
  auto add = [&](const std::string& id, const std::string& title, DatasetConfig config) {
    auto r = testing_support::make_record(id, title);
    snap.records[id] = r;
    snap.configs[id] = std::move(config);
  };
  auto mag = testing_support::make_config("mag");
  mag.data_url_template = up.url("/mag/%YYYY%mm%dd.nc");
  mag.visual_url_template = up.url("/vis/%YYYY%mm%dd.png");
  mag.conversion_enabled = true;
  add("mag", "Syowa magnetometer", mag);
  snap.records["mag"].data_kind = DataKind::time_series;
  snap.records["mag"].title.ja = "昭和基地磁力計";
  snap.manifests["mag"] = {"mag", {make_timestamp(2024, 4, 1), make_timestamp(2024, 4, 2), make_timestamp(2024, 4, 5)}};

  auto locked = testing_support::make_config("locked");
  locked.download_enabled = false;
  locked.show_visualized = false;
  add("locked", "Restricted riometer", locked);

  auto noconv = testing_support::make_config("noconv");
  noconv.data_url_template = up.url("/mag/%YYYY%mm%dd.nc");
  add("noconv", "Imager without conversion", noconv);
  snap.manifests["noconv"] = snap.manifests["mag"];
  snap.manifests["noconv"].dataset_id = "noconv";

  auto broken = testing_support::make_config("broken");
  broken.data_url_template = up.url("/missing/%YYYY%mm%dd.nc");
  add("broken", "Broken upstream", broken);
  snap.manifests["broken"] = {"broken", {make_timestamp(2024, 4, 1)}};

  auto specimen = testing_support::make_config("specimen", Granularity::static_);
  specimen.static_visuals = {up.url("/img/front.jpg"), up.url("/img/back.jpg")};
  add("specimen", "Adelie penguin specimen", specimen);
  snap.records["specimen"].data_kind = DataKind::specimen;
  snap.records["specimen"].thumbnail = up.url("/img/front.jpg");

  add("near", "Near neighbour", testing_support::make_config("near"));
  add("far", "Far neighbour", testing_support::make_config("far"));
  snap.scores = {{"far", "mag", 0.5, ScoreMethod::pearson, -0.5},
                 {"mag", "near", 0.9, ScoreMethod::pearson, 0.9},
                 {"locked", "mag", 0.8, ScoreMethod::pearson, 0.8}};
  RuleBasedTokenizer tokenizer;
  std::vector<std::string> titles;
  for (const auto& [id, r] : snap.records) titles.push_back(r.title.en);
  snap.graph = build_cooccurrence(titles, tokenizer, {1, 1});
  return snap;
}

class ApiServer {
 public:
  ApiServer(CatalogStore& store, ServiceOptions options) : service_(store, std::move(options)) {
    service_.register_routes(server_);
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~ApiServer() {
    server_.stop();
    thread_.join();
  }
  httplib::Client client() const {
    httplib::Client c("127.0.0.1", port_);
    c.set_read_timeout(60, 0);
    return c;
  }
  CatalogService& service() { return service_; }

 private:
  CatalogService service_;
  httplib::Server server_;
  std::thread thread_;
  int port_ = 0;
};

class ServiceTest : public ::testing::Test {
 protected:
  void SetUp() override {
    for (int day : {1, 2, 5}) upstream.put("/mag/2024040" + std::to_string(day) + ".nc", mag_file(day));
    upstream.put("/vis/20240401.png", "PNG-1");
    upstream.put("/vis/20240402.png", "PNG-2");
    upstream.put("/img/front.jpg", "JPEG-front");
    upstream.put("/img/back.jpg", "JPEG-back");
    auto snap = service_snapshot(upstream);
    snap.version = 3;
    store.swap(snap);
    ServiceOptions options;
    options.fetch.max_files = 2;
    options.chips = {"Aurora", "Meteorite Sample"};
    options.seed_source = [] { return 42; };
    api = std::make_unique<ApiServer>(store, options);
  }

  json get_json(const std::string& path, int expected_status = 200) {
    auto res = api->client().Get(path);
    EXPECT_TRUE(res) << path;
    if (!res) return json();
    EXPECT_EQ(res->status, expected_status) << path << " -> " << res->body;
    EXPECT_EQ(res->get_header_value("X-Snapshot-Version"), std::to_string(store.current()->version));
    return json::parse(res->body);
  }

  StubServer upstream;
  CatalogStore store;
  std::unique_ptr<ApiServer> api;
};

}  // namespace

TEST_F(ServiceTest, OriginalDownloadZipsEveryFileInRange) {
  auto res = api->client().Get("/api/datasets/mag/download?from=2024-04-01&to=2024-04-02");
  ASSERT_TRUE(res);
  ASSERT_EQ(res->status, 200) << res->body;
  EXPECT_EQ(res->get_header_value("Content-Type"), "application/zip");
  EXPECT_NE(res->get_header_value("Content-Disposition").find("mag_2024-04-01_2024-04-02.zip"), std::string::npos);
  auto zip = testing_support::python_unzip(res->body);
  ASSERT_TRUE(zip.ok);
  EXPECT_EQ(zip.names, (std::vector<std::string>{"20240401.nc", "20240402.nc"}));
  EXPECT_EQ(zip.contents, (std::vector<std::string>{mag_file(1), mag_file(2)}));
  EXPECT_EQ(upstream.hits(), 2u);

  // Second request is served from the cache.
  auto again = api->client().Get("/api/datasets/mag/download?from=2024-04-01&to=2024-04-02");
  ASSERT_TRUE(again);
  EXPECT_EQ(again->body, res->body);
  EXPECT_EQ(upstream.hits(), 2u);
  EXPECT_EQ(api->service().cache().upstream_fetches(), 2u);
}

TEST_F(ServiceTest, AsciiDownloadConvertsEachFile) {
  auto res = api->client().Get("/api/datasets/mag/download?from=2024-04-02T00:00:00Z&to=2024-04-05&format=ascii");
  ASSERT_TRUE(res);
  ASSERT_EQ(res->status, 200) << res->body;
  auto zip = testing_support::python_unzip(res->body);
  ASSERT_TRUE(zip.ok);
  EXPECT_EQ(zip.names, (std::vector<std::string>{"20240402.txt", "20240405.txt"}));
  EXPECT_EQ(zip.contents[0], to_ascii(read_netcdf_classic(mag_file(2))));
  EXPECT_EQ(zip.contents[1], to_ascii(read_netcdf_classic(mag_file(5))));
}

TEST_F(ServiceTest, DownloadErrors) {
  auto body = get_json("/api/datasets/mag/download?from=2024-04-03&to=2024-04-04", 400);
  EXPECT_EQ(body["error"], "EmptySelection");
  body = get_json("/api/datasets/locked/download?from=2024-04-01&to=2024-04-02", 409);
  EXPECT_EQ(body["error"], "DownloadDisabled");
  body = get_json("/api/datasets/noconv/download?from=2024-04-01&to=2024-04-02&format=ascii", 409);
  EXPECT_EQ(body["error"], "FormatUnavailable");
  body = get_json("/api/datasets/mag/download?from=2024-04-01&to=2024-04-05", 413);
  EXPECT_EQ(body["error"], "TooManyFiles");
  body = get_json("/api/datasets/mag/download?from=2024-04-05&to=2024-04-01", 400);
  EXPECT_EQ(body["error"], "InvertedRange");
  body = get_json("/api/datasets/mag/download?from=yesterday&to=2024-04-01", 400);
  EXPECT_EQ(body["error"], "BadRequest");
  body = get_json("/api/datasets/mag/download?from=2024-04-01&to=2024-04-02&format=hdf", 400);
  body = get_json("/api/datasets/broken/download?from=2024-04-01&to=2024-04-01", 502);
  EXPECT_EQ(body["error"], "UpstreamFetchFailed");
  EXPECT_EQ(body["file"], "20240401.nc");
  EXPECT_EQ(body["url"], upstream.url("/missing/20240401.nc"));
  body = get_json("/api/datasets/nope/download?from=2024-04-01&to=2024-04-01", 404);
  EXPECT_EQ(body["error"], "UnknownDataset");
}

TEST_F(ServiceTest, ListingAndDetailErrors) {
  EXPECT_EQ(get_json("/api/datasets?page=0", 400)["error"], "InvalidPage");
  EXPECT_EQ(get_json("/api/datasets?page_size=101", 400)["error"], "InvalidPage");
  EXPECT_EQ(get_json("/api/datasets?sort=size", 400)["error"], "BadRequest");
  EXPECT_EQ(get_json("/api/datasets?combine=xor", 400)["error"], "BadRequest");
  EXPECT_EQ(get_json("/api/datasets?lang=fr", 400)["error"], "BadRequest");
  EXPECT_EQ(get_json("/api/datasets/nope", 404)["error"], "UnknownDataset");
  EXPECT_EQ(get_json("/api/datasets/mag/available-dates?year=2024&month=13", 400)["error"], "BadRequest");
  EXPECT_EQ(get_json("/api/datasets/mag/available-dates?year=2024", 400)["error"], "BadRequest");
  EXPECT_EQ(get_json("/api/datasets/mag/related?limit=0", 400)["error"], "BadRequest");
}

TEST_F(ServiceTest, ListingMatchesLibrarySearch) {
  auto snap = store.current();
  for (const std::string sort : {"random", "title", "access"}) {
    auto body = get_json("/api/datasets?sort=" + sort + "&seed=77&page=1&page_size=4&q=magnetometer%20syowa&combine=or");
    SearchQuery q;
    q.text = "magnetometer syowa";
    q.combine = Combine::OR;
    SortOrder order = sort == "random" ? SortOrder::random(77) : sort == "title" ? SortOrder::title_asc()
                                                                                  : SortOrder::access_desc();
    auto expected = search(*snap, &store.access_counter(), q, order, 1, 4);
    EXPECT_EQ(body["total"], expected.total);
    ASSERT_EQ(body["items"].size(), expected.items.size());
    for (std::size_t i = 0; i < expected.items.size(); ++i) EXPECT_EQ(body["items"][i]["id"], expected.items[i].id);
  }
  // Without sort or seed the listing is random with the server-drawn seed.
  auto body = get_json("/api/datasets");
  EXPECT_EQ(body["sort"], "random");
  EXPECT_EQ(body["seed"], 42);
  EXPECT_EQ(body["total"], snap->records.size());
  auto expected = search(*snap, &store.access_counter(), {}, SortOrder::random(42), 1, 20);
  for (std::size_t i = 0; i < expected.items.size(); ++i) EXPECT_EQ(body["items"][i]["id"], expected.items[i].id);
}

TEST_F(ServiceTest, DetailCountsAccessesAndLocalizes) {
  auto before = get_json("/api/datasets?sort=access&page_size=100");
  auto count_of = [](const json& listing, const std::string& id) {
    for (const auto& item : listing["items"])
      if (item["id"] == id) return item["access_count"].get<std::uint64_t>();
    return std::uint64_t{999};
  };
  auto d1 = get_json("/api/datasets/mag?lang=ja");
  EXPECT_EQ(d1["localized"]["title"], "昭和基地磁力計");
  EXPECT_EQ(d1["title"]["en"], "Syowa magnetometer");
  EXPECT_EQ(d1["capabilities"]["conversion_enabled"], true);
  auto d2 = get_json("/api/datasets/mag");
  EXPECT_EQ(d2["localized"]["title"], "Syowa magnetometer");
  auto after = get_json("/api/datasets?sort=access&page_size=100");
  EXPECT_EQ(count_of(after, "mag") - count_of(before, "mag"), 2u);
  EXPECT_EQ(after["items"][0]["id"], "mag");
  EXPECT_EQ(d2["access_count"].get<std::uint64_t>(), d1["access_count"].get<std::uint64_t>() + 1);
}

TEST_F(ServiceTest, AvailableDates) {
  auto body = get_json("/api/datasets/mag/available-dates?year=2024&month=4");
  EXPECT_EQ(body["days"], json::array({1, 2, 5}));
  body = get_json("/api/datasets/mag/available-dates?year=2024&month=5");
  EXPECT_EQ(body["days"], json::array());
  body = get_json("/api/datasets/near/available-dates?year=2024&month=4");
  EXPECT_EQ(body["days"], json::array());
}

TEST_F(ServiceTest, RelatedHonoursThresholdAndLimit) {
  auto body = get_json("/api/datasets/mag/related");
  ASSERT_EQ(body["items"].size(), 2u);
  EXPECT_EQ(body["items"][0]["id"], "near");
  EXPECT_EQ(body["items"][1]["id"], "locked");
  EXPECT_EQ(body["items"][0]["score"], 0.9);
  body = get_json("/api/datasets/mag/related?limit=1");
  ASSERT_EQ(body["items"].size(), 1u);
  EXPECT_EQ(body["items"][0]["id"], "near");
  EXPECT_EQ(get_json("/api/datasets/far/related")["items"].size(), 0u);
}

TEST_F(ServiceTest, Visuals) {
  auto body = get_json("/api/datasets/mag/visuals?from=2024-04-01&to=2024-04-04");
  ASSERT_EQ(body["items"].size(), 2u);
  EXPECT_EQ(body["items"][0]["timestamp"], "2024-04-01T00:00:00Z");
  EXPECT_EQ(body["items"][1]["url"], upstream.url("/vis/20240402.png"));
  auto image = api->client().Get(body["items"][1]["image"].get<std::string>());
  ASSERT_TRUE(image);
  EXPECT_EQ(image->status, 200);
  EXPECT_EQ(image->body, "PNG-2");
  EXPECT_EQ(image->get_header_value("Content-Type"), "image/png");
  EXPECT_EQ(get_json("/api/datasets/mag/visuals")["items"].size(), 3u);
  // Listed in the manifest but missing upstream.
  EXPECT_EQ(get_json("/api/datasets/mag/visuals/image?t=2024-04-05", 502)["error"], "UpstreamFetchFailed");
  EXPECT_EQ(get_json("/api/datasets/mag/visuals/image?t=2024-04-03", 404)["error"], "NotFound");

  body = get_json("/api/datasets/specimen/visuals");
  ASSERT_EQ(body["items"].size(), 2u);
  EXPECT_TRUE(body["items"][0]["timestamp"].is_null());
  image = api->client().Get(body["items"][1]["image"].get<std::string>());
  ASSERT_TRUE(image);
  EXPECT_EQ(image->body, "JPEG-back");
  EXPECT_EQ(image->get_header_value("Content-Type"), "image/jpeg");
  auto thumb = api->client().Get("/api/datasets/specimen/thumbnail");
  ASSERT_TRUE(thumb);
  EXPECT_EQ(thumb->body, "JPEG-front");
  EXPECT_EQ(get_json("/api/datasets/locked/visuals", 409)["error"], "VisualsDisabled");
  EXPECT_EQ(get_json("/api/datasets/near/thumbnail", 404)["error"], "NotFound");
}

TEST_F(ServiceTest, NetworkAndChips) {
  auto first = api->client().Get("/api/network");
  auto second = api->client().Get("/api/network");
  ASSERT_TRUE(first && second);
  EXPECT_EQ(first->body, export_graph(store.current()->graph));
  EXPECT_EQ(first->body, second->body);
  EXPECT_EQ(parse_graph(first->body), store.current()->graph);
  EXPECT_EQ(get_json("/api/chips")["chips"], json::array({"Aurora", "Meteorite Sample"}));
}

TEST_F(ServiceTest, ConcurrentSwapNeverMixesVersions) {
  auto base = *store.current();
  std::atomic<bool> done{false};
  std::thread writer([&] {
    for (int k = 1; k <= 40; ++k) {
      auto next = base;
      for (auto& [id, r] : next.records) r.title.en = "gen " + std::to_string(k);
      next.version = 1000 + k;
      store.swap(next);
      std::this_thread::sleep_for(std::chrono::milliseconds(2));
    }
    done = true;
  });
  std::size_t checked = 0;
  while (!done || checked < 20) {
    auto res = api->client().Get("/api/datasets?sort=title&page_size=100");
    ASSERT_TRUE(res);
    auto body = json::parse(res->body);
    const auto version = body["snapshot_version"].get<std::uint64_t>();
    EXPECT_EQ(res->get_header_value("X-Snapshot-Version"), std::to_string(version));
    for (const auto& item : body["items"]) {
      const std::string expected = version >= 1001 ? "gen " + std::to_string(version - 1000) : base.records.at(item["id"]).title.en;
      EXPECT_EQ(item["title"], expected);
    }
    ++checked;
    if (done && checked >= 20) break;
  }
  writer.join();
}
