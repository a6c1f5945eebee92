#include "rdcat/service.hpp"

#include <charconv>
#include <filesystem>
#include <random>

#include <httplib.h>
#include <json.hpp>

#include "rdcat/convert.hpp"
#include "rdcat/error.hpp"
#include "rdcat/filename_template.hpp"
#include "rdcat/query.hpp"
#include "rdcat/registry.hpp"
#include "rdcat/scoring.hpp"
#include "rdcat/snapshot_io.hpp"
#include "rdcat/text.hpp"
#include "rdcat/textnet.hpp"
#include "rdcat/zip.hpp"

namespace fs = std::filesystem;

namespace rdcat {

namespace {

using ojson = nlohmann::ordered_json;

// Largest integer a JavaScript client can hold exactly.
constexpr std::uint64_t kMaxJsSafeSeed = (std::uint64_t{1} << 53) - 1;

struct HttpError {
  int status;
  std::string code;
  std::string message;
  ojson extra = ojson::object();
};

[[noreturn]] void bad_request(const std::string& message) { throw HttpError{400, "BadRequest", message}; }

void send_json(httplib::Response& res, int status, ojson body, std::uint64_t version) {
  body["snapshot_version"] = version;
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, const HttpError& e, std::uint64_t version) {
  ojson body = e.extra;
  body["error"] = e.code;
  body["message"] = e.message;
  send_json(res, e.status, std::move(body), version);
}

int status_for(Errc code) {
  switch (code) {
    case Errc::UnknownDataset: return 404;
    case Errc::UpstreamFetchFailed: return 502;
    case Errc::InvalidPage:
    case Errc::InvalidArgument:
    case Errc::ParseError:
    case Errc::InvertedRange:
    case Errc::EmptySelection: return 400;
    default: return 500;
  }
}

std::optional<std::string> param(const httplib::Request& req, const char* name) {
  if (!req.has_param(name)) return std::nullopt;
  return req.get_param_value(name);
}

std::uint64_t uint_param(const httplib::Request& req, const char* name, std::uint64_t fallback) {
  auto text = param(req, name);
  if (!text) return fallback;
  std::uint64_t v = 0;
  auto [end, ec] = std::from_chars(text->data(), text->data() + text->size(), v);
  if (ec != std::errc() || end != text->data() + text->size() || text->empty())
    bad_request(std::string("parameter '") + name + "' must be a non-negative integer");
  return v;
}

Lang lang_param(const httplib::Request& req) {
  auto text = param(req, "lang");
  if (!text || text->empty()) return Lang::en;
  try {
    return parse_lang(to_lower_ascii(*text));
  } catch (const Error&) {
    bad_request("lang must be 'en' or 'ja'");
  }
}

// Date-only values are whole days: "from" starts at 00:00, "to" ends at 23:59:59.
Timestamp bound_param(const httplib::Request& req, const char* name, bool is_end) {
  auto text = param(req, name);
  if (!text || text->empty()) bad_request(std::string("parameter '") + name + "' is required");
  try {
    auto t = std::chrono::floor<std::chrono::seconds>(parse_instant(*text));
    if (is_end && trim(*text).size() == 10) t += std::chrono::seconds(86399);
    return t;
  } catch (const Error&) {
    bad_request(std::string("parameter '") + name + "' is not a date or timestamp");
  }
}

std::string thumbnail_link(const DatasetRecord& r) {
  return r.thumbnail.empty() ? std::string() : "/api/datasets/" + r.id + "/thumbnail";
}

std::string image_type(std::string_view url) {
  auto name = to_lower_ascii(display_name_for(url));
  if (name.ends_with(".png")) return "image/png";
  if (name.ends_with(".jpg") || name.ends_with(".jpeg")) return "image/jpeg";
  if (name.ends_with(".gif")) return "image/gif";
  return "application/octet-stream";
}

std::string ascii_member_name(const std::string& display_name) {
  auto dot = display_name.find_last_of('.');
  return (dot == std::string::npos || dot == 0 ? display_name : display_name.substr(0, dot)) + ".txt";
}

struct Located {
  const DatasetRecord* record;
  const DatasetConfig* config;
};

Located locate(const CatalogSnapshot& snapshot, const std::string& id) {
  auto it = snapshot.records.find(id);
  if (it == snapshot.records.end()) throw HttpError{404, "UnknownDataset", "unknown dataset '" + id + "'"};
  return {&it->second, snapshot.config_for(it->second)};
}

// Everything a streamed download needs after the handler returns.
struct DownloadPlan {
  std::vector<FileCache::Lease> leases;
  std::vector<fs::path> member_files;
  std::vector<std::string> names;
  std::vector<Timestamp> times;
  fs::path scratch;

  ~DownloadPlan() {
    if (!scratch.empty()) {
      std::error_code ec;
      fs::remove_all(scratch, ec);
    }
  }
};

}  // namespace

CatalogService::CatalogService(CatalogStore& store, ServiceOptions options)
    : store_(store), options_(std::move(options)), cache_(std::make_unique<FileCache>(options_.fetch)) {
  if (options_.default_page_size < 1 || options_.default_page_size > 100)
    throw Error(Errc::InvalidArgument, "default page size must be within 1..100");
  if (!options_.seed_source)
    options_.seed_source = [] {
      std::random_device rd;
      return ((std::uint64_t{rd()} << 32) | rd()) & kMaxJsSafeSeed;
    };
}

CatalogService::~CatalogService() = default;

void CatalogService::register_routes(httplib::Server& server) {
  using Handler = std::function<void(const httplib::Request&, httplib::Response&, const CatalogSnapshot&)>;
  auto wrap = [this](Handler handler) {
    return [this, handler](const httplib::Request& req, httplib::Response& res) {
      const auto snapshot = store_.current();
      res.set_header("X-Snapshot-Version", std::to_string(snapshot->version));
      try {
        handler(req, res, *snapshot);
      } catch (const HttpError& e) {
        send_error(res, e, snapshot->version);
      } catch (const Error& e) {
        send_error(res, HttpError{status_for(e.code()), std::string(to_string(e.code())), e.detail()}, snapshot->version);
      } catch (const std::exception& e) {
        send_error(res, HttpError{500, "InternalError", e.what()}, snapshot->version);
      }
    };
  };

  server.Get("/api/datasets", wrap([this](const auto& req, auto& res, const CatalogSnapshot& snapshot) {
    SearchQuery query;
    query.text = param(req, "q").value_or("");
    for (std::size_t i = 0; i < req.get_param_value_count("chips"); ++i)
      for (const auto& chip : split(req.get_param_value("chips", i), ','))
        if (auto c = trim(chip); !c.empty()) query.chips.emplace_back(c);
    auto combine = to_lower_ascii(param(req, "combine").value_or("and"));
    if (combine == "and")
      query.combine = Combine::AND;
    else if (combine == "or")
      query.combine = Combine::OR;
    else
      bad_request("combine must be 'and' or 'or'");
    query.lang = lang_param(req);

    SortOrder sort;
    auto sort_name = to_lower_ascii(param(req, "sort").value_or("random"));
    if (sort_name == "random") {
      sort = SortOrder::random(req.has_param("seed") ? uint_param(req, "seed", 0) : options_.seed_source());
    } else if (sort_name == "access" || sort_name == "access_desc") {
      sort = SortOrder::access_desc();
    } else if (sort_name == "title" || sort_name == "title_asc") {
      sort = SortOrder::title_asc();
    } else {
      bad_request("sort must be 'random', 'access' or 'title'");
    }
    const auto page = uint_param(req, "page", 1);
    const auto page_size = uint_param(req, "page_size", options_.default_page_size);

    auto result = search(snapshot, &store_.access_counter(), query, sort, page, page_size);
    ojson body;
    body["total"] = result.total;
    body["page"] = page;
    body["page_size"] = page_size;
    body["pages"] = (result.total + page_size - 1) / page_size;
    body["next_page"] = page * page_size < result.total ? ojson(page + 1) : ojson(nullptr);
    body["prev_page"] = page > 1 ? ojson(page - 1) : ojson(nullptr);
    body["sort"] = sort.kind == SortOrder::Kind::random        ? "random"
                   : sort.kind == SortOrder::Kind::access_desc ? "access"
                                                               : "title";
    if (sort.kind == SortOrder::Kind::random) body["seed"] = sort.seed;
    body["lang"] = to_string(query.lang);
    body["items"] = ojson::array();
    for (const auto& r : result.items)
      body["items"].push_back({{"id", r.id},
                               {"title", r.title.get(query.lang)},
                               {"snippet", r.snippet.get(query.lang)},
                               {"thumbnail", thumbnail_link(r)},
                               {"discipline", r.discipline},
                               {"data_kind", to_string(r.data_kind)},
                               {"access_count", r.access_count}});
    send_json(res, 200, std::move(body), snapshot.version);
  }));

  server.Get(R"(/api/datasets/([^/]+))", wrap([this](const auto& req, auto& res, const CatalogSnapshot& snapshot) {
    const std::string id = req.matches[1];
    auto [record, config] = locate(snapshot, id);
    const Lang lang = lang_param(req);
    DatasetRecord shown = *record;
    shown.access_count = record->access_count + store_.access_counter().increment(id);

    ojson body = record_to_json(shown);
    body["lang"] = to_string(lang);
    body["localized"] = {{"title", shown.title.get(lang)},
                         {"snippet", shown.snippet.get(lang)},
                         {"description", shown.description.get(lang)}};
    body["thumbnail_url"] = thumbnail_link(shown);
    body["capabilities"] = {{"download_enabled", config && config->download_enabled},
                            {"conversion_enabled", config && config->conversion_enabled},
                            {"show_visualized", config && config->show_visualized}};
    if (config) {
      body["granularity"] = to_string(config->granularity);
      body["format"] = to_string(config->format);
    }
    send_json(res, 200, std::move(body), snapshot.version);
  }));

  server.Get(R"(/api/datasets/([^/]+)/available-dates)",
             wrap([](const auto& req, auto& res, const CatalogSnapshot& snapshot) {
               auto [record, config] = locate(snapshot, req.matches[1]);
               if (!req.has_param("year") || !req.has_param("month")) bad_request("year and month are required");
               const auto year = uint_param(req, "year", 0);
               const auto month = uint_param(req, "month", 0);
               if (month < 1 || month > 12) bad_request("month must be within 1..12");
               if (year < 1 || year > 9999) bad_request("year must be within 1..9999");
               std::set<int> days;
               if (config)
                 days = available_dates(snapshot.manifest_for(*config), static_cast<int>(year), static_cast<int>(month));
               ojson body;
               body["id"] = record->id;
               body["year"] = year;
               body["month"] = month;
               body["days"] = days;
               send_json(res, 200, std::move(body), snapshot.version);
             }));

  server.Get(R"(/api/datasets/([^/]+)/download)", wrap([this](const auto& req, auto& res, const CatalogSnapshot& snapshot) {
    auto [record, config] = locate(snapshot, req.matches[1]);
    if (!config || !config->download_enabled)
      throw HttpError{409, "DownloadDisabled", "dataset '" + record->id + "' does not offer downloads"};
    const auto format = to_lower_ascii(param(req, "format").value_or("original"));
    if (format != "original" && format != "ascii") bad_request("format must be 'original' or 'ascii'");
    if (format == "ascii" && !config->conversion_enabled)
      throw HttpError{409, "FormatUnavailable", "ASCII conversion is not enabled for '" + record->id + "'"};
    const Timestamp from = bound_param(req, "from", false);
    const Timestamp to = bound_param(req, "to", true);

    auto entries = resolve_range(*config, snapshot.manifest_for(*config), from, to);
    if (entries.empty()) throw HttpError{400, "EmptySelection", "no files in the requested range"};
    if (entries.size() > cache_->policy().max_files)
      throw HttpError{413, "TooManyFiles", std::to_string(entries.size()) + " files exceed the limit of " +
                                               std::to_string(cache_->policy().max_files)};

    auto plan = std::make_shared<DownloadPlan>();
    for (const auto& entry : entries) {
      try {
        plan->leases.push_back(cache_->fetch(entry.url));
      } catch (const Error& e) {
        throw HttpError{502, "UpstreamFetchFailed", e.detail(), {{"file", entry.display_name}, {"url", entry.url}}};
      }
      plan->times.push_back(entry.timestamp);
      plan->names.push_back(format == "ascii" ? ascii_member_name(entry.display_name) : entry.display_name);
    }
    if (format == "ascii") {
      static std::atomic<std::uint64_t> counter{0};
      plan->scratch = cache_->policy().cache_dir / ("convert-" + std::to_string(++counter));
      fs::create_directories(plan->scratch);
      for (std::size_t i = 0; i < entries.size(); ++i) {
        try {
          auto text = to_ascii(read_netcdf_classic(plan->leases[i].read()));
          plan->member_files.push_back(plan->scratch / std::to_string(i));
          write_file(plan->member_files.back().string(), text);
        } catch (const Error& e) {
          throw HttpError{502, "ConversionFailed", e.what(), {{"file", entries[i].display_name}, {"url", entries[i].url}}};
        }
      }
    } else {
      for (const auto& lease : plan->leases) plan->member_files.push_back(lease.path());
    }
    plan->names = unique_member_names(plan->names);

    res.set_header("Content-Disposition", "attachment; filename=\"" + record->id + "_" + format_date(from) + "_" +
                                              format_date(to) + ".zip\"");
    res.set_chunked_content_provider("application/zip", [plan](std::size_t, httplib::DataSink& sink) {
      bool ok = true;
      ZipWriter zip([&](std::string_view bytes) {
        if (ok) ok = sink.write(bytes.data(), bytes.size());
      });
      // One member in memory at a time.
      for (std::size_t i = 0; i < plan->names.size() && ok; ++i)
        zip.add(plan->names[i], read_file(plan->member_files[i].string()), plan->times[i]);
      if (!ok) return false;
      zip.finish();
      sink.done();
      return ok;
    });
  }));

  server.Get(R"(/api/datasets/([^/]+)/related)", wrap([](const auto& req, auto& res, const CatalogSnapshot& snapshot) {
    auto [record, config] = locate(snapshot, req.matches[1]);
    const auto limit = uint_param(req, "limit", snapshot.settings.related_top_k);
    if (limit < 1 || limit > 100) bad_request("limit must be within 1..100");
    ojson body;
    body["id"] = record->id;
    body["threshold"] = snapshot.settings.related_threshold;
    body["items"] = ojson::array();
    for (const auto& e : top_related(snapshot, record->id, limit, snapshot.settings.related_threshold)) {
      const auto& other = snapshot.records.at(e.id);
      body["items"].push_back({{"id", e.id},
                               {"score", e.score},
                               {"method", to_string(e.method)},
                               {"title", other.title.get(lang_param(req))},
                               {"thumbnail", thumbnail_link(other)}});
    }
    send_json(res, 200, std::move(body), snapshot.version);
  }));

  server.Get(R"(/api/datasets/([^/]+)/visuals)", wrap([](const auto& req, auto& res, const CatalogSnapshot& snapshot) {
    auto [record, config] = locate(snapshot, req.matches[1]);
    if (!config || !config->show_visualized)
      throw HttpError{409, "VisualsDisabled", "dataset '" + record->id + "' hides its visualized data"};
    const std::string base = "/api/datasets/" + record->id + "/visuals/image";
    ojson items = ojson::array();
    if (config->granularity == Granularity::static_) {
      auto visuals = config->static_visuals;
      if (visuals.empty() && !config->visual_url_template.empty()) visuals.push_back(config->visual_url_template);
      for (std::size_t i = 0; i < visuals.size(); ++i)
        items.push_back({{"timestamp", nullptr}, {"url", visuals[i]}, {"image", base + "?i=" + std::to_string(i)}});
    } else if (!config->visual_url_template.empty()) {
      const auto& manifest = snapshot.manifest_for(*config);
      Timestamp from = Timestamp::min(), to = Timestamp::max();
      if (req.has_param("from") || req.has_param("to")) {
        from = bound_param(req, "from", false);
        to = bound_param(req, "to", true);
      }
      if (from > to) bad_request("from is after to");
      const auto tmpl = FilenameTemplate::parse(config->visual_url_template);
      auto lo = std::lower_bound(manifest.timestamps.begin(), manifest.timestamps.end(), from);
      auto hi = std::upper_bound(manifest.timestamps.begin(), manifest.timestamps.end(), to);
      for (auto it = lo; it != hi; ++it) {
        auto t = truncate_to(*it, config->granularity);
        items.push_back({{"timestamp", format_timestamp(t)},
                         {"url", tmpl.expand(t)},
                         {"image", base + "?t=" + format_timestamp(t)}});
      }
    }
    ojson body;
    body["id"] = record->id;
    body["items"] = std::move(items);
    send_json(res, 200, std::move(body), snapshot.version);
  }));

  auto passthrough = [this](httplib::Response& res, const std::string& url) {
    try {
      auto lease = cache_->fetch(url);
      res.set_content(lease.read(), image_type(url));
    } catch (const Error& e) {
      throw HttpError{502, "UpstreamFetchFailed", e.detail(), {{"url", url}}};
    }
  };

  server.Get(R"(/api/datasets/([^/]+)/visuals/image)",
             wrap([passthrough](const auto& req, auto& res, const CatalogSnapshot& snapshot) {
               auto [record, config] = locate(snapshot, req.matches[1]);
               if (!config || !config->show_visualized)
                 throw HttpError{409, "VisualsDisabled", "dataset '" + record->id + "' hides its visualized data"};
               if (config->granularity == Granularity::static_) {
                 auto visuals = config->static_visuals;
                 if (visuals.empty() && !config->visual_url_template.empty()) visuals.push_back(config->visual_url_template);
                 const auto i = uint_param(req, "i", 0);
                 if (i >= visuals.size()) throw HttpError{404, "NotFound", "no such visual"};
                 return passthrough(res, visuals[i]);
               }
               const auto t = bound_param(req, "t", false);
               const auto& ts = snapshot.manifest_for(*config).timestamps;
               if (config->visual_url_template.empty() || !std::binary_search(ts.begin(), ts.end(), t))
                 throw HttpError{404, "NotFound", "no visual at " + format_timestamp(t)};
               passthrough(res, expand_template(config->visual_url_template, truncate_to(t, config->granularity)));
             }));

  server.Get(R"(/api/datasets/([^/]+)/thumbnail)",
             wrap([passthrough](const auto& req, auto& res, const CatalogSnapshot& snapshot) {
               auto [record, config] = locate(snapshot, req.matches[1]);
               if (record->thumbnail.find("://") == std::string::npos)
                 throw HttpError{404, "NotFound", "dataset '" + record->id + "' has no thumbnail URL"};
               passthrough(res, record->thumbnail);
             }));

  server.Get("/api/network", wrap([](const auto&, auto& res, const CatalogSnapshot& snapshot) {
    res.set_content(export_graph(snapshot.graph), "application/json");
  }));

  server.Get("/api/chips", wrap([this](const auto&, auto& res, const CatalogSnapshot& snapshot) {
    ojson body;
    body["chips"] = options_.chips;
    send_json(res, 200, std::move(body), snapshot.version);
  }));
}

}  // namespace rdcat
