#include <gtest/gtest.h>
#include <json.hpp>

#include "rdcat/error.hpp"
#include "rdcat/ingest.hpp"
#include "rdcat/store.hpp"
#include "rdcat/text.hpp"
#include "test_support.hpp"

using namespace rdcat;
using testing_support::IsoDoc;
using testing_support::SpaseDoc;
using testing_support::TempDir;

namespace {

Errc code_of(const std::function<void()>& f, std::string* detail = nullptr) {
  try {
    f();
  } catch (const Error& e) {
    if (detail) *detail = e.detail();
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return Errc::ParseError;
}

}  // namespace

TEST(ParseSpase, MinimalFixture) {
  SpaseDoc d;
  auto r = parse_spase(testing_support::spase_xml(d));
  EXPECT_EQ(r.source_id, "spase://IUGONET/NumericalData/Test/mag");
  EXPECT_EQ(r.id, "spase-iugonet-numericaldata-test-mag");
  EXPECT_EQ(r.title.en, "Syowa magnetometer");
  EXPECT_FALSE(r.title.ja.has_value());
  EXPECT_EQ(r.source_schema, SourceSchema::spase_iugonet);
  EXPECT_EQ(r.data_kind, DataKind::time_series);
  ASSERT_TRUE(r.temporal_coverage);
  EXPECT_EQ(r.temporal_coverage->start, make_timestamp(2019, 1, 1));
  EXPECT_EQ(r.temporal_coverage->end, make_timestamp(2019, 12, 31));
  EXPECT_EQ(r.description.en, r.title.en);
  EXPECT_EQ(r.snippet.en, "Syowa magnetometer");
}

TEST(ParseSpase, MissingTitleIsMissingRequired) {
  SpaseDoc d;
  d.title.reset();
  std::string detail;
  EXPECT_EQ(code_of([&] { parse_spase(testing_support::spase_xml(d)); }, &detail), Errc::MissingRequired);
  EXPECT_EQ(detail, "title");
}

TEST(ParseSpase, ContactsInDocumentOrder) {
  SpaseDoc d;
  d.contacts = {{"Kadokura.Akira", "PrincipalInvestigator"}, {"Tanaka.Yoshimasa", "DataProducer"}};
  auto r = parse_spase(testing_support::spase_xml(d));
  ASSERT_EQ(r.contacts.size(), 2u);
  EXPECT_EQ(r.contacts[0].name, "Kadokura.Akira");
  EXPECT_EQ(r.contacts[0].role, "PrincipalInvestigator");
  EXPECT_EQ(r.contacts[1].name, "Tanaka.Yoshimasa");
  EXPECT_EQ(r.contacts[1].role, "DataProducer");
}

TEST(ParseSpase, JapaneseTitleKeywordsAndDisplayTable) {
  SpaseDoc d;
  d.title_ja = "昭和基地の磁力計";
  d.description = "Fluxgate magnetometer data.";
  d.keywords = {"aurora", "geomagnetism"};
  d.measurement_type = "MagneticField";
  d.resource_type = "DisplayData";
  auto r = parse_spase(testing_support::spase_xml(d));
  EXPECT_EQ(r.title.ja, "昭和基地の磁力計");
  EXPECT_EQ(r.snippet.ja, "昭和基地の磁力計");
  EXPECT_EQ(r.description.en, "Fluxgate magnetometer data.");
  EXPECT_EQ(r.keywords, (std::vector<std::string>{"aurora", "geomagnetism"}));
  EXPECT_EQ(r.discipline, std::vector<std::string>{"MagneticField"});
  EXPECT_EQ(r.data_kind, DataKind::other);
  ASSERT_FALSE(r.metadata_display.empty());
  EXPECT_EQ(r.metadata_display[0], (MetadataEntry{"Resource ID", d.resource_id}));
  bool has_release = false;
  for (const auto& e : r.metadata_display) has_release = has_release || e.key == "Release date";
  EXPECT_TRUE(has_release);
}

TEST(ParseSpase, OpenEndedSpanAndKindOverride) {
  SpaseDoc d;
  d.stop = "";
  IngestOptions o;
  o.kind_overrides[d.resource_id] = DataKind::composition;
  auto r = parse_spase(testing_support::spase_xml(d), o);
  EXPECT_EQ(r.temporal_coverage->start, r.temporal_coverage->end);
  EXPECT_EQ(r.data_kind, DataKind::composition);
}

TEST(ParseSpase, LongTitleSnippetIsTruncatedByCharacters) {
  SpaseDoc d;
  std::string title;
  for (int i = 0; i < 130; ++i) title += "é";
  d.title = title;
  auto r = parse_spase(testing_support::spase_xml(d));
  EXPECT_EQ(utf8_length(r.snippet.en), 120u);
  EXPECT_EQ(r.title.en, title);
}

TEST(ParseIso, MinimalFixtureWithKindOverride) {
  IsoDoc d;
  d.title = "Adélie penguin specimen";
  IngestOptions o;
  o.kind_overrides["jp.nipr.test.0001"] = DataKind::specimen;
  auto r = parse_iso19115(testing_support::iso_xml(d), o);
  EXPECT_EQ(r.source_id, "jp.nipr.test.0001");
  EXPECT_EQ(r.id, "jp-nipr-test-0001");
  EXPECT_EQ(r.title.en, "Adélie penguin specimen");
  EXPECT_EQ(r.data_kind, DataKind::specimen);
  EXPECT_EQ(r.source_schema, SourceSchema::iso19115);
  // Overrides may also be keyed by slug.
  IngestOptions by_slug;
  by_slug.kind_overrides["jp-nipr-test-0001"] = DataKind::composition;
  EXPECT_EQ(parse_iso19115(testing_support::iso_xml(d), by_slug).data_kind, DataKind::composition);
  EXPECT_EQ(parse_iso19115(testing_support::iso_xml(d)).data_kind, DataKind::other);
}

TEST(ParseIso, DescriptionFallsBackToTitle) {
  IsoDoc d;
  auto r = parse_iso19115(testing_support::iso_xml(d));
  EXPECT_EQ(r.description.en, r.title.en);
  d.abstract = "Skins and skeletons.";
  EXPECT_EQ(parse_iso19115(testing_support::iso_xml(d)).description.en, "Skins and skeletons.");
}

TEST(ParseIso, BeginOnlyExtentIsDegenerateSpan) {
  IsoDoc d;
  d.begin = "1995-02-10";
  auto r = parse_iso19115(testing_support::iso_xml(d));
  ASSERT_TRUE(r.temporal_coverage);
  EXPECT_EQ(r.temporal_coverage->start, make_timestamp(1995, 2, 10));
  EXPECT_EQ(r.temporal_coverage->end, make_timestamp(1995, 2, 10));
  d.end = "1996-01-01T12:00:00Z";
  r = parse_iso19115(testing_support::iso_xml(d));
  EXPECT_EQ(r.temporal_coverage->end, make_timestamp(1996, 1, 1, 12));
}

TEST(ParseIso, SiteContactsKeywordsAndJapanese) {
  IsoDoc d;
  d.site = "Yamato Mountains";
  d.contact_name = "H. Kojima";
  d.keywords = {"Meteorite Sample", "Antarctica"};
  d.topic = "geoscientificInformation";
  d.title_ja = "南極隕石";
  auto r = parse_iso19115(testing_support::iso_xml(d));
  ASSERT_TRUE(r.site);
  EXPECT_EQ(r.site->name, "Yamato Mountains");
  ASSERT_EQ(r.contacts.size(), 1u);
  EXPECT_EQ(r.contacts[0].name, "H. Kojima");
  EXPECT_EQ(r.contacts[0].affiliation, "NIPR");
  EXPECT_EQ(r.contacts[0].role, "pointOfContact");
  EXPECT_EQ(r.keywords, (std::vector<std::string>{"Meteorite Sample", "Antarctica"}));
  EXPECT_EQ(r.discipline, std::vector<std::string>{"geoscientificInformation"});
  EXPECT_EQ(r.title.ja, "南極隕石");
  EXPECT_EQ(r.title.en, "Adelie penguin specimen");
}

TEST(ParseIso, MissingIdentifierAndWrongRoot) {
  const std::string no_id =
      "<gmd:MD_Metadata xmlns:gmd=\"http://www.isotc211.org/2005/gmd\" xmlns:gco=\"http://www.isotc211.org/2005/gco\">"
      "<gmd:identificationInfo><gmd:MD_DataIdentification><gmd:citation><gmd:CI_Citation><gmd:title>"
      "<gco:CharacterString>T</gco:CharacterString></gmd:title></gmd:CI_Citation></gmd:citation>"
      "</gmd:MD_DataIdentification></gmd:identificationInfo></gmd:MD_Metadata>";
  std::string detail;
  EXPECT_EQ(code_of([&] { parse_iso19115(no_id); }, &detail), Errc::MissingRequired);
  EXPECT_EQ(detail, "source_id");
  EXPECT_EQ(code_of([&] { parse_iso19115(testing_support::spase_xml({})); }), Errc::UnsupportedRoot);
  EXPECT_EQ(code_of([&] { parse_spase(testing_support::iso_xml({})); }), Errc::UnsupportedRoot);
  EXPECT_EQ(code_of([&] { parse_metadata("<DIF xmlns=\"http://gcmd.nasa.gov/Aboutus/xml/dif/\"/>"); }),
            Errc::UnsupportedRoot);
  EXPECT_EQ(code_of([&] { parse_metadata("<Spase><unclosed></Spase>"); }), Errc::XmlError);
  EXPECT_EQ(code_of([&] { parse_metadata("<x:Spase/>"); }), Errc::XmlError);
}

TEST(DetectSchema, EveryFixtureRoutesToExactlyOneParser) {
  const auto& table = MappingTable::builtin();
  EXPECT_EQ(detect_schema(parse_xml(testing_support::spase_xml({})), table), SourceSchema::spase_iugonet);
  EXPECT_EQ(detect_schema(parse_xml(testing_support::iso_xml({})), table), SourceSchema::iso19115);
  // The gml namespace alias does not matter; the root namespace does.
  EXPECT_FALSE(detect_schema(parse_xml("<Spase xmlns=\"urn:other\"/>"), table));
}

TEST(Slugify, Rules) {
  EXPECT_EQ(slugify("spase://IUGONET/NumericalData/NIPR/Syowa_Mag"), "spase-iugonet-numericaldata-nipr-syowa-mag");
  EXPECT_EQ(slugify("--Hello,  World!!"), "hello-world");
  EXPECT_EQ(slugify("日本"), "dataset");
  EXPECT_EQ(slugify(""), "dataset");
  for (const auto& s : {"a.b", "X Y Z", "jp.nipr/123"}) EXPECT_TRUE(is_valid_slug(slugify(s)));
}

TEST(IngestDirectory, TwoSpaseAndOneIso) {
  TempDir dir;
  SpaseDoc a, b;
  b.resource_id = "spase://IUGONET/NumericalData/Test/riometer";
  dir.write("a.xml", testing_support::spase_xml(a));
  dir.write("nested/b.xml", testing_support::spase_xml(b));
  dir.write("c.xml", testing_support::iso_xml({}));
  dir.write("readme.txt", "ignored");
  auto result = ingest_directory(dir.path());
  EXPECT_TRUE(result.errors.empty());
  ASSERT_EQ(result.records.size(), 3u);
  EXPECT_TRUE(std::is_sorted(result.records.begin(), result.records.end(),
                             [](const auto& x, const auto& y) { return x.id < y.id; }));
}

TEST(IngestDirectory, MalformedFileIsIsolated) {
  TempDir dir;
  SpaseDoc a;
  dir.write("a.xml", testing_support::spase_xml(a));
  dir.write("b.xml", "<Spase xmlns=\"http://www.spase-group.org/data/schema\"><NumericalData>");
  dir.write("c.xml", testing_support::iso_xml({}));
  auto result = ingest_directory(dir.path());
  EXPECT_EQ(result.records.size(), 2u);
  ASSERT_EQ(result.errors.size(), 1u);
  EXPECT_NE(result.errors[0].file.find("b.xml"), std::string::npos);
  EXPECT_EQ(result.errors[0].code, Errc::XmlError);
}

TEST(IngestDirectory, IdenticalSourceIdsGetNumericSuffix) {
  TempDir dir;
  IsoDoc d;
  d.file_identifier = "x";
  dir.write("1.xml", testing_support::iso_xml(d));
  dir.write("2.xml", testing_support::iso_xml(d));
  dir.write("3.xml", testing_support::iso_xml(d));
  auto result = ingest_directory(dir.path());
  ASSERT_EQ(result.records.size(), 3u);
  EXPECT_EQ(result.records[0].id, "x");
  EXPECT_EQ(result.records[1].id, "x-2");
  EXPECT_EQ(result.records[2].id, "x-3");
}

TEST(IngestDirectory, MissingDirectoryIsIoError) {
  EXPECT_EQ(code_of([] { ingest_directory("/nonexistent/rdcat"); }), Errc::IoError);
}

TEST(IngestDirectory, DeterministicAndEveryRecordValidates) {
  TempDir dir;
  testing_support::write_ingest_corpus(dir.path(), 20, 20);
  auto first = ingest_directory(dir / "metadata");
  auto second = ingest_directory(dir / "metadata");
  EXPECT_TRUE(first.errors.empty());
  EXPECT_EQ(first.records, second.records);

  auto configs = load_config_directory(dir / "configs");
  EXPECT_TRUE(configs.errors.empty());
  EXPECT_EQ(configs.configs.size(), 40u);
  EXPECT_EQ(configs.manifests.size(), 20u);
  std::vector<FileError> errors;
  auto snapshot = assemble_snapshot(first.records, configs, errors);
  for (const auto& e : errors) ADD_FAILURE() << e.file << ": " << e.message;
  EXPECT_EQ(snapshot.records.size(), 40u);
  for (const auto& [id, r] : snapshot.records) EXPECT_TRUE(validate_record(r, snapshot.configs).ok()) << id;
  // Config data_kind overrides the parsed kind.
  EXPECT_EQ(snapshot.records.at("jp-nipr-specimen-0001").data_kind, DataKind::specimen);
  EXPECT_EQ(snapshot.records.at("jp-nipr-specimen-0000").config_ref, "cfg-iso-0");
  CatalogStore store;
  store.swap(snapshot);
  for (const auto& [id, r] : snapshot.records) EXPECT_EQ(*store.get(id), r);
}

TEST(ConfigDirectory, DuplicateIdsAndBadManifest) {
  TempDir dir;
  dir.write("a.yaml", "id: same\ndata_url_template: https://h/%YYYY.nc\ngranularity: monthly\n");
  dir.write("b.yml", "id: same\ndata_url_template: https://h/%YYYY.nc\ngranularity: monthly\n");
  dir.write("c.yaml", "id: c\ndata_url_template: https://h/%YYYY.nc\ngranularity: monthly\nmanifest_path: m.txt\n");
  dir.write("m.txt", "2020-02-01\n2020-01-01\n");
  auto set = load_config_directory(dir.path());
  EXPECT_EQ(set.configs.size(), 1u);
  ASSERT_EQ(set.errors.size(), 2u);
  EXPECT_EQ(set.errors[0].code, Errc::InconsistentConfig);
  EXPECT_EQ(set.errors[1].code, Errc::ManifestError);
}

TEST(AssembleSnapshot, RecordWithoutConfigIsReported) {
  ConfigSet configs;
  configs.configs["other"] = testing_support::make_config("other");
  std::vector<FileError> errors;
  auto r = parse_iso19115(testing_support::iso_xml({}));
  auto snap = assemble_snapshot({r}, configs, errors);
  EXPECT_TRUE(snap.records.empty());
  ASSERT_EQ(errors.size(), 1u);
  EXPECT_EQ(errors[0].file, r.id);
  EXPECT_EQ(errors[0].code, Errc::IntegrityError);
}

TEST(MappingTable, DocsFileEqualsBuiltin) {
  auto docs = read_file(std::string(RDCAT_SOURCE_DIR) + "/docs/mapping-table.json");
  EXPECT_EQ(docs, MappingTable::builtin_document());
  auto parsed = MappingTable::from_json(docs);
  EXPECT_EQ(parsed.schema(SourceSchema::iso19115).root, "gmd:MD_Metadata");
  EXPECT_EQ(parsed.schema(SourceSchema::spase_iugonet).root, "spase:Spase");
}

TEST(MappingTable, RejectsBadTables) {
  auto table = nlohmann::json::parse(MappingTable::builtin_document());
  auto expect_rejected = [](const nlohmann::json& doc) {
    try {
      MappingTable::from_json(doc.dump());
      ADD_FAILURE() << "accepted " << doc.dump().substr(0, 80);
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), Errc::ParseError);
    }
  };
  auto bad = table;
  bad["schemas"]["iso19115"]["rows"][0]["transform"] = "rot13";
  expect_rejected(bad);
  bad = table;
  bad["schemas"]["iso19115"]["rows"][0]["field"] = "colour";
  expect_rejected(bad);
  bad = table;
  bad["schemas"]["iso19115"]["rows"][0]["path"] = "nope:fileIdentifier";
  expect_rejected(bad);
  bad = table;
  bad["schemas"]["iso19115"]["rows"][0]["required"] = false;
  expect_rejected(bad);
  bad = table;
  bad["schemas"]["spase_iugonet"]["rows"][0]["transform"] = "iso_bbox";
  expect_rejected(bad);
  expect_rejected(nlohmann::json::array());
  EXPECT_THROW(MappingTable::from_json("{"), Error);
}

TEST(MappingTable, CustomTableChangesDisplayLabels) {
  auto doc = nlohmann::json::parse(MappingTable::builtin_document());
  doc["schemas"]["spase_iugonet"]["rows"][0]["display"] = "Identifier";
  auto table = MappingTable::from_json(doc.dump());
  IngestOptions o;
  o.table = &table;
  auto r = parse_spase(testing_support::spase_xml({}), o);
  EXPECT_EQ(r.metadata_display[0].key, "Identifier");
}
