#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "rdcat/model.hpp"
#include "rdcat/xml.hpp"

namespace rdcat {

// One source element path mapped onto a record field.
//
// path       '/'-separated "prefix:Local" steps below the root element; '*'
//            matches any element
// field      target DatasetRecord field, or "" for display-only rows
// transform  how matched elements become values (see transform_names())
// required   MissingRequired(field) when nothing non-empty matches
// display    label in the record's metadata_display table, "" to omit
struct MappingRow {
  std::string path;
  std::string field;
  std::string transform;
  bool required = false;
  std::string display;
};

struct SchemaMapping {
  std::string root;  // "prefix:Local"
  std::map<std::string, std::vector<std::string>> namespaces;
  std::vector<MappingRow> rows;

  bool is_root(const XmlElement& element) const;
};

class MappingTable {
 public:
  // Parses and checks a table document; throws Error(ParseError) on unknown
  // fields/transforms, incompatible pairs, undeclared prefixes or a schema
  // without required rows for source_id and title.
  static MappingTable from_json(std::string_view document);
  // The table shipped in docs/mapping-table.json, compiled in.
  static const MappingTable& builtin();
  static std::string_view builtin_document();

  const SchemaMapping& schema(SourceSchema schema) const;

  static std::vector<std::string> transform_names();
  static std::vector<std::string> field_names();

 private:
  std::map<SourceSchema, SchemaMapping> schemas_;
};

// Applies the schema's rows to a document already known to have the schema's
// root. Fills source_id, title, description, discipline, keywords, site,
// temporal_coverage, contacts, thumbnail and metadata_display. Description
// falls back to the title; a coverage with only a start becomes [start,
// start]. Throws Error(MissingRequired) with the field name as message.
DatasetRecord apply_mapping(const XmlElement& root, const SchemaMapping& mapping, SourceSchema schema);

// Elements reached by `path` from `root`.
std::vector<const XmlElement*> select(const XmlElement& root, std::string_view path, const SchemaMapping& mapping);

}  // namespace rdcat
