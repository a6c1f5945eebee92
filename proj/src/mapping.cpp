#include "rdcat/mapping.hpp"

#include <algorithm>
#include <set>

#include <json.hpp>

#include "rdcat/error.hpp"
#include "rdcat/text.hpp"

namespace rdcat {

extern const char kBuiltinMappingTable[];

namespace {

constexpr std::string_view kGco = "http://www.isotc211.org/2005/gco";
constexpr std::string_view kGmd = "http://www.isotc211.org/2005/gmd";

struct TransformInfo {
  std::string_view name;
  std::vector<std::string_view> fields;
};

const std::vector<TransformInfo>& transforms() {
  static const std::vector<TransformInfo> table{
      {"text", {"", "source_id", "title", "description", "discipline", "keywords", "site.name", "thumbnail"}},
      {"localized", {"", "title", "description"}},
      {"iso_character_string", {"", "source_id", "title", "description", "discipline", "keywords", "site.name", "thumbnail"}},
      {"code_list", {"", "discipline", "keywords"}},
      {"timestamp", {"", "temporal_start", "temporal_end"}},
      {"decimal", {"", "site.latitude", "site.longitude"}},
      {"spase_contact", {"", "contacts"}},
      {"iso_contact", {"", "contacts"}},
      {"iso_bbox", {"", "site.bbox"}},
  };
  return table;
}

const TransformInfo* find_transform(std::string_view name) {
  for (const auto& t : transforms())
    if (t.name == name) return &t;
  return nullptr;
}

std::pair<std::string_view, std::string_view> split_step(std::string_view step) {
  auto colon = step.find(':');
  if (colon == std::string_view::npos) return {{}, step};
  return {step.substr(0, colon), step.substr(colon + 1)};
}

bool step_matches(const XmlElement& el, std::string_view step, const SchemaMapping& mapping) {
  if (step == "*") return true;
  auto [prefix, local] = split_step(step);
  if (el.name != local) return false;
  auto it = mapping.namespaces.find(std::string(prefix));
  if (it == mapping.namespaces.end()) return prefix.empty() && el.ns.empty();
  return std::find(it->second.begin(), it->second.end(), el.ns) != it->second.end();
}

// Text of a gco:CharacterString-style child, or the element's own text.
std::string character_string(const XmlElement& el) {
  for (const auto& c : el.children)
    if (c.ns == kGco && (c.name == "CharacterString" || c.name == "Date" || c.name == "DateTime" || c.name == "Decimal"))
      return c.text;
  for (const auto& c : el.children)
    if (c.name == "Anchor") return c.text;
  return el.text;
}

std::optional<std::string> iso_japanese(const XmlElement& el) {
  const auto* free = el.child(kGmd, "PT_FreeText");
  if (!free) return std::nullopt;
  for (const auto* group : free->children_named(kGmd, "textGroup"))
    for (const auto* s : group->children_named(kGmd, "LocalisedCharacterString")) {
      auto locale = to_lower_ascii(s->attribute("locale").value_or(""));
      if (locale.find("ja") != std::string::npos || locale.find("jpn") != std::string::npos)
        if (!s->text.empty()) return s->text;
    }
  return std::nullopt;
}

bool is_japanese_lang(const XmlElement& el) {
  auto lang = to_lower_ascii(el.attribute("xml:lang").value_or(""));
  return lang == "ja" || lang.starts_with("ja-") || lang == "jpn";
}

std::string last_segment(std::string_view s) {
  auto slash = s.find_last_of('/');
  return std::string(slash == std::string_view::npos ? s : s.substr(slash + 1));
}

const XmlElement* descend(const XmlElement* el, std::initializer_list<std::string_view> names) {
  for (auto name : names) {
    if (!el) return nullptr;
    el = el->child(kGmd, name);
  }
  return el;
}

double parse_decimal(const std::string& text, std::string_view what) {
  try {
    std::size_t used = 0;
    double v = std::stod(text, &used);
    if (used == text.size()) return v;
  } catch (const std::exception&) {
  }
  throw Error(Errc::ParseError, std::string(what) + ": '" + text + "' is not a number");
}

Contact spase_contact(const XmlElement& el) {
  Contact c;
  std::vector<std::string> roles;
  for (const auto& child : el.children) {
    if (child.name == "PersonID") c.name = last_segment(child.text);
    if (child.name == "Role") roles.push_back(child.text);
  }
  for (std::size_t i = 0; i < roles.size(); ++i) c.role += (i ? ", " : "") + roles[i];
  return c;
}

Contact iso_contact(const XmlElement& el) {
  Contact c;
  auto text_of = [&](std::string_view name) {
    const auto* x = el.child(kGmd, name);
    return x ? character_string(*x) : std::string();
  };
  c.name = text_of("individualName");
  c.affiliation = text_of("organisationName");
  if (c.name.empty()) c.name = c.affiliation;
  if (c.name.empty()) c.name = text_of("positionName");
  if (const auto* role = descend(&el, {"role", "CI_RoleCode"}))
    c.role = role->attribute("codeListValue").value_or(role->text);
  if (const auto* mail = descend(&el, {"contactInfo", "CI_Contact", "address", "CI_Address", "electronicMailAddress"})) {
    auto m = character_string(*mail);
    if (!m.empty()) c.email = m;
  }
  return c;
}

std::string contact_display(const Contact& c) {
  std::string out = c.name;
  if (!c.affiliation.empty() && c.affiliation != c.name) out += ", " + c.affiliation;
  if (!c.role.empty()) out += " (" + c.role + ")";
  return out;
}

std::string join(const std::vector<std::string>& parts, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

SourceSchema schema_from_key(const std::string& key) {
  try {
    return parse_source_schema(key);
  } catch (const Error&) {
    throw Error(Errc::ParseError, "mapping table names unknown schema '" + key + "'");
  }
}

}  // namespace

bool SchemaMapping::is_root(const XmlElement& element) const { return step_matches(element, root, *this); }

std::vector<std::string> MappingTable::transform_names() {
  std::vector<std::string> out;
  for (const auto& t : transforms()) out.emplace_back(t.name);
  return out;
}

std::vector<std::string> MappingTable::field_names() {
  std::set<std::string> out;
  for (const auto& t : transforms())
    for (auto f : t.fields)
      if (!f.empty()) out.emplace(f);
  return {out.begin(), out.end()};
}

MappingTable MappingTable::from_json(std::string_view document) {
  MappingTable table;
  try {
    auto doc = nlohmann::json::parse(document);
    for (const auto& [key, schema_doc] : doc.at("schemas").items()) {
      SchemaMapping m;
      m.root = schema_doc.at("root").get<std::string>();
      m.namespaces = schema_doc.at("namespaces").get<std::map<std::string, std::vector<std::string>>>();
      for (const auto& row : schema_doc.at("rows"))
        m.rows.push_back({row.at("path").get<std::string>(), row.at("field").get<std::string>(),
                          row.at("transform").get<std::string>(), row.value("required", false),
                          row.value("display", std::string())});
      table.schemas_[schema_from_key(key)] = std::move(m);
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::ParseError, std::string("mapping table: ") + e.what());
  }

  for (const auto& [schema, m] : table.schemas_) {
    const std::string where = "mapping table (" + std::string(to_string(schema)) + "): ";
    auto check_prefix = [&](std::string_view step) {
      auto [prefix, local] = split_step(step);
      if (!prefix.empty() && !m.namespaces.contains(std::string(prefix)))
        throw Error(Errc::ParseError, where + "undeclared prefix '" + std::string(prefix) + "'");
    };
    check_prefix(m.root);
    std::set<std::string> required;
    for (const auto& row : m.rows) {
      const auto* t = find_transform(row.transform);
      if (!t) throw Error(Errc::ParseError, where + "unknown transform '" + row.transform + "'");
      if (std::find(t->fields.begin(), t->fields.end(), row.field) == t->fields.end())
        throw Error(Errc::ParseError, where + "transform '" + row.transform + "' cannot fill field '" + row.field + "'");
      if (row.field.empty() && row.display.empty())
        throw Error(Errc::ParseError, where + "row '" + row.path + "' has neither field nor display label");
      for (const auto& step : split(row.path, '/')) check_prefix(step);
      if (row.required) required.insert(row.field);
    }
    for (const char* f : {"source_id", "title"})
      if (!required.contains(f)) throw Error(Errc::ParseError, where + "no required row for '" + f + "'");
  }
  for (auto s : {SourceSchema::spase_iugonet, SourceSchema::iso19115})
    if (!table.schemas_.contains(s))
      throw Error(Errc::ParseError, "mapping table lacks schema '" + std::string(to_string(s)) + "'");
  return table;
}

std::string_view MappingTable::builtin_document() { return kBuiltinMappingTable; }

const MappingTable& MappingTable::builtin() {
  static const MappingTable table = from_json(builtin_document());
  return table;
}

const SchemaMapping& MappingTable::schema(SourceSchema schema) const { return schemas_.at(schema); }

std::vector<const XmlElement*> select(const XmlElement& root, std::string_view path, const SchemaMapping& mapping) {
  std::vector<const XmlElement*> current{&root};
  for (const auto& step : split(path, '/')) {
    if (step.empty()) continue;
    std::vector<const XmlElement*> next;
    for (const auto* el : current)
      for (const auto& child : el->children)
        if (step_matches(child, step, mapping)) next.push_back(&child);
    current = std::move(next);
  }
  return current;
}

DatasetRecord apply_mapping(const XmlElement& root, const SchemaMapping& mapping, SourceSchema schema) {
  DatasetRecord r;
  r.source_schema = schema;
  std::optional<Timestamp> start, end;
  std::optional<Site> site;
  auto site_ref = [&]() -> Site& {
    if (!site) site.emplace();
    return *site;
  };

  for (const auto& row : mapping.rows) {
    std::vector<std::string> shown;
    bool found = false;
    for (const XmlElement* el : select(root, row.path, mapping)) {
      const std::string& t = row.transform;
      const std::string& f = row.field;

      if (t == "spase_contact" || t == "iso_contact") {
        Contact c = t == "spase_contact" ? spase_contact(*el) : iso_contact(*el);
        if (c.name.empty()) continue;
        found = true;
        shown.push_back(contact_display(c));
        if (f == "contacts") r.contacts.push_back(std::move(c));
        continue;
      }
      if (t == "iso_bbox") {
        auto corner = [&](std::string_view name) -> std::optional<double> {
          const auto* x = el->child(kGmd, name);
          if (!x) return std::nullopt;
          return parse_decimal(character_string(*x), name);
        };
        auto w = corner("westBoundLongitude"), e = corner("eastBoundLongitude");
        auto s = corner("southBoundLatitude"), n = corner("northBoundLatitude");
        if (!(w && e && s && n)) continue;
        found = true;
        shown.push_back(format_double(*s) + ".." + format_double(*n) + ", " + format_double(*w) + ".." + format_double(*e));
        site_ref().latitude = (*s + *n) / 2.0;
        site_ref().longitude = (*w + *e) / 2.0;
        continue;
      }

      std::string value;
      std::optional<std::string> ja;
      if (t == "iso_character_string") {
        value = character_string(*el);
        ja = iso_japanese(*el);
      } else if (t == "code_list") {
        value = el->attribute("codeListValue").value_or(el->text);
      } else if (t == "localized" && is_japanese_lang(*el)) {
        if (!el->text.empty() && f == "title" && !r.title.ja) r.title.ja = el->text;
        if (!el->text.empty() && f == "description" && !r.description.ja) r.description.ja = el->text;
        continue;
      } else {
        value = el->text;
      }
      if (value.empty()) continue;
      found = true;
      shown.push_back(value);

      if (f == "source_id") {
        if (r.source_id.empty()) r.source_id = value;
      } else if (f == "title" || f == "description") {
        LocalizedText& target = f == "title" ? r.title : r.description;
        if (target.en.empty()) target.en = value;
        if (ja && !target.ja) target.ja = ja;
      } else if (f == "discipline") {
        r.discipline.push_back(value);
      } else if (f == "keywords") {
        r.keywords.push_back(value);
      } else if (f == "site.name") {
        if (site_ref().name.empty()) site_ref().name = value;
      } else if (f == "site.latitude") {
        site_ref().latitude = parse_decimal(value, "latitude");
      } else if (f == "site.longitude") {
        site_ref().longitude = parse_decimal(value, "longitude");
      } else if (f == "thumbnail") {
        if (r.thumbnail.empty()) r.thumbnail = value;
      } else if (f == "temporal_start") {
        if (!start) start = parse_timestamp(value);
      } else if (f == "temporal_end") {
        if (!end) end = parse_timestamp(value);
      }
    }
    if (row.required && !found) throw Error(Errc::MissingRequired, row.field);
    if (!row.display.empty() && !shown.empty()) r.metadata_display.push_back({row.display, join(shown, "; ")});
  }

  if (r.description.en.empty()) {
    r.description.en = r.title.en;
    if (!r.description.ja) r.description.ja = r.title.ja;
  }
  if (start) r.temporal_coverage = TimeSpan{*start, end.value_or(*start)};
  r.site = site;
  return r;
}

}  // namespace rdcat
