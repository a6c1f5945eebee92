#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace rdcat {

// Namespace-resolved element. `ns` is the namespace URI (empty when the
// element has none); `name` is the local name. Text is the trimmed
// concatenation of the element's own character data.
struct XmlElement {
  std::string ns;
  std::string name;
  std::vector<std::pair<std::string, std::string>> attributes;  // qualified names as written
  std::string text;
  std::vector<XmlElement> children;

  // Matches the qualified name first, then the local part of prefixed names.
  std::optional<std::string> attribute(std::string_view name) const;
  const XmlElement* child(std::string_view ns, std::string_view name) const;
  std::vector<const XmlElement*> children_named(std::string_view ns, std::string_view name) const;
};

// Throws Error(XmlError) for malformed documents, no root element or an
// undeclared namespace prefix.
XmlElement parse_xml(std::string_view document);

}  // namespace rdcat
