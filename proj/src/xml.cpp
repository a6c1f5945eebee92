#include "rdcat/xml.hpp"

#include <map>
#include <sstream>

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>

#include "rdcat/error.hpp"
#include "rdcat/text.hpp"

namespace rdcat {

namespace {

namespace pt = boost::property_tree;
using Scope = std::map<std::string, std::string, std::less<>>;

std::pair<std::string_view, std::string_view> split_qname(std::string_view qname) {
  auto colon = qname.find(':');
  if (colon == std::string_view::npos) return {{}, qname};
  return {qname.substr(0, colon), qname.substr(colon + 1)};
}

XmlElement convert(const std::string& qname, const pt::ptree& node, Scope scope) {
  XmlElement el;
  if (auto attrs = node.get_child_optional("<xmlattr>")) {
    for (const auto& [key, value] : *attrs) {
      const std::string& v = value.data();
      if (key == "xmlns")
        scope[""] = v;
      else if (key.starts_with("xmlns:"))
        scope[key.substr(6)] = v;
      el.attributes.emplace_back(key, v);
    }
  }
  auto [prefix, local] = split_qname(qname);
  auto it = scope.find(prefix);
  if (it == scope.end()) {
    if (!prefix.empty()) throw Error(Errc::XmlError, "undeclared namespace prefix '" + std::string(prefix) + "'");
  } else {
    el.ns = it->second;
  }
  el.name = std::string(local);
  el.text = std::string(trim(node.data()));
  for (const auto& [key, child] : node) {
    if (key.starts_with("<")) continue;
    el.children.push_back(convert(key, child, scope));
  }
  return el;
}

}  // namespace

std::optional<std::string> XmlElement::attribute(std::string_view wanted) const {
  for (const auto& [key, value] : attributes)
    if (key == wanted) return value;
  for (const auto& [key, value] : attributes)
    if (split_qname(key).second == wanted) return value;
  return std::nullopt;
}

const XmlElement* XmlElement::child(std::string_view want_ns, std::string_view want_name) const {
  for (const auto& c : children)
    if (c.ns == want_ns && c.name == want_name) return &c;
  return nullptr;
}

std::vector<const XmlElement*> XmlElement::children_named(std::string_view want_ns, std::string_view want_name) const {
  std::vector<const XmlElement*> out;
  for (const auto& c : children)
    if (c.ns == want_ns && c.name == want_name) out.push_back(&c);
  return out;
}

XmlElement parse_xml(std::string_view document) {
  pt::ptree tree;
  try {
    std::istringstream in{std::string(document)};
    pt::read_xml(in, tree);
  } catch (const pt::xml_parser_error& e) {
    throw Error(Errc::XmlError, e.what());
  }
  for (const auto& [key, node] : tree) {
    if (key.starts_with("<")) continue;
    Scope scope{{"xml", "http://www.w3.org/XML/1998/namespace"}};
    return convert(key, node, std::move(scope));
  }
  throw Error(Errc::XmlError, "document has no root element");
}

}  // namespace rdcat
