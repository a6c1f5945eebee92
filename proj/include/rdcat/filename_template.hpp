#pragma once

#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "rdcat/timeutil.hpp"

namespace rdcat {

// Date tokens recognised in data/visual URL templates:
//   %YYYY  4-digit year      %YY  2-digit year
//   %mm    2-digit month     %dd  2-digit day
//   %HH    2-digit hour
// Any other '%' sequence is rejected.
enum class TemplateToken { Year4, Year2, Month, Day, Hour };

using TemplatePart = std::variant<std::string, TemplateToken>;

class FilenameTemplate {
 public:
  // Throws Error(InvalidTemplate) on an unknown token.
  static FilenameTemplate parse(std::string_view text);

  std::string expand(Timestamp t) const;

  const std::string& text() const { return text_; }
  const std::vector<TemplatePart>& parts() const { return parts_; }
  bool contains(TemplateToken token) const;
  bool has_time_tokens() const;

 private:
  std::string text_;
  std::vector<TemplatePart> parts_;
};

// Convenience wrapper: validates then substitutes.
std::string expand_template(std::string_view text, Timestamp t);

}  // namespace rdcat
