#include "rdcat/filename_template.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <utility>

#include "rdcat/error.hpp"

namespace rdcat {

namespace {

// Longest spelling first so "%YYYY" wins over "%YY".
constexpr std::array<std::pair<std::string_view, TemplateToken>, 5> kTokens{{
    {"%YYYY", TemplateToken::Year4},
    {"%YY", TemplateToken::Year2},
    {"%mm", TemplateToken::Month},
    {"%dd", TemplateToken::Day},
    {"%HH", TemplateToken::Hour},
}};

std::string two_digits(long long v) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "%02lld", v);
  return buf;
}

}  // namespace

FilenameTemplate FilenameTemplate::parse(std::string_view text) {
  FilenameTemplate out;
  out.text_ = std::string(text);
  std::string literal;
  std::size_t i = 0;
  while (i < text.size()) {
    if (text[i] != '%') {
      literal.push_back(text[i++]);
      continue;
    }
    auto match = std::find_if(kTokens.begin(), kTokens.end(),
                              [&](const auto& t) { return text.substr(i).starts_with(t.first); });
    if (match == kTokens.end()) {
      std::size_t end = std::min(text.size(), i + 3);
      throw Error(Errc::InvalidTemplate, "unknown token '" + std::string(text.substr(i, end - i)) +
                                             "' in template '" + std::string(text) + "'");
    }
    if (!literal.empty()) out.parts_.emplace_back(std::exchange(literal, {}));
    out.parts_.emplace_back(match->second);
    i += match->first.size();
  }
  if (!literal.empty()) out.parts_.emplace_back(std::move(literal));
  return out;
}

std::string FilenameTemplate::expand(Timestamp t) const {
  using namespace std::chrono;
  auto day_point = floor<days>(t);
  year_month_day ymd{day_point};
  auto hour = floor<hours>(t - day_point).count();
  int year = static_cast<int>(ymd.year());

  std::string out;
  out.reserve(text_.size() + 8);
  for (const auto& part : parts_) {
    if (const auto* lit = std::get_if<std::string>(&part)) {
      out += *lit;
      continue;
    }
    switch (std::get<TemplateToken>(part)) {
      case TemplateToken::Year4: {
        char buf[16];
        std::snprintf(buf, sizeof buf, "%04d", year);
        out += buf;
        break;
      }
      case TemplateToken::Year2: out += two_digits(((year % 100) + 100) % 100); break;
      case TemplateToken::Month: out += two_digits(static_cast<unsigned>(ymd.month())); break;
      case TemplateToken::Day: out += two_digits(static_cast<unsigned>(ymd.day())); break;
      case TemplateToken::Hour: out += two_digits(hour); break;
    }
  }
  return out;
}

bool FilenameTemplate::contains(TemplateToken token) const {
  return std::any_of(parts_.begin(), parts_.end(), [&](const TemplatePart& p) {
    const auto* t = std::get_if<TemplateToken>(&p);
    return t && *t == token;
  });
}

bool FilenameTemplate::has_time_tokens() const {
  return std::any_of(parts_.begin(), parts_.end(),
                     [](const TemplatePart& p) { return std::holds_alternative<TemplateToken>(p); });
}

std::string expand_template(std::string_view text, Timestamp t) {
  return FilenameTemplate::parse(text).expand(t);
}

}  // namespace rdcat
