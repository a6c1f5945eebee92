#include "rdcat/timeutil.hpp"

#include <cctype>
#include <charconv>
#include <cstdio>

#include "rdcat/error.hpp"

namespace rdcat {

namespace {

using namespace std::chrono;

class Cursor {
 public:
  explicit Cursor(std::string_view text) : text_(text) {}

  bool done() const { return pos_ >= text_.size(); }
  char peek() const { return done() ? '\0' : text_[pos_]; }
  bool accept(char c) {
    if (peek() != c) return false;
    ++pos_;
    return true;
  }
  std::string_view rest() const { return text_.substr(pos_); }

  int digits(std::size_t count) {
    int value = 0;
    for (std::size_t i = 0; i < count; ++i) {
      if (done() || !std::isdigit(static_cast<unsigned char>(peek()))) fail();
      value = value * 10 + (text_[pos_++] - '0');
    }
    return value;
  }

  [[noreturn]] void fail() const {
    throw Error(Errc::ParseError, "invalid ISO 8601 timestamp '" + std::string(text_) + "'");
  }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;
};

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

}  // namespace

Instant parse_instant(std::string_view raw) {
  Cursor in(trim(raw));
  bool negative_year = in.accept('-');
  int year = in.digits(4);
  if (negative_year) year = -year;
  if (!in.accept('-')) in.fail();
  int month = in.digits(2);
  if (!in.accept('-')) in.fail();
  int day = in.digits(2);

  year_month_day ymd{std::chrono::year{year}, std::chrono::month{static_cast<unsigned>(month)},
                     std::chrono::day{static_cast<unsigned>(day)}};
  if (!ymd.ok()) in.fail();

  microseconds tod{0};
  if (in.accept('T') || in.accept('t') || in.accept(' ')) {
    int hh = in.digits(2);
    if (!in.accept(':')) in.fail();
    int mm = in.digits(2);
    int ss = 0;
    long long frac_us = 0;
    if (in.accept(':')) {
      ss = in.digits(2);
      if (in.accept('.')) {
        int scale = 100000;
        bool any = false;
        while (std::isdigit(static_cast<unsigned char>(in.peek()))) {
          int d = in.digits(1);
          if (scale > 0) frac_us += d * scale;
          scale /= 10;
          any = true;
        }
        if (!any) in.fail();
      }
    }
    if (hh > 23 || mm > 59 || ss > 60) in.fail();
    tod = hours{hh} + minutes{mm} + seconds{ss} + microseconds{frac_us};
  }

  minutes offset{0};
  std::string_view suffix = trim(in.rest());
  if (suffix == "Z" || suffix == "z" || suffix == "UTC" || suffix.empty()) {
  } else if (suffix.size() == 6 && (suffix[0] == '+' || suffix[0] == '-') && suffix[3] == ':') {
    Cursor off(suffix.substr(1));
    int oh = off.digits(2);
    off.accept(':');
    int om = off.digits(2);
    offset = hours{oh} + minutes{om};
    if (suffix[0] == '-') offset = -offset;
  } else {
    in.fail();
  }

  return Instant{sys_days{ymd}} + tod - offset;
}

Timestamp parse_timestamp(std::string_view text) {
  return floor<seconds>(parse_instant(text));
}

std::string format_timestamp(Timestamp t) {
  auto day_point = floor<days>(t);
  year_month_day ymd{day_point};
  hh_mm_ss hms{t - day_point};
  char buf[40];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02dZ", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                static_cast<int>(hms.hours().count()), static_cast<int>(hms.minutes().count()),
                static_cast<int>(hms.seconds().count()));
  return buf;
}

std::string format_instant(Instant t) {
  auto whole = floor<seconds>(t);
  auto frac = (t - whole).count();
  std::string out = format_timestamp(whole);
  if (frac == 0) return out;
  char buf[8];
  std::snprintf(buf, sizeof buf, "%06lld", static_cast<long long>(frac));
  std::string digits(buf);
  while (!digits.empty() && digits.back() == '0') digits.pop_back();
  out.insert(out.size() - 1, "." + digits);
  return out;
}

std::string format_date(Timestamp t) {
  return format_timestamp(t).substr(0, 10);
}

Timestamp make_timestamp(int year, unsigned month, unsigned day, int hour, int minute, int second) {
  return sys_days{std::chrono::year{year} / std::chrono::month{month} / std::chrono::day{day}} +
         hours{hour} + minutes{minute} + seconds{second};
}

}  // namespace rdcat
