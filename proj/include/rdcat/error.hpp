#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace rdcat {

enum class Errc {
  ParseError,
  InvalidTemplate,
  InconsistentConfig,
  IntegrityError,
  XmlError,
  MissingRequired,
  UnsupportedRoot,
  IoError,
  InvertedRange,
  EmptySelection,
  ManifestError,
  UnsupportedFormat,
  TruncatedFile,
  MalformedHeader,
  MixedDimensions,
  NoSuchVariable,
  NoTimeCoordinate,
  NonScalarVariable,
  NoOverlap,
  DegenerateInput,
  SizeLimit,
  DimensionMismatch,
  InvalidHistogram,
  UnknownDataset,
  InvalidPage,
  InvalidArgument,
  UpstreamFetchFailed,
};

std::string_view to_string(Errc code) noexcept;

// Every failure raised by the library carries one of the codes above so
// callers (CLI, HTTP layer, tests) can branch without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code), detail_(message) {}

  Errc code() const noexcept { return code_; }
  // The message without the code prefix; for MissingRequired, the field name.
  const std::string& detail() const noexcept { return detail_; }

 private:
  Errc code_;
  std::string detail_;
};

}  // namespace rdcat
