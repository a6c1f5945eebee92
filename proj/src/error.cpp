#include "rdcat/error.hpp"

namespace rdcat {

std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::ParseError: return "ParseError";
    case Errc::InvalidTemplate: return "InvalidTemplate";
    case Errc::InconsistentConfig: return "InconsistentConfig";
    case Errc::IntegrityError: return "IntegrityError";
    case Errc::XmlError: return "XmlError";
    case Errc::MissingRequired: return "MissingRequired";
    case Errc::UnsupportedRoot: return "UnsupportedRoot";
    case Errc::IoError: return "IoError";
    case Errc::InvertedRange: return "InvertedRange";
    case Errc::EmptySelection: return "EmptySelection";
    case Errc::ManifestError: return "ManifestError";
    case Errc::UnsupportedFormat: return "UnsupportedFormat";
    case Errc::TruncatedFile: return "TruncatedFile";
    case Errc::MalformedHeader: return "MalformedHeader";
    case Errc::MixedDimensions: return "MixedDimensions";
    case Errc::NoSuchVariable: return "NoSuchVariable";
    case Errc::NoTimeCoordinate: return "NoTimeCoordinate";
    case Errc::NonScalarVariable: return "NonScalarVariable";
    case Errc::NoOverlap: return "NoOverlap";
    case Errc::DegenerateInput: return "DegenerateInput";
    case Errc::SizeLimit: return "SizeLimit";
    case Errc::DimensionMismatch: return "DimensionMismatch";
    case Errc::InvalidHistogram: return "InvalidHistogram";
    case Errc::UnknownDataset: return "UnknownDataset";
    case Errc::InvalidPage: return "InvalidPage";
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::UpstreamFetchFailed: return "UpstreamFetchFailed";
  }
  return "Unknown";
}

}  // namespace rdcat
