#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace shearsparse {

enum class ErrorKind {
  CurvatureExceeded,
  OutOfUnitSquare,
  DegenerateTangent,
  C2NormExceeded,
  InsufficientMoments,
  ConditionViolated,
  ResolutionTooCoarse,
  NotAFrame,
  MaxIterExceeded,
  DegenerateFit,
  NoIntersectingShearlets,
  ConfigInvalid,
  ExperimentFailed,
  ManifestCorrupt,
  ParseError,
  IoError,
  InvalidArgument,
};

constexpr std::string_view to_string(ErrorKind k) {
  switch (k) {
    case ErrorKind::CurvatureExceeded: return "CurvatureExceeded";
    case ErrorKind::OutOfUnitSquare: return "OutOfUnitSquare";
    case ErrorKind::DegenerateTangent: return "DegenerateTangent";
    case ErrorKind::C2NormExceeded: return "C2NormExceeded";
    case ErrorKind::InsufficientMoments: return "InsufficientMoments";
    case ErrorKind::ConditionViolated: return "ConditionViolated";
    case ErrorKind::ResolutionTooCoarse: return "ResolutionTooCoarse";
    case ErrorKind::NotAFrame: return "NotAFrame";
    case ErrorKind::MaxIterExceeded: return "MaxIterExceeded";
    case ErrorKind::DegenerateFit: return "DegenerateFit";
    case ErrorKind::NoIntersectingShearlets: return "NoIntersectingShearlets";
    case ErrorKind::ConfigInvalid: return "ConfigInvalid";
    case ErrorKind::ExperimentFailed: return "ExperimentFailed";
    case ErrorKind::ManifestCorrupt: return "ManifestCorrupt";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::IoError: return "IoError";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

// Every failure in the library is reported through this one exception type;
// callers branch on kind().
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what, std::string field = {})
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind), field_(std::move(field)) {}

  ErrorKind kind() const noexcept { return kind_; }
  // Offending config field, when there is one.
  const std::string& field() const noexcept { return field_; }

 private:
  ErrorKind kind_;
  std::string field_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

[[noreturn]] inline void fail_field(ErrorKind kind, const std::string& field, const std::string& what) {
  throw Error(kind, "field '" + field + "': " + what, field);
}

}  // namespace shearsparse
