#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace lse {

enum class ErrorCode {
  NonPositiveSpacing,
  DomainTooCoarse,
  NonConformingSpacing,
  GridMismatch,
  ShrinkingDomain,
  SpacingMismatch,
  MissingOriginWell,
  FlatPotential,
  DuplicateWells,
  InvalidWidth,
  NonPositiveEpsilon,
  InvalidDelta,
  InvalidExponent,
  ZeroField,
  DomainTooSmall,
  SeedOutsideRegion,
  InvalidConfig,
  NotConverged,
  Io,
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NonPositiveSpacing: return "NonPositiveSpacing";
    case ErrorCode::DomainTooCoarse: return "DomainTooCoarse";
    case ErrorCode::NonConformingSpacing: return "NonConformingSpacing";
    case ErrorCode::GridMismatch: return "GridMismatch";
    case ErrorCode::ShrinkingDomain: return "ShrinkingDomain";
    case ErrorCode::SpacingMismatch: return "SpacingMismatch";
    case ErrorCode::MissingOriginWell: return "MissingOriginWell";
    case ErrorCode::FlatPotential: return "FlatPotential";
    case ErrorCode::DuplicateWells: return "DuplicateWells";
    case ErrorCode::InvalidWidth: return "InvalidWidth";
    case ErrorCode::NonPositiveEpsilon: return "NonPositiveEpsilon";
    case ErrorCode::InvalidDelta: return "InvalidDelta";
    case ErrorCode::InvalidExponent: return "InvalidExponent";
    case ErrorCode::ZeroField: return "ZeroField";
    case ErrorCode::DomainTooSmall: return "DomainTooSmall";
    case ErrorCode::SeedOutsideRegion: return "SeedOutsideRegion";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::NotConverged: return "NotConverged";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

/// Every failure raised by the library carries one of the codes above so
/// callers (and tests) can branch on the kind without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace lse
