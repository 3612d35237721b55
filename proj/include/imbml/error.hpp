#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace imbml {

enum class ErrorCode {
  // data
  MissingColumn,
  BadLevel,
  NonNumeric,
  EmptyData,
  InvalidSchema,
  MissingTripData,
  NoTrips,
  CalibrationFailure,
  // resampling
  TooFewMinority,
  SingularCovariance,
  // models
  DegenerateLabels,
  ColumnMismatch,
  NonFiniteLoss,
  AllZeroWeights,
  // metrics
  LengthMismatch,
  NonBinary,
  SingleClass,
  // harness / importance
  TooSmall,
  KTooLarge,
  MissingConstructTags,
  // plumbing
  InvalidConfig,
  Io,
};

std::string_view to_string(ErrorCode code);

/// Validation, model and IO failures all surface as this exception; the
/// code lets the CLI pick an exit status.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace imbml
