#include "imbml/error.hpp"

namespace imbml {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::MissingColumn: return "MissingColumn";
    case ErrorCode::BadLevel: return "BadLevel";
    case ErrorCode::NonNumeric: return "NonNumeric";
    case ErrorCode::EmptyData: return "EmptyData";
    case ErrorCode::InvalidSchema: return "InvalidSchema";
    case ErrorCode::MissingTripData: return "MissingTripData";
    case ErrorCode::NoTrips: return "NoTrips";
    case ErrorCode::CalibrationFailure: return "CalibrationFailure";
    case ErrorCode::TooFewMinority: return "TooFewMinority";
    case ErrorCode::SingularCovariance: return "SingularCovariance";
    case ErrorCode::DegenerateLabels: return "DegenerateLabels";
    case ErrorCode::ColumnMismatch: return "ColumnMismatch";
    case ErrorCode::NonFiniteLoss: return "NonFiniteLoss";
    case ErrorCode::AllZeroWeights: return "AllZeroWeights";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::NonBinary: return "NonBinary";
    case ErrorCode::SingleClass: return "SingleClass";
    case ErrorCode::TooSmall: return "TooSmall";
    case ErrorCode::KTooLarge: return "KTooLarge";
    case ErrorCode::MissingConstructTags: return "MissingConstructTags";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

}  // namespace imbml
