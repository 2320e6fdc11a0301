#include "driftcurate/error.hpp"

namespace driftcurate {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::missing_file: return "MissingFile";
    case ErrorCode::malformed_header: return "MalformedHeader";
    case ErrorCode::truncated_payload: return "TruncatedPayload";
    case ErrorCode::bad_magic: return "BadMagic";
    case ErrorCode::unsupported_version: return "UnsupportedVersion";
    case ErrorCode::dim_overflow: return "DimOverflow";
    case ErrorCode::zero_dim: return "ZeroDim";
    case ErrorCode::io_failure: return "IoFailure";
    case ErrorCode::malformed_json: return "MalformedJson";
    case ErrorCode::duplicate_id: return "DuplicateId";
    case ErrorCode::range_error: return "RangeError";
    case ErrorCode::degenerate_dims: return "DegenerateDims";
    case ErrorCode::degenerate_input: return "DegenerateInput";
    case ErrorCode::one_sided_data: return "OneSidedData";
    case ErrorCode::unscorable_image: return "UnscorableImage";
    case ErrorCode::model_dimension_mismatch: return "ModelDimensionMismatch";
    case ErrorCode::too_few_rows: return "TooFewRows";
    case ErrorCode::too_many_levels: return "TooManyLevels";
    case ErrorCode::dim_mismatch: return "DimMismatch";
    case ErrorCode::no_positives: return "NoPositives";
    case ErrorCode::missing_prediction: return "MissingPrediction";
    case ErrorCode::missing_score: return "MissingScore";
    case ErrorCode::missing_dice: return "MissingDice";
    case ErrorCode::fraction_infeasible: return "FractionInfeasible";
    case ErrorCode::empty_input: return "EmptyInput";
    case ErrorCode::map_too_small: return "MapTooSmall";
    case ErrorCode::single_class: return "SingleClass";
    case ErrorCode::length_mismatch: return "LengthMismatch";
    case ErrorCode::degenerate: return "Degenerate";
    case ErrorCode::invalid_argument: return "InvalidArgument";
  }
  return "UnknownError";
}

}  // namespace driftcurate
