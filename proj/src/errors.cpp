#include "tcsim/errors.hpp"

namespace tcsim {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::invalid_dimension: return "invalid_dimension";
    case ErrorCode::resource: return "resource";
    case ErrorCode::singularity: return "singularity";
    case ErrorCode::unsupported_control: return "unsupported_control";
    case ErrorCode::out_of_range: return "out_of_range";
    case ErrorCode::degenerate_labeling: return "degenerate_labeling";
    case ErrorCode::invalid_shape: return "invalid_shape";
    case ErrorCode::schedule: return "schedule";
    case ErrorCode::filter: return "filter";
    case ErrorCode::sampling: return "sampling";
    case ErrorCode::integration: return "integration";
    case ErrorCode::config: return "config";
    case ErrorCode::low_contrast: return "low_contrast";
    case ErrorCode::calibration: return "calibration";
    case ErrorCode::fit: return "fit";
    case ErrorCode::optimizer: return "optimizer";
    case ErrorCode::invalid_interleave: return "invalid_interleave";
    case ErrorCode::unsupported: return "unsupported";
    case ErrorCode::division: return "division";
  }
  return "unknown";
}

}  // namespace tcsim
