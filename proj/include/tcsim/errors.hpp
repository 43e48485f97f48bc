#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace tcsim {

enum class ErrorCode {
  invalid_dimension,
  resource,
  singularity,
  unsupported_control,
  out_of_range,
  degenerate_labeling,
  invalid_shape,
  schedule,
  filter,
  sampling,
  integration,
  config,
  low_contrast,
  calibration,
  fit,
  optimizer,
  invalid_interleave,
  unsupported,
  division,
};

std::string_view to_string(ErrorCode code);

class SimError : public std::runtime_error {
 public:
  SimError(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace tcsim
