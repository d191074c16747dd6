#include "vlcsim/errors.hpp"

#include <sstream>

namespace vlcsim {

namespace {

std::string join(const std::vector<std::string>& items) {
  std::ostringstream out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out << ", ";
    out << items[i];
  }
  return out.str();
}

}  // namespace

LengthMismatchError::LengthMismatchError(std::size_t sent, std::size_t received)
    : Error("bit stream length mismatch: sent " + std::to_string(sent) + " bits, received " +
            std::to_string(received) + " bits"),
      sent_(sent),
      received_(received) {}

ValidationError::ValidationError(std::vector<std::string> keys)
    : Error("invalid configuration keys: " + join(keys)), keys_(std::move(keys)) {}

ValidationError::ValidationError(std::vector<std::string> keys, const std::string& detail)
    : Error("invalid configuration keys: " + join(keys) + " (" + detail + ")"),
      keys_(std::move(keys)) {}

CalibrationError::CalibrationError(std::vector<std::string> targets)
    : Error("calibration targets not satisfied: " + join(targets)), targets_(std::move(targets)) {}

}  // namespace vlcsim
