#pragma once

#include <stdexcept>
#include <string>

namespace netepi {

/// Invalid model or experiment parameters (CLI exit code 1).
class config_error : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A numerical procedure broke down (CLI exit code 2).
class numerical_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Adaptive integration could not continue; carries the last time reached.
class integration_error : public numerical_error {
 public:
  integration_error(const std::string& what, double last_time)
      : numerical_error(what + " (last valid t=" + std::to_string(last_time) + ")"),
        last_time_(last_time) {}

  double last_time() const noexcept { return last_time_; }

 private:
  double last_time_;
};

}  // namespace netepi
