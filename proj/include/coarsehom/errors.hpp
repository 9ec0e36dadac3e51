#pragma once

#include <stdexcept>
#include <string>

namespace coarsehom {

/// Invalid input: malformed specs, out-of-range parameters, unknown ids.
/// `field` names the offending input when one can be identified.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& message, std::string field = {},
                       int line = 0)
      : std::runtime_error(message), field_(std::move(field)), line_(line) {}

  const std::string& field() const noexcept { return field_; }
  int line() const noexcept { return line_; }

 private:
  std::string field_;
  int line_;
};

/// A numerical routine failed to converge or a tolerance check failed.
/// When the failing routine had a bracket on the answer it is carried along.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& message, double lower = 0.0,
                          double upper = 0.0)
      : std::runtime_error(message), lower_(lower), upper_(upper) {}

  double lower() const noexcept { return lower_; }
  double upper() const noexcept { return upper_; }

 private:
  double lower_;
  double upper_;
};

}  // namespace coarsehom
