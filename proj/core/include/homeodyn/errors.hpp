#pragma once

#include <stdexcept>
#include <string>

namespace homeodyn {

/// Bad user input: unknown parameter, malformed config, invalid range.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Numerical failure during integration or analysis.
class NumericsError : public std::runtime_error {
 public:
  explicit NumericsError(const std::string& what) : std::runtime_error(what) {}
};

/// Non-finite state encountered while integrating; carries the blow-up time.
class BlowupError : public NumericsError {
 public:
  BlowupError(double t, const std::string& what)
      : NumericsError(what), time_(t) {}
  double time() const { return time_; }

 private:
  double time_;
};

}  // namespace homeodyn
