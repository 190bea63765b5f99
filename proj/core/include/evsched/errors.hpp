#pragma once

#include <stdexcept>
#include <string>

namespace evsched {

// Invalid argument or configuration. The CLI maps this to exit code 2.
class ParameterError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input file. The CLI maps this to exit code 4.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Filesystem failure (missing file, unwritable directory). Exit code 4.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A scheduling problem whose constraints cannot all be met. Carries the
// maximum energy deliverable under the mask and switching rules as a
// certificate. The CLI maps this to exit code 3.
class InfeasibleError : public std::runtime_error {
 public:
  InfeasibleError(const std::string& msg, double max_deliverable_kwh)
      : std::runtime_error(msg), max_deliverable_kwh_(max_deliverable_kwh) {}

  double max_deliverable_kwh() const { return max_deliverable_kwh_; }

 private:
  double max_deliverable_kwh_;
};

}  // namespace evsched
