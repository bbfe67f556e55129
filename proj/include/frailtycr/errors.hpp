#pragma once

#include <stdexcept>
#include <string>

namespace frailtycr {

// Invalid model/frailty/hazard parameters or malformed configuration.
class ParameterError : public std::invalid_argument {
 public:
  explicit ParameterError(const std::string& what) : std::invalid_argument(what) {}
};

// A numeric routine failed to reach its target tolerance. `achieved` carries
// the tolerance actually reached so callers can decide whether to accept.
class NumericError : public std::runtime_error {
 public:
  NumericError(const std::string& what, double achieved_tol)
      : std::runtime_error(what), achieved(achieved_tol) {}
  double achieved;
};

// Requested operation exceeds what this code path supports (e.g. deterministic
// quadrature in too many latent dimensions); the message names the fallback.
class CapabilityError : public std::runtime_error {
 public:
  explicit CapabilityError(const std::string& what) : std::runtime_error(what) {}
};

// Malformed input file; carries the 1-based line number when known.
class ParseError : public std::runtime_error {
 public:
  explicit ParseError(const std::string& what, long line = -1)
      : std::runtime_error(what), line(line) {}
  long line;
};

}  // namespace frailtycr
