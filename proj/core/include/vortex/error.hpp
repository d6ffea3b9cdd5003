#pragma once

#include <stdexcept>
#include <string>

namespace vortex {

// Bad user input: malformed spectra, invalid moments, out-of-range parameters.
class InvalidInput : public std::invalid_argument {
 public:
  explicit InvalidInput(const std::string& what) : std::invalid_argument(what) {}
};

// A numerical procedure could not deliver its result (singular matrix,
// non-convergent quadrature, degenerate root system).
class NumericalFailure : public std::runtime_error {
 public:
  explicit NumericalFailure(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace vortex
