#pragma once

#include <stdexcept>
#include <string>

namespace coopdyn {

/// A solver could not proceed: CFL violation, exponent overflow, divergence.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace coopdyn
