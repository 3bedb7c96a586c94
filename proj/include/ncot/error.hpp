#pragma once

#include <stdexcept>
#include <string>

namespace ncot {

/// Malformed or out-of-contract input (wrong shapes, non-Hermitian data,
/// unfaithful states where faithfulness is required, ...).
class InputError : public std::invalid_argument {
 public:
  explicit InputError(const std::string& what) : std::invalid_argument(what) {}
};

/// An iterative routine stopped without meeting its tolerance, or a
/// computed quantity contradicts an identity it must satisfy.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace ncot
