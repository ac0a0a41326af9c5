#pragma once

#include <stdexcept>

namespace mhl {

/// A required hypothesis (regularity, weight class, sublinearity, ...) does not hold.
class PreconditionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace mhl
