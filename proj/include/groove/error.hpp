#pragma once

#include <stdexcept>
#include <string>

namespace groove {

// Bad or missing input: files, schemas, arguments. Maps to exit code 1.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A computation could not produce a meaningful result (singular system,
// degenerate variance). Maps to exit code 2.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace groove
