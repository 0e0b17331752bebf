#pragma once

#include <stdexcept>
#include <string>

namespace skewop {

// Error taxonomy shared by the library and the CLI. The CLI maps these to
// process exit codes: validation 2, failed check 3, numerical failure 4.
struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct CheckFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace skewop
