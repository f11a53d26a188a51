#pragma once

#include <stdexcept>
#include <string>

namespace rudn {

// Bad input data: unreadable files, malformed manifests, shape mismatches
// between data and a loaded model. CLI exit code 2.
struct data_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Non-finite values where finite ones are required (loss, gradients).
// CLI exit code 3.
struct numeric_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace rudn
