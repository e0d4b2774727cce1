#pragma once

#include <stdexcept>
#include <string>

namespace probeff {

// Bad run configuration: unknown model, malformed flags or JSON inputs.
struct config_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Runtime model problems: invalid distribution parameters, missing or
// kind-mismatched observable variables, nothing to infer.
struct model_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Internal invariant violations: misassembled handler stacks, result-tag
// mismatches at node boundaries. Indicates a handler bug, never user error.
struct internal_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace probeff
