#pragma once

#include <stdexcept>
#include <string>

namespace cdnet {

/// Tensor extents or layer geometry do not fit together.
class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A loss or gradient contained NaN/Inf; the step that produced it was not applied.
class NonFiniteError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or incompatible file contents (checkpoints, manifests, images).
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace cdnet
