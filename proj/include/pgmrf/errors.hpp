#pragma once

#include <stdexcept>
#include <string>

namespace pgmrf {

/// Input data violates a model invariant (non-binary Bernoulli counts,
/// shape mismatch, fully masked stack, ...).
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A computation left the representable range (empty truncated support,
/// non-finite statistics).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace pgmrf
