#pragma once

#include <stdexcept>
#include <string>

namespace dyadic {

/// Base class for all library errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Index refers to an interval outside the tree, or a relative that does not exist.
struct OutOfTree : Error {
  using Error::Error;
};

/// Operation needs children but the interval is a leaf.
struct LeafInterval : OutOfTree {
  using OutOfTree::OutOfTree;
};

/// Operation needs a parent but the interval is the root.
struct RootInterval : OutOfTree {
  using OutOfTree::OutOfTree;
};

/// Constructed object would violate a structural invariant (non-positive leaf, bad depth, NaN).
struct InvariantViolation : Error {
  using Error::Error;
};

/// Exponent outside the admissible range for the requested quantity.
struct BadExponent : Error {
  using Error::Error;
};

/// Resolvent coefficients too close to the invertibility boundary.
struct NearSingular : Error {
  using Error::Error;
};

/// Eigenvalue iteration failed to converge within its budget.
struct EigenFailure : Error {
  using Error::Error;
};

/// Operator handed to a norm routine failed the linearity probe.
struct NonlinearOperator : Error {
  using Error::Error;
};

/// Coefficient family breaks its declared slack bound.
struct SlackViolation : Error {
  using Error::Error;
};

}  // namespace dyadic
