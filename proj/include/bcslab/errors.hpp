#pragma once

#include <stdexcept>
#include <string>

namespace bcslab {

// Error taxonomy shared by all modules. Preconditions throw, numerical
// non-convergence is reported through result flags where the operation
// defines one.

struct InvalidArgument : std::invalid_argument {
  explicit InvalidArgument(const std::string& what) : std::invalid_argument(what) {}
};

struct BracketError : std::runtime_error {
  explicit BracketError(const std::string& what) : std::runtime_error(what) {}
};

struct NumericalError : std::runtime_error {
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

struct InternalError : std::runtime_error {
  explicit InternalError(const std::string& what) : std::runtime_error(what) {}
};

struct InvalidState : std::runtime_error {
  explicit InvalidState(const std::string& what) : std::runtime_error(what) {}
};

// Reference state of a relative entropy has an eigenvalue at {0,1}.
struct SingularReference : std::runtime_error {
  explicit SingularReference(const std::string& what) : std::runtime_error(what) {}
};

// The pair projection denominator vanished (no reference gap profile).
struct DegenerateGap : std::runtime_error {
  explicit DegenerateGap(const std::string& what) : std::runtime_error(what) {}
};

struct ExtrapolationError : std::runtime_error {
  explicit ExtrapolationError(const std::string& what) : std::runtime_error(what) {}
};

// A member of an a-priori state family violated F <= 0.
struct FamilyViolation : std::runtime_error {
  explicit FamilyViolation(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace bcslab
