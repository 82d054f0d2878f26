#pragma once

#include <stdexcept>
#include <string>

namespace warpcert {

/// Base class for all library errors. Subclasses distinguish input problems
/// (bad algebra data, malformed files) from failed verdicts and numerical
/// breakdowns so the CLI can map them to exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// --- input errors ---------------------------------------------------------

/// Structure constants fail the Jacobi identity beyond tolerance.
class JacobiViolation : public Error {
 public:
  using Error::Error;
};

/// Base inner product is not symmetric positive definite.
class BadInnerProduct : public Error {
 public:
  using Error::Error;
};

/// Bracket entry indices out of range, or self-bracket with nonzero value.
class IndexError : public Error {
 public:
  using Error::Error;
};

/// Conflicting coefficients given for the same bracket slot.
class BracketConflict : public Error {
 public:
  using Error::Error;
};

/// Lower central series stabilises at a nonzero subalgebra.
class NotNilpotent : public Error {
 public:
  using Error::Error;
};

/// Unknown builtin algebra name or out-of-range parameter.
class UnknownBuiltin : public Error {
 public:
  using Error::Error;
};

/// Malformed input file or invalid command configuration.
class ParseError : public Error {
 public:
  using Error::Error;
};

// --- failed verdicts and numerical breakdowns -----------------------------

/// Graded bracket lands shallower than the guaranteed level.
class ContainmentViolation : public Error {
 public:
  using Error::Error;
};

/// No nonzero depth-k nested bracket found (internal inconsistency).
class WitnessNotFound : public Error {
 public:
  using Error::Error;
};

/// Warping profile violates a required sign, slope or bound condition.
class ProfileViolation : public Error {
 public:
  using Error::Error;
};

/// Self-adjoint eigensolver did not converge.
class EigenFailure : public Error {
 public:
  using Error::Error;
};

/// Tail deviation from the limit tensor is not monotone; the grid is too
/// short to extend the verdict beyond its endpoints. Advisory.
class TailNotMonotone : public Error {
 public:
  using Error::Error;
};

/// Scale search exhausted without a passing certificate.
class ScaleExhausted : public Error {
 public:
  using Error::Error;
};

/// Decay fit attempted on data that is zero to machine precision.
class DegenerateFit : public Error {
 public:
  using Error::Error;
};

}  // namespace warpcert
