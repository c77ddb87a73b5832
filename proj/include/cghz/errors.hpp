#pragma once

#include <stdexcept>
#include <string>

namespace cghz {

// Invalid indices and sizes are reported with std::invalid_argument; the
// types below cover the remaining failure kinds.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Operands with mismatched qubit counts or probe flags.
class ShapeError : public Error {
 public:
  using Error::Error;
};

// Operation requires a probe beam the state does not carry (or vice versa).
class StateError : public Error {
 public:
  using Error::Error;
};

// Every amplitude vanished during canonicalization.
class DegenerateStateError : public Error {
 public:
  using Error::Error;
};

// A measurement outcome of (numerically) zero probability was requested.
class ImpossibleOutcomeError : public Error {
 public:
  using Error::Error;
};

// A protocol was invoked outside the regime where it is valid.
class PreconditionViolation : public Error {
 public:
  using Error::Error;
};

// Problem too large for an exact path.
class SizeError : public Error {
 public:
  using Error::Error;
};

}  // namespace cghz
