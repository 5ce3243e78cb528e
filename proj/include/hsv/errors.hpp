#pragma once

#include <stdexcept>
#include <string>

namespace hsv {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition on an argument was violated (bad weight, malformed rational, ...).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Something that would require dividing by an exact zero. Verification drivers
/// treat every subclass as a rejected parameter draw and resample.
class Singular : public Error {
 public:
  using Error::Error;
};

class DivisionByZero : public Singular {
 public:
  using Singular::Singular;
};

/// A denominator q-Pochhammer symbol vanishes inside the summed range.
class VanishingDenominator : public Singular {
 public:
  using Singular::Singular;
};

/// The spectral/quantum parameters hit the singular set of an R-matrix construction.
class SingularParameter : public Singular {
 public:
  using Singular::Singular;
};

/// A boundary-matrix construction is singular at this draw (singular linear
/// system, impossible normalization, ...).
class SingularDraw : public Singular {
 public:
  using Singular::Singular;
};

/// The recurrence solution failed to terminate at row J+1.
class NonTerminating : public Singular {
 public:
  using Singular::Singular;
};

}  // namespace hsv
