#pragma once

#include <stdexcept>
#include <string>

namespace gamow {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

#define GAMOW_DECLARE_ERROR(Name)                                              \
  class Name : public Error {                                                  \
  public:                                                                      \
    using Error::Error;                                                        \
  }

GAMOW_DECLARE_ERROR(InvalidParameters);
GAMOW_DECLARE_ERROR(PreconditionViolated);
GAMOW_DECLARE_ERROR(PoleProximity);
GAMOW_DECLARE_ERROR(SeedOutOfRegime);
GAMOW_DECLARE_ERROR(NoConvergence);
GAMOW_DECLARE_ERROR(WrongQuadrant);
GAMOW_DECLARE_ERROR(CountMismatch);
GAMOW_DECLARE_ERROR(GridTooCoarse);
GAMOW_DECLARE_ERROR(ResidueMismatch);
GAMOW_DECLARE_ERROR(NoCrossing);
GAMOW_DECLARE_ERROR(WindowTooSmall);
GAMOW_DECLARE_ERROR(WindowBeforeCrossover);

#undef GAMOW_DECLARE_ERROR

/// Raised when an integral misses its tolerance; carries the achieved estimate.
class QuadratureNotConverged : public Error {
public:
  QuadratureNotConverged(const std::string &what, double achieved)
      : Error(what + " (achieved error estimate " + std::to_string(achieved) +
              ")"),
        achieved_error(achieved) {}

  double achieved_error;
};

} // namespace gamow
