#pragma once

#include <stdexcept>
#include <string>

namespace mblcoh {

// Every library failure derives from Error so callers can catch one type.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

class InvalidDimension : public Error {
  public:
    using Error::Error;
};

class NotFound : public Error {
  public:
    using Error::Error;
};

class InvalidTime : public Error {
  public:
    using Error::Error;
};

class InvalidWindow : public Error {
  public:
    using Error::Error;
};

class InvalidState : public Error {
  public:
    using Error::Error;
};

class UnsupportedConfiguration : public Error {
  public:
    using Error::Error;
};

class InsufficientData : public Error {
  public:
    using Error::Error;
};

// Raised by the Krylov engine; the message names the residual reached.
class ConvergenceError : public Error {
  public:
    ConvergenceError(const std::string& what, double residual) : Error(what), residual_(residual) {}
    [[nodiscard]] double residual() const noexcept { return residual_; }

  private:
    double residual_;
};

// Invalid experiment or run configuration (missing sector, bad key, mismatched grids...).
class ConfigError : public Error {
  public:
    using Error::Error;
};

} // namespace mblcoh
