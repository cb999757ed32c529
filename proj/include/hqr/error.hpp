#ifndef HQR_ERROR_HPP
#define HQR_ERROR_HPP

#include <stdexcept>
#include <string>

namespace hqr {

/// Failure categories shared by every module. The C API maps each one to a
/// distinct status code.
enum class ErrorKind {
  Domain,
  Dimension,
  Config,
  IO,
  Format,
  NotConverged,
  Numerical,
  Precondition,
};

const char* to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class DomainError : public Error {
 public:
  explicit DomainError(const std::string& what) : Error(ErrorKind::Domain, what) {}
};

class DimensionError : public Error {
 public:
  explicit DimensionError(const std::string& what) : Error(ErrorKind::Dimension, what) {}
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error(ErrorKind::Config, what) {}
};

class IOError : public Error {
 public:
  explicit IOError(const std::string& what) : Error(ErrorKind::IO, what) {}
};

class FormatError : public Error {
 public:
  explicit FormatError(const std::string& what) : Error(ErrorKind::Format, what) {}
};

class NumericalError : public Error {
 public:
  explicit NumericalError(const std::string& what) : Error(ErrorKind::Numerical, what) {}
};

class PreconditionError : public Error {
 public:
  explicit PreconditionError(const std::string& what) : Error(ErrorKind::Precondition, what) {}
};

// NotConverged is declared in solver.hpp because it carries a solver result.

}  // namespace hqr

#endif  // HQR_ERROR_HPP
