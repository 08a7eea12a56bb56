#pragma once

#include <stdexcept>
#include <string>

namespace volterra {

/// Failure categories. The CLI maps them onto process exit codes.
enum class ErrorKind {
  config,     ///< invalid input or configuration (exit 2)
  domain,     ///< argument outside the admissible domain (exit 2)
  numerical,  ///< quadrature / factorization / estimation failure (exit 3)
  gate,       ///< a precondition gate refused the computation (exit 4)
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error(ErrorKind::config, what) {}
};

class DomainError : public Error {
 public:
  explicit DomainError(const std::string& what) : Error(ErrorKind::domain, what) {}
};

class NumericalError : public Error {
 public:
  explicit NumericalError(const std::string& what) : Error(ErrorKind::numerical, what) {}
};

/// Adaptive quadrature ran out of subdivisions before meeting its tolerance.
class QuadratureError : public NumericalError {
 public:
  QuadratureError(const std::string& what, double estimate, double error)
      : NumericalError(what), estimate_(estimate), error_(error) {}
  double estimate() const noexcept { return estimate_; }
  double error_estimate() const noexcept { return error_; }

 private:
  double estimate_;
  double error_;
};

class GateError : public Error {
 public:
  GateError(const std::string& what, double measured)
      : Error(ErrorKind::gate, what), measured_(measured) {}
  double measured() const noexcept { return measured_; }

 private:
  double measured_;
};

const char* to_string(ErrorKind kind) noexcept;
int exit_code(ErrorKind kind) noexcept;

}  // namespace volterra
