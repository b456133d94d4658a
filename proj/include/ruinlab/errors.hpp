#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace ruinlab {

/// Base class for every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A parameter or argument lies outside the domain an operation accepts.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A numerical routine (quadrature, root finding) failed to reach its tolerance.
class NumericalError : public Error {
 public:
  NumericalError(const std::string& what, double achieved_error)
      : Error(what), achieved_error_(achieved_error) {}
  double achieved_error() const noexcept { return achieved_error_; }

 private:
  double achieved_error_;
};

/// A model is internally inconsistent (declared bound violated, zero mass).
class ModelError : public Error {
 public:
  using Error::Error;
};

struct ConfigDiagnostic {
  int line = 0;    // 1-based, 0 when not tied to a location
  int column = 0;  // 1-based
  std::string message;

  std::string to_string() const;
};

/// Configuration text failed to parse or validate. Carries every diagnostic,
/// not only the first.
class ConfigError : public Error {
 public:
  explicit ConfigError(std::vector<ConfigDiagnostic> diagnostics);
  const std::vector<ConfigDiagnostic>& diagnostics() const noexcept { return diagnostics_; }

 private:
  std::vector<ConfigDiagnostic> diagnostics_;
};

}  // namespace ruinlab
