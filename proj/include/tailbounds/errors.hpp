#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace tailbounds {

enum class ErrorKind {
  Domain,
  BudgetExceeded,
  SideMismatch,
  Precondition,
  NonConvergence,
};

constexpr std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Domain: return "DomainError";
    case ErrorKind::BudgetExceeded: return "BudgetExceeded";
    case ErrorKind::SideMismatch: return "SideMismatch";
    case ErrorKind::Precondition: return "PreconditionError";
    case ErrorKind::NonConvergence: return "NonConvergence";
  }
  return "Error";
}

// Base of every error the library throws. kind() lets the CLI map errors to
// exit codes without a dynamic_cast ladder.
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

class BudgetExceeded : public Error {
 public:
  explicit BudgetExceeded(const std::string& what)
      : Error(ErrorKind::BudgetExceeded, what) {}
};

class SideMismatch : public Error {
 public:
  explicit SideMismatch(const std::string& what)
      : Error(ErrorKind::SideMismatch, what) {}
};

class PreconditionError : public Error {
 public:
  explicit PreconditionError(const std::string& what)
      : Error(ErrorKind::Precondition, what) {}
};

class NonConvergence : public Error {
 public:
  explicit NonConvergence(const std::string& what)
      : Error(ErrorKind::NonConvergence, what) {}
};

}  // namespace tailbounds
