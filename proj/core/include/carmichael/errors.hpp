#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace carmichael {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition on an argument's value was violated.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Input exceeds a declared capacity (sieve size, memory bound, size limit).
class CapacityError : public Error {
 public:
  using Error::Error;
};

/// factorize ran out of its work budget.
class UnfactoredError : public CapacityError {
 public:
  UnfactoredError(const std::string& cofactor)
      : CapacityError("factorization budget exhausted; unfactored cofactor " + cofactor),
        cofactor_(cofactor) {}
  const std::string& cofactor() const noexcept { return cofactor_; }

 private:
  std::string cofactor_;
};

/// Inconsistent system of congruences.
class ConflictError : public Error {
 public:
  ConflictError(std::size_t first, std::size_t second, const std::string& what)
      : Error(what), first_(first), second_(second) {}
  std::size_t first() const noexcept { return first_; }
  std::size_t second() const noexcept { return second_; }

 private:
  std::size_t first_;
  std::size_t second_;
};

/// A requested target or exponent cannot exist.
class InfeasibleError : public Error {
 public:
  using Error::Error;
};

/// The construction pipeline produced nothing usable at these parameters.
class ConstructionError : public Error {
 public:
  using Error::Error;
};

/// A certificate re-check failed; `check()` names it.
class AssemblyError : public Error {
 public:
  AssemblyError(std::string check, const std::string& what)
      : Error(what), check_(std::move(check)) {}
  const std::string& check() const noexcept { return check_; }

 private:
  std::string check_;
};

}  // namespace carmichael
