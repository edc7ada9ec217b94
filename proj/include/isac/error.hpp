#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace isac {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidConfig : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

/// Requested sensing scope or target lies outside what the frame can resolve.
class ScopeError : public Error {
 public:
  using Error::Error;
};

class SymmetryViolation : public Error {
 public:
  using Error::Error;
};

/// Two fixed cells of a delay-Doppler grid that are conjugate mirrors disagree.
class ConsistencyError : public Error {
 public:
  using Error::Error;
};

class SizeGuardExceeded : public Error {
 public:
  using Error::Error;
};

/// A numerical domain violation, optionally tagged with the offending flat index.
class DomainError : public Error {
 public:
  static constexpr std::size_t kNoIndex = static_cast<std::size_t>(-1);

  explicit DomainError(const std::string& what, std::size_t index = kNoIndex)
      : Error(what), index_(index) {}

  std::size_t index() const noexcept { return index_; }

 private:
  std::size_t index_;
};

class EmptySupport : public Error {
 public:
  using Error::Error;
};

}  // namespace isac
