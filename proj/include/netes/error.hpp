#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace netes {

// Base of everything the library throws on a contract violation.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad sizes or out-of-range parameters (n < 2, p outside (0,1], odd k, ...).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// Matrix or vector dimensions that do not agree.
class ShapeError : public Error {
 public:
  using Error::Error;
};

// Non-finite inputs or rewards.
class NumericError : public Error {
 public:
  using Error::Error;
};

class ExhaustionError : public Error {
 public:
  ExhaustionError(const std::string& what, std::size_t attempts)
      : Error(what), attempts_(attempts) {}
  std::size_t attempts() const noexcept { return attempts_; }

 private:
  std::size_t attempts_;
};

// Metric requested on a graph where it is not defined (min degree 0).
class UndefinedMetric : public Error {
 public:
  using Error::Error;
};

// Closed-form approximation evaluated outside its valid regime.
class DomainError : public Error {
 public:
  using Error::Error;
};

// Reward normalization premise (min = -max) not met.
class PremiseError : public Error {
 public:
  using Error::Error;
};

// Computation would exceed a configured size cap.
class ResourceError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  ConfigError(const std::string& field, const std::string& what)
      : Error(field.empty() ? what : field + ": " + what), field_(field) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

class IoError : public Error {
 public:
  IoError(const std::string& path, const std::string& what)
      : Error(path + ": " + what), path_(path) {}
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

}  // namespace netes
