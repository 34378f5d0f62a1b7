#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace segscore {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad parameters or an unparsable law/config. Maps to CLI exit code 2.
class ConfigError : public Error {
 public:
  using Error::Error;
};

class NoRoot : public Error {
 public:
  using Error::Error;
};

class NegDriftViolated : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

class HitCapExceeded : public Error {
 public:
  HitCapExceeded(std::string what, std::int64_t path_index = -1)
      : Error(std::move(what)), path_index_(path_index) {}

  /// Index of the offending path inside a batch, or -1 for a single path.
  std::int64_t path_index() const noexcept { return path_index_; }

 private:
  std::int64_t path_index_;
};

class ExactUnavailable : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

class SupportOverflow : public Error {
 public:
  using Error::Error;
};

class NonConvergence : public Error {
 public:
  using Error::Error;
};

class EmptySample : public Error {
 public:
  using Error::Error;
};

class DegenerateCoordinate : public Error {
 public:
  using Error::Error;
};

}  // namespace segscore
