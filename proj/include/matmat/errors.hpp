#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace matmat {

// Base of every error the library throws. The CLI maps subclasses to exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Unreadable input file.
class IngestError : public Error {
 public:
  using Error::Error;
};

// Malformed CSV line; carries the 1-based line number.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

// Well-formed input that violates a data invariant (e.g. non-positive rating).
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Invalid user-supplied parameter.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Index outside [0, n).
class RangeError : public Error {
 public:
  using Error::Error;
};

// Inconsistent shapes between internal objects.
class ShapeError : public Error {
 public:
  using Error::Error;
};

class MetricError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// SGD produced a non-finite value.
class TrainingError : public Error {
 public:
  TrainingError(std::optional<std::size_t> epoch, std::size_t user, std::size_t item,
                const std::string& detail)
      : Error(describe(epoch, user, item, detail)),
        epoch_(epoch), user_(user), item_(item), detail_(detail) {}

  std::optional<std::size_t> epoch() const noexcept { return epoch_; }
  std::size_t user() const noexcept { return user_; }
  std::size_t item() const noexcept { return item_; }

  TrainingError with_epoch(std::size_t epoch) const {
    return TrainingError(epoch, user_, item_, detail_);
  }

 private:
  static std::string describe(std::optional<std::size_t> epoch, std::size_t user,
                              std::size_t item, const std::string& detail) {
    std::string s = "training diverged";
    if (epoch) s += " in epoch " + std::to_string(*epoch);
    s += " at pair (user " + std::to_string(user) + ", item " + std::to_string(item) + ")";
    if (!detail.empty()) s += ": " + detail;
    return s;
  }

  std::optional<std::size_t> epoch_;
  std::size_t user_;
  std::size_t item_;
  std::string detail_;
};

}  // namespace matmat
