#pragma once

#include <optional>
#include <stdexcept>
#include <string>

namespace humor {

// Base of every error the library throws on bad input or failed work.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed or content-free input data. Carries the 1-based line number when
// the problem can be pinned to one.
class DataError : public Error {
 public:
  explicit DataError(const std::string& message,
                     std::optional<std::size_t> line = std::nullopt)
      : Error(line ? "line " + std::to_string(*line) + ": " + message : message),
        line_(line) {}

  std::optional<std::size_t> line() const { return line_; }

 private:
  std::optional<std::size_t> line_;
};

// Caller supplied arguments that violate an operation's precondition.
class UsageError : public Error {
 public:
  using Error::Error;
};

// Numerical failure during training (non-finite loss and the like).
class TrainingError : public Error {
 public:
  TrainingError(const std::string& message, std::size_t epoch)
      : Error("epoch " + std::to_string(epoch) + ": " + message), epoch_(epoch) {}

  std::size_t epoch() const { return epoch_; }

 private:
  std::size_t epoch_;
};

}  // namespace humor
