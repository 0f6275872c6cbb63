#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace dipoleforge {

enum class ErrorKind {
  RejectedInput,
  DegenerateDecomposition,
  Configuration,
  InsufficientNeighbors,
  DegenerateFeature,
  EmptyEpochs,
  Io,
};

std::string_view to_string(ErrorKind kind);

/// Base of every error thrown by the library. The CLI serializes kind() and
/// what() into its JSON error record.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class DegenerateDecompositionError : public Error {
 public:
  DegenerateDecompositionError(const std::string& message, double condition_number)
      : Error(ErrorKind::DegenerateDecomposition, message), condition_(condition_number) {}

  double condition_number() const noexcept { return condition_; }

 private:
  double condition_;
};

class InsufficientNeighborsError : public Error {
 public:
  InsufficientNeighborsError(const std::string& message, std::size_t available,
                             std::size_t requested)
      : Error(ErrorKind::InsufficientNeighbors, message),
        available_(available),
        requested_(requested) {}

  std::size_t available() const noexcept { return available_; }
  std::size_t requested() const noexcept { return requested_; }

 private:
  std::size_t available_;
  std::size_t requested_;
};

class DegenerateFeatureError : public Error {
 public:
  DegenerateFeatureError(const std::string& message, std::size_t trial, std::size_t channel)
      : Error(ErrorKind::DegenerateFeature, message), trial_(trial), channel_(channel) {}

  std::size_t trial() const noexcept { return trial_; }
  std::size_t channel() const noexcept { return channel_; }

 private:
  std::size_t trial_;
  std::size_t channel_;
};

[[noreturn]] void reject(const std::string& message);
[[noreturn]] void misconfigured(const std::string& message);

}  // namespace dipoleforge
