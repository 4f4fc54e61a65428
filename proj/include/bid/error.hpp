#pragma once

#include <stdexcept>
#include <string>

namespace bid {

// Error categories map one-to-one onto CLI exit codes and C API status codes.
enum class ErrorKind { config = 2, input = 3, numerical = 4 };

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

class InputError : public Error {
public:
  explicit InputError(const std::string& what) : Error(ErrorKind::input, what) {}
};

class NumericalError : public Error {
public:
  explicit NumericalError(const std::string& what) : Error(ErrorKind::numerical, what) {}
};

inline const char* error_class_name(ErrorKind kind) {
  switch (kind) {
  case ErrorKind::config: return "config_error";
  case ErrorKind::input: return "input_error";
  case ErrorKind::numerical: return "numerical_error";
  }
  return "internal_error";
}

} // namespace bid
