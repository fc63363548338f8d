#pragma once

#include <stdexcept>
#include <string>

namespace sta {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid configuration or violated precondition on user-supplied settings.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Input data that cannot be used (unreadable, mostly malformed, empty).
class DataError : public Error {
 public:
  using Error::Error;
};

/// A path the caller named does not exist or cannot be opened.
class MissingInputError : public Error {
 public:
  explicit MissingInputError(const std::string& path)
      : Error("cannot open input: " + path), path_(path) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

/// Training produced NaN/inf.
class DivergenceError : public Error {
 public:
  using Error::Error;
};

}  // namespace sta
