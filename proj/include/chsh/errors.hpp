#pragma once

#include <stdexcept>
#include <string>

namespace chsh {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed argument: bad dimension, non-finite angle, outcome outside {-1,+1}.
class InputError : public Error {
 public:
  using Error::Error;
};

/// A computed quantity broke an internal consistency tolerance.
class NumericError : public Error {
 public:
  using Error::Error;
};

/// Conditioning on an event of probability zero.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A tally has no runs for the requested setting.
class EmptyCellError : public Error {
 public:
  EmptyCellError(const std::string& what, int setting_index)
      : Error(what), setting_index_(setting_index) {}

  int setting_index() const noexcept { return setting_index_; }

 private:
  int setting_index_;
};

}  // namespace chsh
