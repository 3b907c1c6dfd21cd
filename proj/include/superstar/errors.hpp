#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace superstar {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define SUPERSTAR_DEFINE_ERROR(Name)      \
  class Name : public Error {             \
   public:                                \
    using Error::Error;                   \
  };

SUPERSTAR_DEFINE_ERROR(ParityMismatch)
SUPERSTAR_DEFINE_ERROR(NonInvertibleSubstitution)
SUPERSTAR_DEFINE_ERROR(MixedParityInput)
SUPERSTAR_DEFINE_ERROR(NonCentralBivector)
SUPERSTAR_DEFINE_ERROR(TruncationExceeded)
SUPERSTAR_DEFINE_ERROR(VariableMismatch)
SUPERSTAR_DEFINE_ERROR(UnresolvedPair)
SUPERSTAR_DEFINE_ERROR(NonComposableCycle)
SUPERSTAR_DEFINE_ERROR(UnknownModel)
SUPERSTAR_DEFINE_ERROR(MissingFibration)
SUPERSTAR_DEFINE_ERROR(IllegalDivision)
SUPERSTAR_DEFINE_ERROR(InvalidVariable)

#undef SUPERSTAR_DEFINE_ERROR

/// Expression syntax error; `position` is the 0-based column in the input.
class SyntaxError : public Error {
 public:
  SyntaxError(const std::string& what, std::size_t position)
      : Error(what + " at column " + std::to_string(position + 1)), position_(position) {}
  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

/// Undeclared name; `position` is the 0-based column when parsed from text.
class UnknownIdentifier : public Error {
 public:
  explicit UnknownIdentifier(const std::string& what, std::optional<std::size_t> position = {})
      : Error(position ? what + " at column " + std::to_string(*position + 1) : what), position_(position) {}
  std::optional<std::size_t> position() const noexcept { return position_; }

 private:
  std::optional<std::size_t> position_;
};

/// Model-file error carrying a file/line/column location.
class ModelFileError : public Error {
 public:
  ModelFileError(const std::string& file, std::size_t line, std::size_t column,
                 const std::string& what)
      : Error(file + ":" + std::to_string(line) + ":" + std::to_string(column) + ": " + what),
        line_(line),
        column_(column) {}
  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

}  // namespace superstar
