#pragma once

#include <stdexcept>
#include <string>

namespace capfl {

/// Malformed input: bad parameters, unparsable files, violated preconditions.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Text input that failed to parse; carries the 1-based line number.
class ParseError : public InputError {
 public:
  ParseError(int line, const std::string& what)
      : InputError("line " + std::to_string(line) + ": " + what), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

/// A configured resource cap was exceeded. Raised instead of returning a
/// truncated or approximate answer.
class SizeLimitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace capfl
