#pragma once

#include <stdexcept>
#include <string>

namespace obda {

/// Semantic failure: unmapped predicate, unsatisfiable input, bad configuration.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Syntax error in one of the text formats, with a 1-based source location.
class ParseError : public Error {
 public:
  ParseError(const std::string& source, int line, int column, const std::string& message);

  int line() const noexcept { return line_; }
  int column() const noexcept { return column_; }

 private:
  int line_;
  int column_;
};

}  // namespace obda
