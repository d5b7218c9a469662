#include "obda/common/error.hpp"

namespace obda {

ParseError::ParseError(const std::string& source, int line, int column, const std::string& message)
    : Error(source + ":" + std::to_string(line) + ":" + std::to_string(column) + ": " + message),
      line_(line),
      column_(column) {}

}  // namespace obda
