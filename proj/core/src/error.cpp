#include "sentishape/error.hpp"

namespace sshape {

FormatError::FormatError(const std::string& what, std::size_t line)
    : Error(line == 0 ? what : "line " + std::to_string(line) + ": " + what),
      line_(line) {}

}  // namespace sshape
