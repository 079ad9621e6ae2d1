#pragma once

#include <stdexcept>
#include <string>

namespace ultratext {

// Input violates an operation's preconditions (empty corpus, zero row, ...).
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A file could not be read or written.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace ultratext
