#pragma once

#include <stdexcept>
#include <string>

namespace decsched {

// Malformed or semantically invalid input (CLI exit code 1).
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Enumeration size exceeds the configured guard (CLI exit code 2).
class GuardError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A computed result violated one of the library's own invariants (CLI exit code 3).
class InvariantError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace decsched
