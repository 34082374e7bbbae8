#pragma once

#include <stdexcept>
#include <string>

namespace collgram {

// Raised for bad user input: malformed files, inconsistent arguments,
// mismatched configurations. The CLI maps it to exit status 2.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace collgram
