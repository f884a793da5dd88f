#pragma once

#include <stdexcept>
#include <string>

namespace swa {

// Rejected argument or configuration. Maps to CLI exit code 2.
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// External agent could not be started or failed its handshake. Exit code 3.
class BridgeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Reading or writing a file failed. Exit code 4.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace swa
