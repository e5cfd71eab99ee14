#pragma once

#include <stdexcept>
#include <string>

namespace rtllock {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A design violates an IR invariant (undeclared signal, broken key numbering, ...).
class DesignError : public Error {
 public:
  using Error::Error;
};

// A locking request cannot be carried out on the given design.
class LockError : public Error {
 public:
  using Error::Error;
};

// Malformed user input that is not Verilog text: spec strings, key files, configs.
class InputError : public Error {
 public:
  using Error::Error;
};

}  // namespace rtllock
