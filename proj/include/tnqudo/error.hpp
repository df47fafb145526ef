#pragma once

#include <stdexcept>
#include <string>

namespace tnqudo {

// Base class for every error raised by the library. `code()` is a short
// stable identifier used by the CLI's machine-readable error line.
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& what)
      : std::runtime_error(what), code_(std::move(code)) {}
  const std::string& code() const noexcept { return code_; }

 private:
  std::string code_;
};

class InvalidArgument : public Error {
 public:
  explicit InvalidArgument(const std::string& what)
      : Error("invalid-argument", what) {}
};

class InvalidAssignment : public Error {
 public:
  explicit InvalidAssignment(const std::string& what)
      : Error("invalid-assignment", what) {}
};

class NotAChain : public Error {
 public:
  NotAChain(int i, int j, int k)
      : Error("not-a-chain",
              "coefficient (" + std::to_string(i) + ", " + std::to_string(j) +
                  ") spans " + std::to_string(j - i) + " > k = " +
                  std::to_string(k)),
        i_(i),
        j_(j) {}
  int i() const noexcept { return i_; }
  int j() const noexcept { return j_; }

 private:
  int i_, j_;
};

// Malformed instance documents, out-of-range indices, duplicate keys.
class InstanceError : public Error {
 public:
  explicit InstanceError(const std::string& what)
      : Error("invalid-instance", what) {}
};

class CapacityError : public Error {
 public:
  explicit CapacityError(const std::string& what) : Error("capacity", what) {}
};

// Underflow, overflow or NaN detected during a contraction.
class NumericFault : public Error {
 public:
  explicit NumericFault(const std::string& what)
      : Error("numeric-fault", what) {}
};

}  // namespace tnqudo
