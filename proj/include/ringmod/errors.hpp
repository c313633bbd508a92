#pragma once

#include <stdexcept>
#include <string>

namespace ringmod {

/// Input violates an operation's precondition (invalid spec, point outside domain, ...).
class rejection : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A numerical procedure ran but its result cannot be trusted.
class diagnostic : public std::runtime_error {
 public:
  diagnostic(const std::string& what, double residual = 0.0)
      : std::runtime_error(what), residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

/// A file could not be read or written.
class io_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace ringmod
