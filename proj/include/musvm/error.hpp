#pragma once

#include <stdexcept>
#include <string>

namespace musvm {

enum class ErrorKind {
  invalid_input,    // bad arguments or dimension mismatch
  data,             // unreadable or malformed data/model files
  non_convergence,  // an iterative solve hit its iteration cap
  numerical,        // singular or ill-conditioned linear algebra
  version,          // model file format version mismatch
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace musvm
