#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace dbar {

using Complex = std::complex<double>;

// Error taxonomy shared by all modules. The CLI maps the kind to a
// machine-readable JSON record, so keep the set small and stable.
enum class ErrorKind {
  kInvalidArgument,  // bad sizes, indices or parameter values
  kFormat,           // malformed file header or row syntax
  kShape,            // dimension mismatch between declared and actual data
  kNonFinite,        // NaN or Inf where a finite value is required
  kSingular,         // numerically singular linear system
  kNonConvergence,   // iteration diverged or exhausted its budget
  kResolution,       // requested resolution is insufficient or infeasible
  kIo,               // file could not be read or written
};

const char* error_kind_name(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
  throw Error(kind, message);
}

inline void require(bool ok, ErrorKind kind, const std::string& message) {
  if (!ok) fail(kind, message);
}

}  // namespace dbar
