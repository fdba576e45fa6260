#pragma once

#include <stdexcept>
#include <string>

namespace curvlab {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad arguments: dimension mismatch, malformed files, out-of-range parameters.
class InputError : public Error {
 public:
  using Error::Error;
};

/// Two independent evaluation routes disagreed. Always an implementation bug.
class ConsistencyError : public Error {
 public:
  using Error::Error;
};

/// A request needs frequencies beyond the ambient cutoff of a truncated model.
class TruncationError : public Error {
 public:
  using Error::Error;
};

/// Green's kernel evaluated on the diagonal outside the convergent range 2s > dim.
class DivergenceError : public Error {
 public:
  using Error::Error;
};

class IllConditionedError : public Error {
 public:
  using Error::Error;
};

namespace detail {
inline void require(bool cond, const std::string& what) {
  if (!cond) throw InputError(what);
}
}  // namespace detail

}  // namespace curvlab
