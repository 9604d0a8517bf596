#pragma once

#include <stdexcept>
#include <string>

namespace casorati {

enum class ErrorKind {
  InvalidArgument,   // malformed or out-of-contract input
  IllConditioned,    // point is numerically inadmissible (singular frame, boundary)
  NumericalFailure,  // an iterative routine did not meet its tolerance
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

inline void require(bool condition, const std::string& what) {
  if (!condition) fail(ErrorKind::InvalidArgument, what);
}

}  // namespace casorati
