#pragma once

#include <stdexcept>
#include <string>

namespace palinscan {

// Mirrors the status codes of the C API one-to-one.
enum class ErrorCode {
  InvalidArgument = 1,
  Parse = 2,
  Io = 3,
  Network = 4,
  NotFound = 5,
  Domain = 6,
  Singular = 7,
  NoConvergence = 8,
  Empty = 9,
  InfiniteScore = 10,
  Unattainable = 11,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

}  // namespace palinscan
