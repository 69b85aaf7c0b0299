#pragma once

#include <stdexcept>
#include <string>

namespace scenfuzz {

enum class ErrorCode {
  kInvalidArgument,
  kConfig,
  kBackendUnreachable,
  kGeneration,
  kReplayDivergence,
  kIo,
};

// Single exception type for the library; `code()` drives CLI exit statuses.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

inline Error InvalidArgument(const std::string& what) {
  return Error(ErrorCode::kInvalidArgument, what);
}

}  // namespace scenfuzz
