#pragma once

#include <stdexcept>
#include <string>

namespace docspot {

// Error categories map one-to-one onto CLI exit codes (usage 2, data 3,
// internal 4).
enum class ErrorKind {
  kInvalidArgument,
  kDataError,
  kDimensionMismatch,
  kTruncatedFile,
  kBadMagic,
  kEmptyIndex,
  kProfileMismatch,
  kIoError,
  kInternal,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, what);
}

}  // namespace docspot
