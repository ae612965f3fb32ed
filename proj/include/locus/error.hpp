#pragma once

#include <stdexcept>
#include <string>

namespace locus {

enum class ErrorCode {
  kInvalidArgument = 1,
  kDimensionMismatch = 2,
  kNonFinite = 3,
  kIo = 4,
  kParse = 5,
  kInternal = 7,
};

// Every failure raised by the library carries an ErrorCode so the C API can
// translate it without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

class InvalidArgument : public Error {
 public:
  explicit InvalidArgument(const std::string& what) : Error(ErrorCode::kInvalidArgument, what) {}
};

class DimensionMismatch : public Error {
 public:
  explicit DimensionMismatch(const std::string& what) : Error(ErrorCode::kDimensionMismatch, what) {}
};

class NonFiniteInput : public Error {
 public:
  explicit NonFiniteInput(const std::string& what) : Error(ErrorCode::kNonFinite, what) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(ErrorCode::kIo, what) {}
};

class ParseError : public Error {
 public:
  explicit ParseError(const std::string& what) : Error(ErrorCode::kParse, what) {}
};

class InternalError : public Error {
 public:
  explicit InternalError(const std::string& what) : Error(ErrorCode::kInternal, what) {}
};

}  // namespace locus
