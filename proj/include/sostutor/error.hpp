#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace sostutor {

enum class ErrorCode {
  validation,
  not_found,
  forbidden,
  invalid_transition,
  conflict,
  invalid_argument,
  unauthorized,
  integrity,
  io,
};

inline const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::validation: return "validation";
    case ErrorCode::not_found: return "not-found";
    case ErrorCode::forbidden: return "forbidden";
    case ErrorCode::invalid_transition: return "invalid-transition";
    case ErrorCode::conflict: return "conflict";
    case ErrorCode::invalid_argument: return "invalid-argument";
    case ErrorCode::unauthorized: return "unauthorized";
    case ErrorCode::integrity: return "integrity";
    case ErrorCode::io: return "io";
  }
  return "unknown";
}

// Every domain fault is reported through this type; callers switch on code().
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// Raised by the event log; carries the sequence number of the record at fault.
class IntegrityError : public Error {
 public:
  IntegrityError(std::uint64_t global_seq, const std::string& message)
      : Error(ErrorCode::integrity, message), global_seq_(global_seq) {}

  std::uint64_t global_seq() const noexcept { return global_seq_; }

 private:
  std::uint64_t global_seq_;
};

}  // namespace sostutor
