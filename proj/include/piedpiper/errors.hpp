#pragma once

#include <stdexcept>
#include <string>

namespace pp {

/// Base of every error thrown by the library. The C API maps subclasses to
/// status codes at the boundary.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

#define PP_DEFINE_ERROR(NAME)                                   \
  class NAME : public Error {                                   \
   public:                                                      \
    explicit NAME(const std::string& msg) : Error(msg) {}       \
  }

PP_DEFINE_ERROR(InvalidArgument);
PP_DEFINE_ERROR(InvalidRatios);
PP_DEFINE_ERROR(OverlapError);
PP_DEFINE_ERROR(WindowError);
PP_DEFINE_ERROR(NyquistError);
PP_DEFINE_ERROR(RateMismatch);
PP_DEFINE_ERROR(EmptyBandSet);
PP_DEFINE_ERROR(EpochBoundsError);
PP_DEFINE_ERROR(EmptyClassError);
PP_DEFINE_ERROR(MontageError);
PP_DEFINE_ERROR(DegenerateInput);
PP_DEFINE_ERROR(CohortError);
PP_DEFINE_ERROR(UnknownNode);
PP_DEFINE_ERROR(QueueEmpty);
PP_DEFINE_ERROR(NoSensors);
PP_DEFINE_ERROR(CountError);
PP_DEFINE_ERROR(ConfigError);
PP_DEFINE_ERROR(IoError);
PP_DEFINE_ERROR(DigestMismatch);

#undef PP_DEFINE_ERROR

/// File parse failure carrying the 1-based line number.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& msg)
      : Error("line " + std::to_string(line) + ": " + msg), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

}  // namespace pp
