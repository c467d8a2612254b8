#pragma once

#include <chrono>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace iclef {

/// Base of every error the toolkit raises. `kind()` is a stable,
/// machine-readable tag used by the CLI when reporting failures.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual const char* kind() const noexcept { return "Error"; }
};

#define ICLEF_DEFINE_ERROR(Name)                                  \
  class Name : public Error {                                     \
   public:                                                        \
    using Error::Error;                                           \
    const char* kind() const noexcept override { return #Name; }  \
  }

ICLEF_DEFINE_ERROR(UsageError);
ICLEF_DEFINE_ERROR(IoError);
ICLEF_DEFINE_ERROR(SchemaViolation);
ICLEF_DEFINE_ERROR(CacheMiss);
ICLEF_DEFINE_ERROR(GatewayError);
ICLEF_DEFINE_ERROR(GenerationError);
ICLEF_DEFINE_ERROR(InsufficientFeedback);
ICLEF_DEFINE_ERROR(EmptyExplanation);
ICLEF_DEFINE_ERROR(SpecExceedsCorpus);
ICLEF_DEFINE_ERROR(MissingField);
ICLEF_DEFINE_ERROR(LengthMismatch);
ICLEF_DEFINE_ERROR(ScorerUnavailable);
ICLEF_DEFINE_ERROR(MalformedResponse);
ICLEF_DEFINE_ERROR(DegenerateLabels);
ICLEF_DEFINE_ERROR(SampleExceedsCorpus);
ICLEF_DEFINE_ERROR(TaskNotFound);
ICLEF_DEFINE_ERROR(TaskAlreadyDone);
ICLEF_DEFINE_ERROR(NoOverlap);

#undef ICLEF_DEFINE_ERROR

/// Raised by the explanation grammar. `position` is a byte offset into the
/// normalized input text.
class ParseError : public Error {
 public:
  ParseError(std::size_t position, std::string reason)
      : Error("parse error at " + std::to_string(position) + ": " + reason),
        position_(position),
        reason_(std::move(reason)) {}

  const char* kind() const noexcept override { return "ParseError"; }
  std::size_t position() const noexcept { return position_; }
  const std::string& reason() const noexcept { return reason_; }

 private:
  std::size_t position_;
  std::string reason_;
};

/// Retryable network failure (connection refused, 5xx, timeouts).
class TransportError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "TransportError"; }
};

/// Retryable 429. `retry_after` is the server-advised delay, zero if absent.
class RateLimited : public TransportError {
 public:
  RateLimited(const std::string& what, std::chrono::milliseconds retry_after)
      : TransportError(what), retry_after_(retry_after) {}
  const char* kind() const noexcept override { return "RateLimited"; }
  std::chrono::milliseconds retry_after() const noexcept { return retry_after_; }

 private:
  std::chrono::milliseconds retry_after_;
};

/// A generated record whose teacher output could not be parsed. The raw
/// completion travels with the error so it can be written to quarantine.
class QuarantinedRecord : public Error {
 public:
  QuarantinedRecord(const std::string& what, std::string raw_text)
      : Error(what), raw_text_(std::move(raw_text)) {}
  const char* kind() const noexcept override { return "QuarantinedRecord"; }
  const std::string& raw_text() const noexcept { return raw_text_; }

 private:
  std::string raw_text_;
};

}  // namespace iclef
