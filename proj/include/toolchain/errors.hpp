#pragma once

#include <stdexcept>
#include <string>

namespace toolchain {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Raised by canonicalize_action on malformed action text.
class ParseError : public Error {
public:
    using Error::Error;
};

/// Raised when a node id does not exist in the tree arena.
class UnknownNode : public Error {
public:
    using Error::Error;
};

/// Raised when a score or config value is outside its legal range.
class DomainError : public Error {
public:
    using Error::Error;
};

/// Raised by cumulative_cost when a path node has no scores assigned yet.
class UnscoredNode : public Error {
public:
    using Error::Error;
};

/// Raised when a scoring function is called with an empty plan prefix.
class DegenerateInput : public Error {
public:
    using Error::Error;
};

/// Raised when the live backend cannot be reached after all retries.
class BackendUnavailable : public Error {
public:
    using Error::Error;
};

/// Raised when every sample in a proposal batch failed to parse.
class EmptyBatch : public Error {
public:
    using Error::Error;
};

/// Raised for non-retryable HTTP responses from the live backend.
class HttpStatusError : public Error {
public:
    HttpStatusError(int status, const std::string& body_excerpt)
        : Error("http status " + std::to_string(status) + ": " + body_excerpt),
          status_(status) {}

    int status() const { return status_; }

private:
    int status_;
};

/// Raised when a run's backend call budget is exhausted.
class BudgetExceeded : public Error {
public:
    using Error::Error;
};

/// Raised on malformed suite, script, or memory files.
class FormatError : public Error {
public:
    using Error::Error;
};

}  // namespace toolchain
