#pragma once

#include <stdexcept>
#include <string>

namespace cag {

// Base of every error the harness raises deliberately.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Bad input data: malformed records, constraint violations, bad config.
class ValidationError : public Error {
public:
    using Error::Error;
};

// Caller broke an operation's precondition.
class PreconditionError : public Error {
public:
    using Error::Error;
};

// A provider reply could not be parsed into the expected structure.
class ParseError : public Error {
public:
    ParseError(const std::string& what, int attempts)
        : Error(what), attempts_(attempts) {}
    int attempts() const noexcept { return attempts_; }

private:
    int attempts_;
};

// External provider failed. Transient failures are retried by RetryPolicy.
class ProviderError : public Error {
public:
    ProviderError(const std::string& what, bool transient, int attempts = 1)
        : Error(what), transient_(transient), attempts_(attempts) {}
    bool transient() const noexcept { return transient_; }
    int attempts() const noexcept { return attempts_; }

private:
    bool transient_;
    int attempts_;
};

}  // namespace cag
