#pragma once

#include <stdexcept>
#include <string>

namespace hetq {

// Base class for all engine failures that abort an operation.
// Recoverable findings (validation violations, dropped rows) are
// returned as values, not thrown.
class Error : public std::runtime_error {
public:
    explicit Error(std::string message) : std::runtime_error(std::move(message)) {}
};

// Unreadable corpus root, unwritable output, truncated graph file.
class IoError : public Error {
public:
    using Error::Error;
};

// Malformed CSV/JSON input or an unparseable plan text.
// `offset` is a byte offset into the input where known, else npos.
class ParseError : public Error {
public:
    ParseError(std::string message, std::size_t offset = std::string::npos)
        : Error(std::move(message)), offset_(offset) {}
    std::size_t offset() const { return offset_; }

private:
    std::size_t offset_;
};

// Model backend failures: misconfiguration, transport errors after
// retries, non-2xx responses.
class BackendError : public Error {
public:
    explicit BackendError(std::string message, int attempts = 0, int status = 0)
        : Error(std::move(message)), attempts_(attempts), status_(status) {}
    int attempts() const { return attempts_; }
    int status() const { return status_; }

private:
    int attempts_;
    int status_;
};

// Inconsistent inputs handed to build_graph or a graph file whose
// records violate graph invariants.
class GraphError : public Error {
public:
    using Error::Error;
};

// Plan synthesis produced no parseable plan even after the retry.
// Carries both raw model outputs for diagnosis.
class SynthesisError : public Error {
public:
    SynthesisError(std::string message, std::string first_output, std::string second_output)
        : Error(std::move(message)),
          first_output_(std::move(first_output)),
          second_output_(std::move(second_output)) {}
    const std::string& first_output() const { return first_output_; }
    const std::string& second_output() const { return second_output_; }

private:
    std::string first_output_;
    std::string second_output_;
};

} // namespace hetq
