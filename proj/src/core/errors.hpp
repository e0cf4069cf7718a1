#pragma once

#include <stdexcept>
#include <string>

namespace sift {

enum class ErrorKind {
    MalformedRecord,
    UnknownEnumValue,
    NegativeValue,
    MalformedRow,
    EmptyRegistry,
    EmptyCorpus,
    EmptyHistory,
    SchemaMismatch,
    InvalidConfig,
    NoMaliciousRows,
    AllColumnsDropped,
    TooFewRows,
    MinorityTooSmall,
    SingleClassTrainingSet,
    NonFiniteLoss,
    DimensionMismatch,
    Unsupported,
    ClassTooSmall,
    EmptyConfusion,
    Io,
};

// Input problems exit with code 2, validation/invariant failures with 3.
enum class ErrorCategory { Input, Validation };

const char* kind_name(ErrorKind kind);
ErrorCategory category_of(ErrorKind kind);

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(std::string(kind_name(kind)) + ": " + message), kind_(kind) {}

    ErrorKind kind() const { return kind_; }
    ErrorCategory category() const { return category_of(kind_); }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void raise(ErrorKind kind, const std::string& message) {
    throw Error(kind, message);
}

} // namespace sift
