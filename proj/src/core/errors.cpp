#include "errors.hpp"

namespace sift {

const char* kind_name(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::MalformedRecord: return "MalformedRecord";
        case ErrorKind::UnknownEnumValue: return "UnknownEnumValue";
        case ErrorKind::NegativeValue: return "NegativeValue";
        case ErrorKind::MalformedRow: return "MalformedRow";
        case ErrorKind::EmptyRegistry: return "EmptyRegistry";
        case ErrorKind::EmptyCorpus: return "EmptyCorpus";
        case ErrorKind::EmptyHistory: return "EmptyHistory";
        case ErrorKind::SchemaMismatch: return "SchemaMismatch";
        case ErrorKind::InvalidConfig: return "InvalidConfig";
        case ErrorKind::NoMaliciousRows: return "NoMaliciousRows";
        case ErrorKind::AllColumnsDropped: return "AllColumnsDropped";
        case ErrorKind::TooFewRows: return "TooFewRows";
        case ErrorKind::MinorityTooSmall: return "MinorityTooSmall";
        case ErrorKind::SingleClassTrainingSet: return "SingleClassTrainingSet";
        case ErrorKind::NonFiniteLoss: return "NonFiniteLoss";
        case ErrorKind::DimensionMismatch: return "DimensionMismatch";
        case ErrorKind::Unsupported: return "Unsupported";
        case ErrorKind::ClassTooSmall: return "ClassTooSmall";
        case ErrorKind::EmptyConfusion: return "EmptyConfusion";
        case ErrorKind::Io: return "Io";
    }
    return "Unknown";
}

ErrorCategory category_of(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::MalformedRecord:
        case ErrorKind::UnknownEnumValue:
        case ErrorKind::NegativeValue:
        case ErrorKind::MalformedRow:
        case ErrorKind::EmptyRegistry:
        case ErrorKind::EmptyCorpus:
        case ErrorKind::Io:
            return ErrorCategory::Input;
        default:
            return ErrorCategory::Validation;
    }
}

} // namespace sift
