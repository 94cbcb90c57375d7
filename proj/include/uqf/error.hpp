#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace uqf {

enum class ErrorKind {
    NotSquarefree,
    NotGreaterThanOne,
    MixedFields,
    DivisionByZero,
    ParseError,
    ZeroIdeal,
    NotIntegral,
    RationalInput,
    IndexTooSmall,
    RangeError,
    NotInIdealPlus,
    NotPrincipal,
    DegreeUnsupported,
    InconsistentSample,
    DomainError,
    DegreeTooSmall,
    NoCoefficientOfRequiredSign,
    DegreeTooLarge,
    MissingCoefficient,
    NotInCodifferent,
    NotPositiveDefinite,
    PreconditionViolation,
    PrecisionExhausted,
};

constexpr std::string_view to_string(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::NotSquarefree: return "NotSquarefree";
    case ErrorKind::NotGreaterThanOne: return "NotGreaterThanOne";
    case ErrorKind::MixedFields: return "MixedFields";
    case ErrorKind::DivisionByZero: return "DivisionByZero";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::ZeroIdeal: return "ZeroIdeal";
    case ErrorKind::NotIntegral: return "NotIntegral";
    case ErrorKind::RationalInput: return "RationalInput";
    case ErrorKind::IndexTooSmall: return "IndexTooSmall";
    case ErrorKind::RangeError: return "RangeError";
    case ErrorKind::NotInIdealPlus: return "NotInIdealPlus";
    case ErrorKind::NotPrincipal: return "NotPrincipal";
    case ErrorKind::DegreeUnsupported: return "DegreeUnsupported";
    case ErrorKind::InconsistentSample: return "InconsistentSample";
    case ErrorKind::DomainError: return "DomainError";
    case ErrorKind::DegreeTooSmall: return "DegreeTooSmall";
    case ErrorKind::NoCoefficientOfRequiredSign: return "NoCoefficientOfRequiredSign";
    case ErrorKind::DegreeTooLarge: return "DegreeTooLarge";
    case ErrorKind::MissingCoefficient: return "MissingCoefficient";
    case ErrorKind::NotInCodifferent: return "NotInCodifferent";
    case ErrorKind::NotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorKind::PreconditionViolation: return "PreconditionViolation";
    case ErrorKind::PrecisionExhausted: return "PrecisionExhausted";
    }
    return "Unknown";
}

/// Domain error raised by every module; `kind()` is the machine-readable tag.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
    throw Error(kind, std::string(to_string(kind)) + ": " + what);
}

}  // namespace uqf
