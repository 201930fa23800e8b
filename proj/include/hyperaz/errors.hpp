#pragma once

#include <stdexcept>
#include <string>

namespace hyperaz {

// Error taxonomy shared by all modules.  The CLI maps classes of errors to
// distinct exit codes, see tools/hyperaz_main.cpp.
enum class ErrorCode {
    InexactDivision,
    UnknownVariable,
    BadEvaluationPoint,
    EvaluationExhausted,
    DegenerateTerm,
    NoIntegrationVariables,
    IndexError,
    NonHyperexponential,
    ParseError,
    NotFound,
    UnboundedBoundaryTerm,
    RescaleRequired,
    SingularObstruction,
    UnderdeterminedInit,
    InconsistentInit,
    ExpansionUnsupported,
    DivergentIntegral,
    NumericFailure,
    Internal,
};

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& msg)
        : std::runtime_error(msg), code_(code) {}
    ErrorCode code() const { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void raise(ErrorCode code, const std::string& msg) {
    throw Error(code, msg);
}

inline const char* error_name(ErrorCode c) {
    switch (c) {
        case ErrorCode::InexactDivision: return "InexactDivision";
        case ErrorCode::UnknownVariable: return "UnknownVariable";
        case ErrorCode::BadEvaluationPoint: return "BadEvaluationPoint";
        case ErrorCode::EvaluationExhausted: return "EvaluationExhausted";
        case ErrorCode::DegenerateTerm: return "DegenerateTerm";
        case ErrorCode::NoIntegrationVariables: return "NoIntegrationVariables";
        case ErrorCode::IndexError: return "IndexError";
        case ErrorCode::NonHyperexponential: return "NonHyperexponential";
        case ErrorCode::ParseError: return "ParseError";
        case ErrorCode::NotFound: return "NotFound";
        case ErrorCode::UnboundedBoundaryTerm: return "UnboundedBoundaryTerm";
        case ErrorCode::RescaleRequired: return "RescaleRequired";
        case ErrorCode::SingularObstruction: return "SingularObstruction";
        case ErrorCode::UnderdeterminedInit: return "UnderdeterminedInit";
        case ErrorCode::InconsistentInit: return "InconsistentInit";
        case ErrorCode::ExpansionUnsupported: return "ExpansionUnsupported";
        case ErrorCode::DivergentIntegral: return "DivergentIntegral";
        case ErrorCode::NumericFailure: return "NumericFailure";
        case ErrorCode::Internal: return "Internal";
    }
    return "Unknown";
}

}  // namespace hyperaz
