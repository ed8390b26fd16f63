#pragma once

#include <stdexcept>
#include <string>

namespace mms {

enum class ErrorCode {
    InvalidSpace,
    NonAscendingThresholds,
    DegenerateWindow,
    FamilyTooLarge,
    ConnectorTooDeep,
    MassMismatch,
    Infeasible,
    EmptyK,
    NonConvergence,
    NonzeroMean,
    ConstantArcInFamily,
    DegreeCapExceeded,
    CertificationFailed,
    BadInput,
};

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
    ErrorCode code() const { return code_; }

private:
    ErrorCode code_;
};

inline const char* error_code_name(ErrorCode c) {
    switch (c) {
        case ErrorCode::InvalidSpace: return "InvalidSpace";
        case ErrorCode::NonAscendingThresholds: return "NonAscendingThresholds";
        case ErrorCode::DegenerateWindow: return "DegenerateWindow";
        case ErrorCode::FamilyTooLarge: return "FamilyTooLarge";
        case ErrorCode::ConnectorTooDeep: return "ConnectorTooDeep";
        case ErrorCode::MassMismatch: return "MassMismatch";
        case ErrorCode::Infeasible: return "Infeasible";
        case ErrorCode::EmptyK: return "EmptyK";
        case ErrorCode::NonConvergence: return "NonConvergence";
        case ErrorCode::NonzeroMean: return "NonzeroMean";
        case ErrorCode::ConstantArcInFamily: return "ConstantArcInFamily";
        case ErrorCode::DegreeCapExceeded: return "DegreeCapExceeded";
        case ErrorCode::CertificationFailed: return "CertificationFailed";
        case ErrorCode::BadInput: return "BadInput";
    }
    return "Unknown";
}

} // namespace mms
