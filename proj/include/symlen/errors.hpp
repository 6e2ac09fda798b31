#pragma once

#include <stdexcept>
#include <string>

namespace symlen {

enum class Err {
    DivisionByZero,
    DescriptorMismatch,
    RootNotAvailable,
    InvalidArgument,
    ParseError,
    SideConditionViolated,
    IndexOutOfRange,
    ModulusMismatch,
    FieldNotRationals,
    DimensionMismatch,
    ZeroVector,
    MissingWitness,
    WitnessInvalid,
    DegenerateSample,
    BothZero,
    OutOfRange,
    CheckFailed,
    SubDecompositionInvalid,
};

inline const char* err_name(Err e)
{
    switch (e) {
        case Err::DivisionByZero: return "DivisionByZero";
        case Err::DescriptorMismatch: return "DescriptorMismatch";
        case Err::RootNotAvailable: return "RootNotAvailable";
        case Err::InvalidArgument: return "InvalidArgument";
        case Err::ParseError: return "ParseError";
        case Err::SideConditionViolated: return "SideConditionViolated";
        case Err::IndexOutOfRange: return "IndexOutOfRange";
        case Err::ModulusMismatch: return "ModulusMismatch";
        case Err::FieldNotRationals: return "FieldNotRationals";
        case Err::DimensionMismatch: return "DimensionMismatch";
        case Err::ZeroVector: return "ZeroVector";
        case Err::MissingWitness: return "MissingWitness";
        case Err::WitnessInvalid: return "WitnessInvalid";
        case Err::DegenerateSample: return "DegenerateSample";
        case Err::BothZero: return "BothZero";
        case Err::OutOfRange: return "OutOfRange";
        case Err::CheckFailed: return "CheckFailed";
        case Err::SubDecompositionInvalid: return "SubDecompositionInvalid";
    }
    return "Unknown";
}

class Error : public std::runtime_error {
public:
    Error(Err kind, std::string detail)
        : std::runtime_error(std::string(err_name(kind)) + ": " + detail), kind_(kind)
    {
    }

    Err kind() const { return kind_; }

private:
    Err kind_;
};

// MissingWitness carries the offending request so callers (and the CLI)
// can report exactly what was asked for.
class MissingWitnessError : public Error {
public:
    MissingWitnessError(std::string request_json)
        : Error(Err::MissingWitness, request_json), request_json_(std::move(request_json))
    {
    }

    const std::string& request_json() const { return request_json_; }

private:
    std::string request_json_;
};

}  // namespace symlen
