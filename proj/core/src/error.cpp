#include "shapefit/error.hpp"

namespace shapefit {

std::string_view to_string(ErrorCode code)
{
    switch (code) {
    case ErrorCode::InvalidShape: return "invalid-shape";
    case ErrorCode::ShapeArity: return "shape-arity";
    case ErrorCode::DegenerateShape: return "degenerate-shape";
    case ErrorCode::CorpusTooSmall: return "corpus-too-small";
    case ErrorCode::RegistryIncomplete: return "registry-incomplete";
    case ErrorCode::WarpDegenerate: return "warp-degenerate";
    case ErrorCode::DimensionMismatch: return "dimension-mismatch";
    case ErrorCode::NoFootprint: return "no-footprint";
    case ErrorCode::InvalidArgument: return "invalid-argument";
    case ErrorCode::Parse: return "parse";
    case ErrorCode::Io: return "io";
    }
    return "unknown";
}

ErrorClass classify(ErrorCode code)
{
    switch (code) {
    case ErrorCode::DegenerateShape:
    case ErrorCode::WarpDegenerate:
    case ErrorCode::NoFootprint:
        return ErrorClass::Numerical;
    default:
        return ErrorClass::Validation;
    }
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code)
{
}

}  // namespace shapefit
