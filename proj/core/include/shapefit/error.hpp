#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace shapefit {

enum class ErrorCode {
    InvalidShape,
    ShapeArity,
    DegenerateShape,
    CorpusTooSmall,
    RegistryIncomplete,
    WarpDegenerate,
    DimensionMismatch,
    NoFootprint,
    InvalidArgument,
    Parse,
    Io,
};

std::string_view to_string(ErrorCode code);

/// Coarse classification used by the CLI to pick an exit code.
enum class ErrorClass { Validation, Numerical };

ErrorClass classify(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message);

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace shapefit
