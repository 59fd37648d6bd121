#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace fruitscan {

enum class ErrorCode {
    InvalidArgument,
    Parse,
    Truncated,
    Unsupported,
    Degenerate,
    OutOfBounds,
    MissingDepth,
    PoseUnavailable,
    DimensionMismatch,
    Unpaired,
    Io,
};

std::string_view to_string(ErrorCode code);

/// Single exception type for the library; `code()` tells callers what failed.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

/// Non-fatal findings collected by operations that degrade gracefully
/// (self-intersecting contours, clipped rasterization, skipped pose correction).
struct Diagnostics {
    std::vector<std::string> warnings;

    void warn(std::string message) { warnings.push_back(std::move(message)); }
    bool empty() const noexcept { return warnings.empty(); }
};

}  // namespace fruitscan
