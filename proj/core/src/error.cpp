#include "fruitscan/error.hpp"

namespace fruitscan {

std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::InvalidArgument: return "invalid-argument";
        case ErrorCode::Parse: return "parse";
        case ErrorCode::Truncated: return "truncated-data";
        case ErrorCode::Unsupported: return "unsupported";
        case ErrorCode::Degenerate: return "degenerate";
        case ErrorCode::OutOfBounds: return "out-of-bounds";
        case ErrorCode::MissingDepth: return "missing-depth";
        case ErrorCode::PoseUnavailable: return "pose-unavailable";
        case ErrorCode::DimensionMismatch: return "dimension-mismatch";
        case ErrorCode::Unpaired: return "unpaired-id";
        case ErrorCode::Io: return "io";
    }
    return "unknown";
}

}  // namespace fruitscan
