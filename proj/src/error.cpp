#include "pathfinder/error.hpp"

namespace pathfinder {

std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::UnreadableFile: return "UnreadableFile";
        case ErrorCode::UnsupportedFormat: return "UnsupportedFormat";
        case ErrorCode::DimensionMismatch: return "DimensionMismatch";
        case ErrorCode::InvalidArgument: return "InvalidArgument";
        case ErrorCode::PatchTooLarge: return "PatchTooLarge";
        case ErrorCode::GridTooLarge: return "GridTooLarge";
        case ErrorCode::NoFreePath: return "NoFreePath";
        case ErrorCode::EmptyPathSet: return "EmptyPathSet";
        case ErrorCode::ZeroLengthPath: return "ZeroLengthPath";
        case ErrorCode::OutOfField: return "OutOfField";
        case ErrorCode::InvalidClock: return "InvalidClock";
        case ErrorCode::MissingImage: return "MissingImage";
        case ErrorCode::IdSetMismatch: return "IdSetMismatch";
        case ErrorCode::DuplicateLabel: return "DuplicateLabel";
        case ErrorCode::UnknownImage: return "UnknownImage";
        case ErrorCode::NoOverlap: return "NoOverlap";
        case ErrorCode::ConfigError: return "ConfigError";
    }
    return "Unknown";
}

}  // namespace pathfinder
