#pragma once

// Depth image -> direction: square resample, patch grid, path search,
// quantization and feedback encodings.

#include <cstddef>
#include <optional>
#include <string>

#include <nlohmann/json_fwd.hpp>

#include "pathfinder/depth_io.hpp"
#include "pathfinder/feedback.hpp"
#include "pathfinder/pathfinder.hpp"
#include "pathfinder/schemes.hpp"

namespace pathfinder {

struct GridDims {
    std::size_t rows = 0;
    std::size_t cols = 0;
};

struct PipelineConfig {
    std::size_t frame_side = 480;
    std::size_t patch_px = 15;
    // When set, the grid is built from these dimensions and patch_px is ignored.
    std::optional<GridDims> grid;
    SearchParams search;
};

struct Prediction {
    std::string image_id;
    std::size_t grid_rows = 0;
    std::size_t grid_cols = 0;
    std::size_t patch_px = 0;
    Cell start;
    // Empty when the scene is blocked (no move possible from the start).
    std::optional<NavPath> path;
    std::optional<DirectionEstimate> direction;
    // Stop reason of the zero-length result for blocked scenes.
    std::optional<StopReason> blocked_reason;

    bool blocked() const { return !direction.has_value(); }
};

PatchGrid build_grid(const DepthImage& img, const PipelineConfig& config);

// Throws on configuration errors (e.g. PatchTooLarge); a blocked scene is a
// valid result, not an error.
Prediction predict(const DepthImage& img, const PipelineConfig& config);

// Clock for the evaluation harness; throws Error(NoFreePath) when blocked.
ClockDirection predict_clock(const DepthImage& img, const PipelineConfig& config);

// {"image_id", "blocked", "clock", "dof3", "deviation_deg", "raw_deg",
//  "degrees", "path", "stop_reason", "grid", "feedback"}
nlohmann::json to_json(const Prediction& p);

}  // namespace pathfinder
