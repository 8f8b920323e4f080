#include "pathfinder/pipeline.hpp"

#include <optional>

#include <nlohmann/json.hpp>

#include "pathfinder/error.hpp"

namespace pathfinder {

PatchGrid build_grid(const DepthImage& img, const PipelineConfig& config) {
    // Skip the copy when the image already has the frame size.
    const bool framed = img.width() == config.frame_side && img.height() == config.frame_side;
    std::optional<DepthImage> resampled;
    if (!framed) resampled = normalize_square(img, config.frame_side);
    const DepthImage& square = framed ? img : *resampled;
    if (config.grid) {
        return patchify_grid(square, config.grid->rows, config.grid->cols);
    }
    return patchify(square, config.patch_px);
}

Prediction predict(const DepthImage& img, const PipelineConfig& config) {
    const PatchGrid grid = build_grid(img, config);

    Prediction p;
    p.image_id = img.source_id();
    p.grid_rows = grid.rows();
    p.grid_cols = grid.cols();
    p.patch_px = grid.patch_px();
    p.start = resolve_start(grid, config.search);

    NavPath path;
    try {
        path = dp_search(grid, config.search);
    } catch (const Error& e) {
        if (e.code() != ErrorCode::NoFreePath) throw;
        p.blocked_reason = StopReason::DeadEnd;
        return p;
    }
    if (path.length_steps() == 0) {
        p.blocked_reason = path.stop_reason;
        return p;
    }
    p.direction = direction_from_path(path, p.start);
    p.path = std::move(path);
    return p;
}

ClockDirection predict_clock(const DepthImage& img, const PipelineConfig& config) {
    const Prediction p = predict(img, config);
    if (p.blocked()) {
        throw Error(ErrorCode::NoFreePath, "blocked scene");
    }
    return p.direction->clock;
}

nlohmann::json to_json(const Prediction& p) {
    nlohmann::json j;
    j["image_id"] = p.image_id;
    j["blocked"] = p.blocked();
    j["grid"] = {{"rows", p.grid_rows}, {"cols", p.grid_cols}, {"patch_px", p.patch_px}};
    j["start"] = {p.start.row, p.start.col};
    if (p.blocked()) {
        j["stop_reason"] = std::string(to_string(*p.blocked_reason));
        return j;
    }
    const DirectionEstimate& d = *p.direction;
    j["clock"] = d.clock.label();
    j["dof3"] = std::string(to_string(d.dof3));
    j["deviation_deg"] = d.deviation_deg;
    j["raw_deg"] = d.raw_deg;
    j["degrees"] = format_degrees(d.raw_deg);
    j["stop_reason"] = std::string(to_string(p.path->stop_reason));
    nlohmann::json cells = nlohmann::json::array();
    for (const Cell& c : p.path->cells) cells.push_back({c.row, c.col});
    j["path"] = std::move(cells);
    j["feedback"] = to_json(bundle(d));
    return j;
}

}  // namespace pathfinder
