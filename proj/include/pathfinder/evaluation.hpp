#pragma once

// Scoring of direction predictors against clock-labelled manifests, annotator
// agreement, and the patch-size sweep.

#include <array>
#include <cstddef>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "pathfinder/depth_io.hpp"
#include "pathfinder/pipeline.hpp"
#include "pathfinder/schemes.hpp"

namespace pathfinder {

struct GroundTruthLabel {
    std::string image_id;
    ClockDirection clock;
    std::string annotator;
    // Image location relative to the image root; defaults to image_id.
    std::string path;
};

// Manifest / label log line: {"image_id", "path", "clock", "annotator"}.
GroundTruthLabel label_from_json(const nlohmann::json& j);
nlohmann::json to_json(const GroundTruthLabel& label);

// JSON Lines; blank lines are skipped. Throws Error(InvalidArgument) with the
// line number for malformed lines and Error(InvalidClock) for bad clocks.
std::vector<GroundTruthLabel> read_manifest(std::istream& in);
std::vector<GroundTruthLabel> read_manifest(const std::filesystem::path& path);

struct ImageResult {
    std::string image_id;
    ClockDirection predicted;
    ClockDirection ground_truth;
    double error_deg = 0.0;
    double time_s = 0.0;
};

// Not counted in any aggregate; time_s is kept for latency studies.
struct ImageFailure {
    std::string image_id;
    std::string error;
    double time_s = 0.0;
};

struct EvalReport {
    std::size_t n = 0;
    double mae_deg = 0.0;
    double accuracy_pct = 0.0;
    double avg_response_time_s = 0.0;
    std::vector<ImageResult> per_image;
    // Predictor failures; excluded from n and from every aggregate.
    std::vector<ImageFailure> failures;
};

using Predictor = std::function<ClockDirection(const DepthImage&)>;

// Images are loaded before the clock starts; only the predictor call is
// timed. The image handed to the predictor carries the label's image_id as
// its source_id.
EvalReport evaluate(const Predictor& predictor, const std::vector<GroundTruthLabel>& manifest,
                    const std::filesystem::path& image_root, const LoadOptions& load = {});

// Aggregates from already-scored items, in the given order.
void finalize(EvalReport& report);

struct AgreementReport {
    double kappa = 0.0;
    double p_observed = 0.0;
    double p_expected = 0.0;
    // confusion[a][b]: items labelled a by the first annotator and b by the second.
    std::array<std::array<std::size_t, ClockDirection::kCount>, ClockDirection::kCount> confusion{};
    std::size_t n_items = 0;
};

AgreementReport cohens_kappa(const std::vector<GroundTruthLabel>& labels_a,
                             const std::vector<GroundTruthLabel>& labels_b);

struct SweepEntry {
    std::size_t patch_px = 0;
    std::optional<EvalReport> report;
    // Set when this size could not be evaluated (e.g. PatchTooLarge).
    std::string error;
};

inline const std::vector<std::size_t> kDefaultSweepSizes{240, 120, 60, 30, 15, 5};

// Runs the full pipeline once per patch size with `base` for everything else.
std::vector<SweepEntry> patch_sweep(const std::vector<GroundTruthLabel>& manifest,
                                    const std::filesystem::path& image_root,
                                    const std::vector<std::size_t>& patch_sizes_px, const PipelineConfig& base,
                                    const LoadOptions& load = {});

nlohmann::json to_json(const EvalReport& r);
nlohmann::json to_json(const AgreementReport& r);
nlohmann::json to_json(const std::vector<SweepEntry>& sweep);
// patch_px,mae_deg,accuracy_pct,avg_time_s
std::string sweep_csv(const std::vector<SweepEntry>& sweep);

}  // namespace pathfinder
