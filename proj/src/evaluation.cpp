#include "pathfinder/evaluation.hpp"

#include <chrono>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "pathfinder/error.hpp"

namespace pathfinder {

namespace fs = std::filesystem;

GroundTruthLabel label_from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("image_id") || !j["image_id"].is_string() || !j.contains("clock") ||
        !j["clock"].is_string()) {
        throw Error(ErrorCode::InvalidArgument, "label needs string fields image_id and clock");
    }
    GroundTruthLabel label;
    label.image_id = j["image_id"].get<std::string>();
    if (label.image_id.empty()) {
        throw Error(ErrorCode::InvalidArgument, "empty image_id");
    }
    label.clock = ClockDirection::parse(j["clock"].get<std::string>());
    label.annotator = j.value("annotator", std::string{});
    label.path = j.value("path", label.image_id);
    return label;
}

nlohmann::json to_json(const GroundTruthLabel& label) {
    return nlohmann::json{{"image_id", label.image_id},
                          {"path", label.path.empty() ? label.image_id : label.path},
                          {"clock", label.clock.label()},
                          {"annotator", label.annotator}};
}

std::vector<GroundTruthLabel> read_manifest(std::istream& in) {
    std::vector<GroundTruthLabel> labels;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw Error(ErrorCode::InvalidArgument, fmt::format("manifest line {}: {}", line_no, e.what()));
        }
        labels.push_back(label_from_json(j));
    }
    return labels;
}

std::vector<GroundTruthLabel> read_manifest(const fs::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorCode::UnreadableFile, path.string());
    }
    return read_manifest(in);
}

namespace {

// Errors that describe the configuration rather than one image; these abort
// an evaluation instead of being recorded per image.
bool is_configuration_error(ErrorCode code) {
    return code == ErrorCode::PatchTooLarge || code == ErrorCode::InvalidArgument ||
           code == ErrorCode::GridTooLarge;
}

}  // namespace

void finalize(EvalReport& report) {
    report.n = report.per_image.size();
    if (report.n == 0) {
        report.mae_deg = report.accuracy_pct = report.avg_response_time_s = 0.0;
        return;
    }
    double error_sum = 0.0;
    double time_sum = 0.0;
    std::size_t exact = 0;
    for (const ImageResult& r : report.per_image) {
        error_sum += r.error_deg;
        time_sum += r.time_s;
        exact += r.predicted == r.ground_truth ? 1 : 0;
    }
    const auto n = static_cast<double>(report.n);
    report.mae_deg = error_sum / n;
    report.accuracy_pct = 100.0 * static_cast<double>(exact) / n;
    report.avg_response_time_s = time_sum / n;
}

EvalReport evaluate(const Predictor& predictor, const std::vector<GroundTruthLabel>& manifest,
                    const fs::path& image_root, const LoadOptions& load) {
    if (manifest.empty()) {
        throw Error(ErrorCode::InvalidArgument, "empty manifest");
    }

    EvalReport report;
    for (const GroundTruthLabel& label : manifest) {
        const fs::path image_path = image_root / (label.path.empty() ? label.image_id : label.path);
        DepthImage img;
        try {
            img = load_depth_image(image_path, load).with_source_id(label.image_id);
        } catch (const Error& e) {
            throw Error(ErrorCode::MissingImage, label.image_id + " (" + e.what() + ")");
        }

        const auto t0 = std::chrono::steady_clock::now();
        auto elapsed = [&t0] { return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(); };
        ClockDirection predicted;
        try {
            predicted = predictor(img);
        } catch (const Error& e) {
            if (is_configuration_error(e.code())) throw;
            report.failures.push_back({label.image_id, e.what(), elapsed()});
            continue;
        } catch (const std::exception& e) {
            report.failures.push_back({label.image_id, e.what(), elapsed()});
            continue;
        }
        const double time_s = elapsed();

        report.per_image.push_back(ImageResult{
            label.image_id, predicted, label.clock,
            angular_distance(clock_to_degrees(predicted), clock_to_degrees(label.clock)), time_s});
    }
    finalize(report);
    return report;
}

AgreementReport cohens_kappa(const std::vector<GroundTruthLabel>& labels_a,
                             const std::vector<GroundTruthLabel>& labels_b) {
    auto index = [](const std::vector<GroundTruthLabel>& labels) {
        std::map<std::string, ClockDirection> by_id;
        for (const auto& l : labels) {
            if (!by_id.emplace(l.image_id, l.clock).second) {
                throw Error(ErrorCode::DuplicateLabel, l.image_id);
            }
        }
        return by_id;
    };
    const auto a = index(labels_a);
    const auto b = index(labels_b);
    if (a.empty()) {
        throw Error(ErrorCode::IdSetMismatch, "no labelled items");
    }
    if (a.size() != b.size() ||
        !std::equal(a.begin(), a.end(), b.begin(), [](const auto& x, const auto& y) { return x.first == y.first; })) {
        throw Error(ErrorCode::IdSetMismatch, "annotators labelled different image sets");
    }

    AgreementReport r;
    r.n_items = a.size();
    std::size_t agree = 0;
    for (auto ia = a.begin(), ib = b.begin(); ia != a.end(); ++ia, ++ib) {
        ++r.confusion[static_cast<std::size_t>(ia->second.index())][static_cast<std::size_t>(ib->second.index())];
        agree += ia->second == ib->second ? 1 : 0;
    }

    const auto n = static_cast<double>(r.n_items);
    r.p_observed = static_cast<double>(agree) / n;
    for (std::size_t k = 0; k < ClockDirection::kCount; ++k) {
        std::size_t row = 0;
        std::size_t col = 0;
        for (std::size_t j = 0; j < ClockDirection::kCount; ++j) {
            row += r.confusion[k][j];
            col += r.confusion[j][k];
        }
        r.p_expected += (static_cast<double>(row) / n) * (static_cast<double>(col) / n);
    }
    // p_expected == 1 forces every item into one shared class, so p_observed == 1.
    r.kappa = r.p_expected >= 1.0 ? 1.0 : (r.p_observed - r.p_expected) / (1.0 - r.p_expected);
    return r;
}

std::vector<SweepEntry> patch_sweep(const std::vector<GroundTruthLabel>& manifest, const fs::path& image_root,
                                    const std::vector<std::size_t>& patch_sizes_px, const PipelineConfig& base,
                                    const LoadOptions& load) {
    if (patch_sizes_px.empty()) {
        throw Error(ErrorCode::InvalidArgument, "no patch sizes given");
    }
    std::vector<SweepEntry> out;
    out.reserve(patch_sizes_px.size());
    for (std::size_t patch_px : patch_sizes_px) {
        PipelineConfig config = base;
        config.patch_px = patch_px;
        config.grid.reset();
        SweepEntry entry{patch_px, std::nullopt, {}};
        try {
            entry.report = evaluate([&config](const DepthImage& img) { return predict_clock(img, config); },
                                    manifest, image_root, load);
        } catch (const std::exception& e) {
            entry.error = e.what();
        }
        out.push_back(std::move(entry));
    }
    return out;
}

nlohmann::json to_json(const EvalReport& r) {
    nlohmann::json per_image = nlohmann::json::array();
    for (const ImageResult& i : r.per_image) {
        per_image.push_back({{"image_id", i.image_id},
                             {"predicted", i.predicted.label()},
                             {"gt", i.ground_truth.label()},
                             {"error_deg", i.error_deg},
                             {"time_s", i.time_s}});
    }
    nlohmann::json failures = nlohmann::json::array();
    for (const ImageFailure& f : r.failures) {
        failures.push_back({{"image_id", f.image_id}, {"error", f.error}, {"time_s", f.time_s}});
    }
    return nlohmann::json{{"n", r.n},
                          {"mae_deg", r.mae_deg},
                          {"accuracy_pct", r.accuracy_pct},
                          {"avg_response_time_s", r.avg_response_time_s},
                          {"per_image", std::move(per_image)},
                          {"failures", std::move(failures)}};
}

nlohmann::json to_json(const AgreementReport& r) {
    nlohmann::json labels = nlohmann::json::array();
    for (ClockDirection c : ClockDirection::all()) labels.push_back(c.label());
    return nlohmann::json{{"kappa", r.kappa},
                          {"p_observed", r.p_observed},
                          {"p_expected", r.p_expected},
                          {"n_items", r.n_items},
                          {"labels", std::move(labels)},
                          {"confusion", r.confusion}};
}

nlohmann::json to_json(const std::vector<SweepEntry>& sweep) {
    nlohmann::json out = nlohmann::json::array();
    for (const SweepEntry& e : sweep) {
        nlohmann::json j{{"patch_px", e.patch_px}};
        if (e.report) {
            j["report"] = to_json(*e.report);
        } else {
            j["error"] = e.error;
        }
        out.push_back(std::move(j));
    }
    return out;
}

std::string sweep_csv(const std::vector<SweepEntry>& sweep) {
    std::string out = "patch_px,mae_deg,accuracy_pct,avg_time_s\n";
    for (const SweepEntry& e : sweep) {
        if (e.report) {
            out += fmt::format("{},{:.6f},{:.6f},{:.9f}\n", e.patch_px, e.report->mae_deg, e.report->accuracy_pct,
                               e.report->avg_response_time_s);
        } else {
            out += fmt::format("{},,,\n", e.patch_px);
        }
    }
    return out;
}

}  // namespace pathfinder
