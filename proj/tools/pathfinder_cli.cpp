// pathfinder: command-line front end.
//
//   pathfinder predict IMAGE            direction for one depth image
//   pathfinder eval MANIFEST --images R score the pipeline against labels
//   pathfinder sweep MANIFEST --images R --sizes 240,120,...
//   pathfinder kappa --labels LOG A B   agreement between two annotators
//   pathfinder serve --images R --labels LOG [--port 7770]
//
// Every option can also be set through a PATHFINDER_* environment variable.

#include <csignal>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "pathfinder/annotation_service.hpp"
#include "pathfinder/depth_io.hpp"
#include "pathfinder/error.hpp"
#include "pathfinder/evaluation.hpp"
#include "pathfinder/pipeline.hpp"

namespace {

using namespace pathfinder;

constexpr int kExitBlocked = 2;

struct RunConfig {
    std::size_t patch_px = 15;
    std::size_t grid = 0;
    double dark = 0.20;
    double diff = 0.20;
    std::size_t frame = 480;
    std::string scheme = "clock";
    bool invert = false;
    std::string format = "text";
    int port = 7770;
    std::string host = "127.0.0.1";
    std::string labels;
    std::string images;
    std::vector<std::size_t> sizes = kDefaultSweepSizes;

    PipelineConfig pipeline() const {
        PipelineConfig c;
        c.frame_side = frame;
        c.patch_px = patch_px;
        if (grid > 0) c.grid = GridDims{grid, grid};
        c.search.dark_threshold = dark;
        c.search.diff_threshold = diff;
        return c;
    }

    LoadOptions load() const { return LoadOptions{invert}; }
};

std::string direction_text(const Prediction& p, const std::string& scheme) {
    const DirectionEstimate& d = *p.direction;
    if (scheme == "dof3") return std::string(to_string(d.dof3));
    if (scheme == "degree") return format_degrees(d.raw_deg);
    return d.clock.label();
}

int cmd_predict(const RunConfig& cfg, const std::string& image) {
    const Prediction p = predict(load_depth_image(image, cfg.load()), cfg.pipeline());
    if (cfg.format == "json") {
        std::cout << to_json(p).dump(2) << '\n';
    } else {
        std::cout << (p.blocked() ? std::string("blocked") : direction_text(p, cfg.scheme)) << '\n';
    }
    return p.blocked() ? kExitBlocked : 0;
}

std::vector<GroundTruthLabel> load_manifest(const std::string& path, const std::string& annotator) {
    auto labels = read_manifest(std::filesystem::path(path));
    if (!annotator.empty()) {
        std::erase_if(labels, [&](const GroundTruthLabel& l) { return l.annotator != annotator; });
    }
    return labels;
}

int cmd_eval(const RunConfig& cfg, const std::string& manifest, const std::string& annotator) {
    const auto labels = load_manifest(manifest, annotator);
    const PipelineConfig pipeline = cfg.pipeline();
    const EvalReport report =
        evaluate([&](const DepthImage& img) { return predict_clock(img, pipeline); }, labels, cfg.images, cfg.load());
    if (!report.failures.empty()) {
        std::cerr << "warning: " << report.failures.size() << " image(s) produced no prediction\n";
    }
    std::cout << to_json(report).dump(2) << '\n';
    return 0;
}

int cmd_sweep(const RunConfig& cfg, const std::string& manifest, const std::string& annotator,
              const std::string& csv_path) {
    const auto sweep = patch_sweep(load_manifest(manifest, annotator), cfg.images, cfg.sizes, cfg.pipeline(),
                                   cfg.load());
    for (const SweepEntry& e : sweep) {
        if (!e.report) std::cerr << "warning: patch " << e.patch_px << ": " << e.error << '\n';
    }
    if (!csv_path.empty()) {
        std::ofstream out(csv_path);
        if (!out) throw Error(ErrorCode::UnreadableFile, "cannot write " + csv_path);
        out << sweep_csv(sweep);
    }
    std::cout << to_json(sweep).dump(2) << '\n';
    return 0;
}

int cmd_kappa(const RunConfig& cfg, const std::string& a, const std::string& b) {
    const auto labels = read_manifest(std::filesystem::path(cfg.labels));
    std::vector<GroundTruthLabel> la;
    std::vector<GroundTruthLabel> lb;
    for (const auto& l : labels) {
        if (l.annotator == a) la.push_back(l);
        if (l.annotator == b) lb.push_back(l);
    }
    std::cout << to_json(cohens_kappa(la, lb)).dump(2) << '\n';
    return 0;
}

AnnotationService* g_service = nullptr;

extern "C" void handle_signal(int) {
    if (g_service) g_service->stop();
}

int cmd_serve(const RunConfig& cfg, const std::string& static_dir) {
    ServiceConfig sc;
    sc.image_root = cfg.images;
    sc.labels_path = cfg.labels;
    if (!static_dir.empty()) sc.static_dir = static_dir;
    sc.pipeline = cfg.pipeline();
    sc.load = cfg.load();

    AnnotationService service(std::move(sc));
    const int port = service.bind(cfg.host, cfg.port);
    std::cerr << "listening on http://" << cfg.host << ':' << port << std::endl;
    g_service = &service;
    std::signal(SIGINT, handle_signal);
    std::signal(SIGTERM, handle_signal);
    service.serve();
    g_service = nullptr;
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Longest obstacle-free direction from a depth image"};
    app.require_subcommand(1);
    app.fallthrough();

    RunConfig cfg;
    app.add_option("--patch-px", cfg.patch_px, "Patch side in pixels over the square frame")
        ->envname("PATHFINDER_PATCH_PX")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    app.add_option("--grid", cfg.grid, "Use an N x N grid instead of --patch-px (0 = off)")
        ->envname("PATHFINDER_GRID")
        ->capture_default_str();
    app.add_option("--dark", cfg.dark, "Stop when the lookahead average falls below this")
        ->envname("PATHFINDER_DARK")
        ->check(CLI::Range(0.0, 1.0))
        ->capture_default_str();
    app.add_option("--diff", cfg.diff, "Stop when intensity drops by more than this")
        ->envname("PATHFINDER_DIFF")
        ->check(CLI::Range(0.0, 1.0))
        ->capture_default_str();
    app.add_option("--frame", cfg.frame, "Square frame side the image is resampled to")
        ->envname("PATHFINDER_FRAME")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    app.add_option("--scheme", cfg.scheme, "Text output scheme")
        ->envname("PATHFINDER_SCHEME")
        ->check(CLI::IsMember({"dof3", "clock", "degree"}))
        ->capture_default_str();
    app.add_flag("--invert", cfg.invert, "Source encodes near as dark")->envname("PATHFINDER_INVERT");
    app.add_option("--format", cfg.format, "Output format for predict")
        ->envname("PATHFINDER_FORMAT")
        ->check(CLI::IsMember({"text", "json"}))
        ->capture_default_str();
    app.add_option("--images", cfg.images, "Image root directory")->envname("PATHFINDER_IMAGES");
    app.add_option("--labels", cfg.labels, "Label log (JSON Lines)")->envname("PATHFINDER_LABELS");
    app.add_option("--port", cfg.port, "HTTP port for serve")
        ->envname("PATHFINDER_PORT")
        ->check(CLI::Range(0, 65535))
        ->capture_default_str();
    app.add_option("--host", cfg.host, "HTTP bind address for serve")
        ->envname("PATHFINDER_HOST")
        ->capture_default_str();
    app.add_option("--sizes", cfg.sizes, "Patch sizes for sweep")
        ->envname("PATHFINDER_SIZES")
        ->delimiter(',')
        ->capture_default_str();

    std::string image;
    auto* predict_cmd = app.add_subcommand("predict", "Print the direction for one depth image");
    predict_cmd->add_option("image", image, "Depth image (PNG, PGM, CSV or raw f32)")->required();

    std::string manifest;
    std::string annotator;
    auto* eval_cmd = app.add_subcommand("eval", "Score the pipeline against a label manifest");
    eval_cmd->add_option("manifest", manifest, "Manifest (JSON Lines)")->required();
    eval_cmd->add_option("--annotator", annotator, "Only use labels from this annotator");

    std::string csv_path;
    auto* sweep_cmd = app.add_subcommand("sweep", "Evaluate several patch sizes");
    sweep_cmd->add_option("manifest", manifest, "Manifest (JSON Lines)")->required();
    sweep_cmd->add_option("--annotator", annotator, "Only use labels from this annotator");
    sweep_cmd->add_option("--csv", csv_path, "Also write a CSV summary here");

    std::string annotator_a;
    std::string annotator_b;
    auto* kappa_cmd = app.add_subcommand("kappa", "Cohen's kappa between two annotators");
    kappa_cmd->add_option("a", annotator_a, "First annotator")->required();
    kappa_cmd->add_option("b", annotator_b, "Second annotator")->required();

    std::string static_dir;
    auto* serve_cmd = app.add_subcommand("serve", "Run the annotation service");
    serve_cmd->add_option("--static", static_dir, "Directory of UI assets to serve at /")
        ->envname("PATHFINDER_STATIC");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*predict_cmd) return cmd_predict(cfg, image);
        if (*eval_cmd || *sweep_cmd) {
            if (cfg.images.empty()) throw CLI::RequiredError("--images");
            return *eval_cmd ? cmd_eval(cfg, manifest, annotator) : cmd_sweep(cfg, manifest, annotator, csv_path);
        }
        if (*kappa_cmd) {
            if (cfg.labels.empty()) throw CLI::RequiredError("--labels");
            return cmd_kappa(cfg, annotator_a, annotator_b);
        }
        if (*serve_cmd) {
            if (cfg.images.empty()) throw CLI::RequiredError("--images");
            if (cfg.labels.empty()) throw CLI::RequiredError("--labels");
            return cmd_serve(cfg, static_dir);
        }
    } catch (const CLI::Error& e) {
        return app.exit(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
