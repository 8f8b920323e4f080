#pragma once

// Local labelling backend: serves depth images, records clock labels from
// annotators in an append-only JSON Lines log, and exposes predictions and
// inter-annotator agreement over HTTP.

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <mutex>
#include <string>
#include <utility>
#include <vector>

#include "pathfinder/depth_io.hpp"
#include "pathfinder/evaluation.hpp"
#include "pathfinder/pipeline.hpp"

namespace httplib {
class Server;
}

namespace pathfinder {

// Last write wins per (image_id, annotator). The log is the source of truth:
// replaying it always rebuilds the same index.
class LabelStore {
public:
    explicit LabelStore(std::filesystem::path log_path);

    void append(const GroundTruthLabel& label);

    std::optional<GroundTruthLabel> get(const std::string& image_id, const std::string& annotator) const;
    std::vector<std::string> annotators_for(const std::string& image_id) const;
    std::vector<GroundTruthLabel> labels_by(const std::string& annotator) const;
    // Sorted by (image_id, annotator).
    std::vector<GroundTruthLabel> all() const;

    const std::filesystem::path& path() const noexcept { return path_; }

private:
    using Key = std::pair<std::string, std::string>;

    void replay();

    std::filesystem::path path_;
    mutable std::shared_mutex index_mutex_;
    std::mutex write_mutex_;
    std::map<Key, GroundTruthLabel> index_;
};

struct ServiceConfig {
    std::filesystem::path image_root;
    std::filesystem::path labels_path;
    // Static UI assets mounted at "/" when set.
    std::optional<std::filesystem::path> static_dir;
    PipelineConfig pipeline;
    LoadOptions load;
};

struct ImageEntry {
    std::string image_id;
    std::vector<std::string> labeled_by;
};

class AnnotationService {
public:
    // Throws Error(ConfigError) when image_root is not a readable directory.
    explicit AnnotationService(ServiceConfig config);
    ~AnnotationService();

    AnnotationService(const AnnotationService&) = delete;
    AnnotationService& operator=(const AnnotationService&) = delete;

    std::vector<ImageEntry> list_images() const;
    GroundTruthLabel submit_label(const std::string& image_id, const std::string& annotator,
                                  const std::string& clock);
    Prediction get_prediction(const std::string& image_id, const PipelineConfig& config) const;
    AgreementReport get_agreement(const std::string& annotator_a, const std::string& annotator_b) const;
    std::string export_manifest() const;
    std::vector<std::uint8_t> image_png(const std::string& image_id) const;

    const ServiceConfig& config() const noexcept { return config_; }
    LabelStore& labels() noexcept { return store_; }

    // HTTP front end. bind() returns the bound port (port 0 picks a free one)
    // or throws Error(ConfigError) when the port is unavailable.
    int bind(const std::string& host, int port);
    // Blocks until stop() is called.
    void serve();
    void stop();

private:
    std::filesystem::path image_path(const std::string& image_id) const;
    void install_routes();

    ServiceConfig config_;
    LabelStore store_;
    std::unique_ptr<httplib::Server> server_;
};

}  // namespace pathfinder
