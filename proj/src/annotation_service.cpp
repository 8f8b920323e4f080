#include "pathfinder/annotation_service.hpp"

#include <fcntl.h>
#include <sys/socket.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <cstring>
#include <fstream>
#include <iterator>
#include <set>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "pathfinder/error.hpp"

namespace pathfinder {

namespace fs = std::filesystem;

// --- LabelStore ------------------------------------------------------------

LabelStore::LabelStore(fs::path log_path) : path_(std::move(log_path)) { replay(); }

void LabelStore::replay() {
    std::ifstream in(path_, std::ios::binary);
    if (!in) return;  // no log yet
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

    std::size_t pos = 0;
    std::size_t line_no = 0;
    while (pos < text.size()) {
        const std::size_t nl = text.find('\n', pos);
        ++line_no;
        if (nl == std::string::npos) {
            // Torn final write from a crash: drop it so the next append starts
            // on a clean line.
            fs::resize_file(path_, pos);
            break;
        }
        const std::string line = text.substr(pos, nl - pos);
        pos = nl + 1;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            GroundTruthLabel label = label_from_json(nlohmann::json::parse(line));
            index_[{label.image_id, label.annotator}] = std::move(label);
        } catch (const std::exception& e) {
            throw Error(ErrorCode::ConfigError,
                        path_.string() + ":" + std::to_string(line_no) + ": corrupt label log (" + e.what() + ")");
        }
    }
}

void LabelStore::append(const GroundTruthLabel& label) {
    const std::string line = to_json(label).dump() + "\n";

    std::lock_guard write_lock(write_mutex_);
    const int fd = ::open(path_.c_str(), O_WRONLY | O_CREAT | O_APPEND | O_CLOEXEC, 0644);
    if (fd < 0) {
        throw Error(ErrorCode::UnreadableFile, path_.string() + ": " + std::strerror(errno));
    }
    std::size_t written = 0;
    while (written < line.size()) {
        const ssize_t n = ::write(fd, line.data() + written, line.size() - written);
        if (n < 0) {
            if (errno == EINTR) continue;
            const int err = errno;
            ::close(fd);
            throw Error(ErrorCode::UnreadableFile, path_.string() + ": " + std::strerror(err));
        }
        written += static_cast<std::size_t>(n);
    }
    ::fsync(fd);
    ::close(fd);

    std::unique_lock index_lock(index_mutex_);
    index_[{label.image_id, label.annotator}] = label;
}

std::optional<GroundTruthLabel> LabelStore::get(const std::string& image_id, const std::string& annotator) const {
    std::shared_lock lock(index_mutex_);
    auto it = index_.find({image_id, annotator});
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

std::vector<std::string> LabelStore::annotators_for(const std::string& image_id) const {
    std::shared_lock lock(index_mutex_);
    std::vector<std::string> out;
    for (auto it = index_.lower_bound({image_id, {}}); it != index_.end() && it->first.first == image_id; ++it) {
        out.push_back(it->first.second);
    }
    return out;
}

std::vector<GroundTruthLabel> LabelStore::labels_by(const std::string& annotator) const {
    std::shared_lock lock(index_mutex_);
    std::vector<GroundTruthLabel> out;
    for (const auto& [key, label] : index_) {
        if (key.second == annotator) out.push_back(label);
    }
    return out;
}

std::vector<GroundTruthLabel> LabelStore::all() const {
    std::shared_lock lock(index_mutex_);
    std::vector<GroundTruthLabel> out;
    out.reserve(index_.size());
    for (const auto& [key, label] : index_) out.push_back(label);
    return out;
}

// --- AnnotationService -----------------------------------------------------

namespace {

bool is_image_file(const fs::directory_entry& entry) {
    if (!entry.is_regular_file()) return false;
    std::string ext = entry.path().extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    return ext == ".png" || ext == ".pgm" || ext == ".csv" || ext == ".f32" || ext == ".raw" || ext == ".bin";
}

int http_status(ErrorCode code) {
    switch (code) {
        case ErrorCode::UnknownImage: return 404;
        case ErrorCode::NoOverlap: return 404;
        case ErrorCode::InvalidClock:
        case ErrorCode::InvalidArgument:
        case ErrorCode::PatchTooLarge:
        case ErrorCode::IdSetMismatch:
        case ErrorCode::DuplicateLabel: return 400;
        default: return 500;
    }
}

void send_error(httplib::Response& res, int status, std::string_view code, const std::string& message) {
    res.status = status;
    res.set_content(nlohmann::json{{"error", code}, {"message", message}}.dump(), "application/json");
}

void send_json(httplib::Response& res, const nlohmann::json& body, int status = 200) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
}

template <class Handler>
void guarded(httplib::Response& res, Handler&& handler) {
    try {
        handler();
    } catch (const Error& e) {
        send_error(res, http_status(e.code()), to_string(e.code()), e.what());
    } catch (const nlohmann::json::exception& e) {
        send_error(res, 400, "InvalidArgument", e.what());
    } catch (const std::exception& e) {
        send_error(res, 500, "Internal", e.what());
    }
}

double parse_double_param(const httplib::Request& req, const char* name, double fallback) {
    if (!req.has_param(name)) return fallback;
    const std::string v = req.get_param_value(name);
    char* end = nullptr;
    const double d = std::strtod(v.c_str(), &end);
    if (v.empty() || end != v.c_str() + v.size()) {
        throw Error(ErrorCode::InvalidArgument, std::string(name) + "='" + v + "' is not a number");
    }
    return d;
}

}  // namespace

AnnotationService::AnnotationService(ServiceConfig config)
    : config_(std::move(config)), store_(config_.labels_path), server_(std::make_unique<httplib::Server>()) {
    std::error_code ec;
    if (!fs::is_directory(config_.image_root, ec)) {
        throw Error(ErrorCode::ConfigError, "image root is not a readable directory: " + config_.image_root.string());
    }
    fs::directory_iterator probe(config_.image_root, ec);
    if (ec) {
        throw Error(ErrorCode::ConfigError, "cannot read image root " + config_.image_root.string() + ": " +
                                                ec.message());
    }
    // The library default adds SO_REUSEPORT, which would let a second server
    // share an occupied port instead of failing to bind.
    server_->set_socket_options([](auto sock) {
        int yes = 1;
        ::setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof(yes));
    });
    install_routes();
}

AnnotationService::~AnnotationService() { stop(); }

fs::path AnnotationService::image_path(const std::string& image_id) const {
    if (image_id.empty() || image_id.find('/') != std::string::npos || image_id == "." || image_id == "..") {
        throw Error(ErrorCode::UnknownImage, image_id);
    }
    const fs::path p = config_.image_root / image_id;
    std::error_code ec;
    if (!is_image_file(fs::directory_entry(p, ec)) || ec) {
        throw Error(ErrorCode::UnknownImage, image_id);
    }
    return p;
}

std::vector<ImageEntry> AnnotationService::list_images() const {
    std::vector<ImageEntry> out;
    for (const auto& entry : fs::directory_iterator(config_.image_root)) {
        if (!is_image_file(entry)) continue;
        const std::string id = entry.path().filename().string();
        out.push_back(ImageEntry{id, store_.annotators_for(id)});
    }
    std::sort(out.begin(), out.end(), [](const ImageEntry& a, const ImageEntry& b) { return a.image_id < b.image_id; });
    return out;
}

GroundTruthLabel AnnotationService::submit_label(const std::string& image_id, const std::string& annotator,
                                                 const std::string& clock) {
    image_path(image_id);
    if (annotator.empty()) {
        throw Error(ErrorCode::InvalidArgument, "annotator must be non-empty");
    }
    GroundTruthLabel label{image_id, ClockDirection::parse(clock), annotator, image_id};
    store_.append(label);
    return label;
}

Prediction AnnotationService::get_prediction(const std::string& image_id, const PipelineConfig& config) const {
    const DepthImage img = load_depth_image(image_path(image_id), config_.load).with_source_id(image_id);
    return predict(img, config);
}

AgreementReport AnnotationService::get_agreement(const std::string& annotator_a,
                                                 const std::string& annotator_b) const {
    auto a = store_.labels_by(annotator_a);
    auto b = store_.labels_by(annotator_b);
    std::set<std::string> ids_b;
    for (const auto& l : b) ids_b.insert(l.image_id);
    std::set<std::string> shared;
    for (const auto& l : a) {
        if (ids_b.count(l.image_id)) shared.insert(l.image_id);
    }
    if (shared.empty()) {
        throw Error(ErrorCode::NoOverlap, "'" + annotator_a + "' and '" + annotator_b + "' share no labelled image");
    }
    auto keep_shared = [&shared](std::vector<GroundTruthLabel>& labels) {
        std::erase_if(labels, [&shared](const GroundTruthLabel& l) { return !shared.count(l.image_id); });
    };
    keep_shared(a);
    keep_shared(b);
    return cohens_kappa(a, b);
}

std::string AnnotationService::export_manifest() const {
    std::string out;
    for (const GroundTruthLabel& label : store_.all()) {
        out += to_json(label).dump();
        out += '\n';
    }
    return out;
}

std::vector<std::uint8_t> AnnotationService::image_png(const std::string& image_id) const {
    const fs::path p = image_path(image_id);
    std::string ext = p.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    if (ext == ".png") {
        std::ifstream in(p, std::ios::binary);
        return std::vector<std::uint8_t>((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    }
    return encode_png8(load_depth_image(p, config_.load));
}

void AnnotationService::install_routes() {
    httplib::Server& svr = *server_;

    svr.Get("/api/images", [this](const httplib::Request&, httplib::Response& res) {
        guarded(res, [&] {
            nlohmann::json out = nlohmann::json::array();
            for (const ImageEntry& e : list_images()) {
                out.push_back({{"image_id", e.image_id}, {"labeled_by", e.labeled_by}});
            }
            send_json(res, out);
        });
    });

    svr.Get(R"(/api/images/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
        guarded(res, [&] {
            const auto bytes = image_png(req.matches[1]);
            res.set_content(std::string(bytes.begin(), bytes.end()), "image/png");
        });
    });

    svr.Post("/api/labels", [this](const httplib::Request& req, httplib::Response& res) {
        guarded(res, [&] {
            const auto body = nlohmann::json::parse(req.body);
            if (!body.is_object()) throw Error(ErrorCode::InvalidArgument, "body must be a JSON object");
            const auto label = submit_label(body.at("image_id").get<std::string>(),
                                            body.at("annotator").get<std::string>(),
                                            body.at("clock").get<std::string>());
            send_json(res, to_json(label), 201);
        });
    });

    svr.Get(R"(/api/predict/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
        guarded(res, [&] {
            PipelineConfig config = config_.pipeline;
            if (req.has_param("patch_px")) {
                const double p = parse_double_param(req, "patch_px", 0);
                if (p < 1 || p != static_cast<double>(static_cast<std::size_t>(p))) {
                    throw Error(ErrorCode::InvalidArgument, "patch_px must be a positive integer");
                }
                config.patch_px = static_cast<std::size_t>(p);
                config.grid.reset();
            }
            config.search.dark_threshold = parse_double_param(req, "dark", config.search.dark_threshold);
            config.search.diff_threshold = parse_double_param(req, "diff", config.search.diff_threshold);
            send_json(res, to_json(get_prediction(req.matches[1], config)));
        });
    });

    svr.Get("/api/agreement", [this](const httplib::Request& req, httplib::Response& res) {
        guarded(res, [&] {
            if (!req.has_param("a") || !req.has_param("b")) {
                throw Error(ErrorCode::InvalidArgument, "query parameters a and b are required");
            }
            send_json(res, to_json(get_agreement(req.get_param_value("a"), req.get_param_value("b"))));
        });
    });

    svr.Get("/api/export", [this](const httplib::Request&, httplib::Response& res) {
        guarded(res, [&] { res.set_content(export_manifest(), "application/x-ndjson"); });
    });

    if (config_.static_dir) {
        if (!svr.set_mount_point("/", config_.static_dir->string())) {
            throw Error(ErrorCode::ConfigError, "static directory not found: " + config_.static_dir->string());
        }
    }
}

int AnnotationService::bind(const std::string& host, int port) {
    if (port == 0) {
        const int bound = server_->bind_to_any_port(host);
        if (bound < 0) throw Error(ErrorCode::ConfigError, "cannot bind " + host);
        return bound;
    }
    if (!server_->bind_to_port(host, port)) {
        throw Error(ErrorCode::ConfigError, "cannot bind " + host + ":" + std::to_string(port));
    }
    return port;
}

void AnnotationService::serve() { server_->listen_after_bind(); }

void AnnotationService::stop() {
    if (server_) server_->stop();
}

}  // namespace pathfinder
