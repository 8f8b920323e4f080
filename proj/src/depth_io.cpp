#include "pathfinder/depth_io.hpp"

#include <png.h>

#include <algorithm>
#include <array>
#include <charconv>
#include <cctype>
#include <cmath>
#include <csetjmp>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>

#include <nlohmann/json.hpp>

#include "pathfinder/error.hpp"

namespace pathfinder {

namespace fs = std::filesystem;

namespace {

constexpr double kLattice = 4503599627370496.0;  // 2^52

bool in_unit_range(double v) { return v >= 0.0 && v <= 1.0; }

std::vector<char> read_bytes(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorCode::UnreadableFile, path.string());
    }
    std::vector<char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (in.bad()) {
        throw Error(ErrorCode::UnreadableFile, path.string());
    }
    return bytes;
}

struct RawImage {
    std::size_t width = 0;
    std::size_t height = 0;
    std::vector<double> samples;
};

// --- PNG -------------------------------------------------------------------

struct PngReadSource {
    const unsigned char* data;
    std::size_t size;
    std::size_t offset;
};

void png_read_from_memory(png_structp png, png_bytep out, png_size_t count) {
    auto* src = static_cast<PngReadSource*>(png_get_io_ptr(png));
    if (src->offset + count > src->size) {
        png_error(png, "truncated PNG stream");
    }
    std::memcpy(out, src->data + src->offset, count);
    src->offset += count;
}

// libpng prints to stderr by default; keep the message for the Error instead.
void on_png_error(png_structp png, png_const_charp message) {
    if (auto* out = static_cast<std::string*>(png_get_error_ptr(png))) *out = message;
    png_longjmp(png, 1);
}

void on_png_warning(png_structp, png_const_charp) {}

RawImage decode_png(const std::vector<char>& bytes, const fs::path& path) {
    std::string png_message;
    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, &png_message, on_png_error, on_png_warning);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw Error(ErrorCode::UnreadableFile, "libpng initialization failed");
    }

    RawImage raw;
    std::vector<png_byte> rows_buf;
    std::vector<png_bytep> row_ptrs;
    PngReadSource src{reinterpret_cast<const unsigned char*>(bytes.data()), bytes.size(), 0};
    volatile bool unsupported = false;

    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw Error(ErrorCode::UnreadableFile, "corrupt PNG: " + path.string() + " (" + png_message + ")");
    }

    png_set_read_fn(png, &src, png_read_from_memory);
    png_read_info(png, info);

    const png_uint_32 width = png_get_image_width(png, info);
    const png_uint_32 height = png_get_image_height(png, info);
    const int color_type = png_get_color_type(png, info);
    const int bit_depth = png_get_bit_depth(png, info);

    if (color_type != PNG_COLOR_TYPE_GRAY && color_type != PNG_COLOR_TYPE_GRAY_ALPHA) {
        unsupported = true;
    } else {
        if (bit_depth < 8) {
            png_set_expand_gray_1_2_4_to_8(png);
        }
        if (color_type == PNG_COLOR_TYPE_GRAY_ALPHA) {
            png_set_strip_alpha(png);
        }
        png_read_update_info(png, info);

        const std::size_t rowbytes = png_get_rowbytes(png, info);
        rows_buf.resize(rowbytes * height);
        row_ptrs.resize(height);
        for (png_uint_32 y = 0; y < height; ++y) {
            row_ptrs[y] = rows_buf.data() + y * rowbytes;
        }
        png_read_image(png, row_ptrs.data());
        png_read_end(png, nullptr);

        raw.width = width;
        raw.height = height;
        raw.samples.resize(static_cast<std::size_t>(width) * height);
        const bool wide = bit_depth == 16;
        for (png_uint_32 y = 0; y < height; ++y) {
            const png_byte* row = row_ptrs[y];
            for (png_uint_32 x = 0; x < width; ++x) {
                double v = wide ? static_cast<double>((row[2 * x] << 8) | row[2 * x + 1])
                                : static_cast<double>(row[x]);
                raw.samples[static_cast<std::size_t>(y) * width + x] = v;
            }
        }
    }
    png_destroy_read_struct(&png, &info, nullptr);

    if (unsupported) {
        throw Error(ErrorCode::UnsupportedFormat, "PNG is not single-channel: " + path.string());
    }
    return raw;
}

void png_write_to_vector(png_structp png, png_bytep data, png_size_t length) {
    auto* out = static_cast<std::vector<std::uint8_t>*>(png_get_io_ptr(png));
    out->insert(out->end(), data, data + length);
}

void png_flush_noop(png_structp) {}

// --- PGM -------------------------------------------------------------------

class PgmHeaderReader {
public:
    explicit PgmHeaderReader(const std::vector<char>& bytes) : bytes_(bytes) {}

    std::string token() {
        skip_space_and_comments();
        std::string out;
        while (pos_ < bytes_.size() && !std::isspace(static_cast<unsigned char>(bytes_[pos_]))) {
            out.push_back(bytes_[pos_++]);
        }
        return out;
    }

    std::size_t number(const fs::path& path) {
        std::string t = token();
        std::size_t value = 0;
        auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
        if (t.empty() || ec != std::errc() || ptr != t.data() + t.size()) {
            throw Error(ErrorCode::UnsupportedFormat, "malformed PGM header: " + path.string());
        }
        return value;
    }

    // A single whitespace byte separates the header from binary data.
    std::size_t binary_start() const { return pos_ + 1; }

private:
    void skip_space_and_comments() {
        while (pos_ < bytes_.size()) {
            char c = bytes_[pos_];
            if (c == '#') {
                while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
            } else if (std::isspace(static_cast<unsigned char>(c))) {
                ++pos_;
            } else {
                break;
            }
        }
    }

    const std::vector<char>& bytes_;
    std::size_t pos_ = 0;
};

RawImage decode_pgm(const std::vector<char>& bytes, const fs::path& path) {
    PgmHeaderReader reader(bytes);
    const std::string magic = reader.token();
    const std::size_t width = reader.number(path);
    const std::size_t height = reader.number(path);
    const std::size_t maxval = reader.number(path);
    if (width == 0 || height == 0 || maxval == 0 || maxval > 65535) {
        throw Error(ErrorCode::UnsupportedFormat, "invalid PGM header: " + path.string());
    }

    RawImage raw{width, height, std::vector<double>(width * height)};
    if (magic == "P2") {
        for (auto& s : raw.samples) {
            s = static_cast<double>(reader.number(path));
        }
        return raw;
    }

    const std::size_t bytes_per = maxval < 256 ? 1 : 2;
    const std::size_t start = reader.binary_start();
    if (start + width * height * bytes_per > bytes.size()) {
        throw Error(ErrorCode::DimensionMismatch, "PGM payload shorter than header: " + path.string());
    }
    const auto* data = reinterpret_cast<const unsigned char*>(bytes.data()) + start;
    for (std::size_t i = 0; i < raw.samples.size(); ++i) {
        raw.samples[i] = bytes_per == 1 ? data[i] : static_cast<double>((data[2 * i] << 8) | data[2 * i + 1]);
    }
    return raw;
}

// --- raw f32 + sidecar -----------------------------------------------------

fs::path find_sidecar(const fs::path& path) {
    fs::path appended = path;
    appended += ".json";
    if (fs::exists(appended)) return appended;
    fs::path replaced = path;
    replaced.replace_extension(".json");
    if (fs::exists(replaced)) return replaced;
    throw Error(ErrorCode::UnreadableFile, "missing JSON sidecar for " + path.string());
}

RawImage decode_raw_f32(const std::vector<char>& bytes, const fs::path& path) {
    const fs::path sidecar_path = find_sidecar(path);
    std::ifstream in(sidecar_path);
    nlohmann::json sidecar;
    try {
        in >> sidecar;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::UnsupportedFormat, "bad sidecar " + sidecar_path.string() + ": " + e.what());
    }
    if (!sidecar.contains("width") || !sidecar.contains("height") ||
        !sidecar["width"].is_number_integer() || !sidecar["height"].is_number_integer()) {
        throw Error(ErrorCode::UnsupportedFormat, "sidecar needs integer width and height");
    }
    if (sidecar.contains("dtype") && sidecar["dtype"] != "f32le") {
        throw Error(ErrorCode::UnsupportedFormat, "unsupported dtype in " + sidecar_path.string());
    }
    const long long w = sidecar["width"].get<long long>();
    const long long h = sidecar["height"].get<long long>();
    if (w <= 0 || h <= 0) {
        throw Error(ErrorCode::UnsupportedFormat, "sidecar dimensions must be positive");
    }

    const std::size_t count = static_cast<std::size_t>(w) * static_cast<std::size_t>(h);
    if (bytes.size() != count * 4) {
        throw Error(ErrorCode::DimensionMismatch,
                    "sidecar declares " + std::to_string(count) + " values, payload holds " +
                        std::to_string(bytes.size() / 4) + (bytes.size() % 4 ? " (+ partial)" : ""));
    }

    RawImage raw{static_cast<std::size_t>(w), static_cast<std::size_t>(h), std::vector<double>(count)};
    const auto* data = reinterpret_cast<const unsigned char*>(bytes.data());
    for (std::size_t i = 0; i < count; ++i) {
        std::uint32_t bits = static_cast<std::uint32_t>(data[4 * i]) |
                             (static_cast<std::uint32_t>(data[4 * i + 1]) << 8) |
                             (static_cast<std::uint32_t>(data[4 * i + 2]) << 16) |
                             (static_cast<std::uint32_t>(data[4 * i + 3]) << 24);
        float f;
        std::memcpy(&f, &bits, sizeof f);
        if (!std::isfinite(f)) {
            throw Error(ErrorCode::UnsupportedFormat, "non-finite sample in " + path.string());
        }
        raw.samples[i] = f;
    }
    return raw;
}

// --- CSV -------------------------------------------------------------------

RawImage decode_csv(const std::vector<char>& bytes, const fs::path& path) {
    RawImage raw;
    std::string text(bytes.begin(), bytes.end());
    std::istringstream lines(text);
    std::string line;
    while (std::getline(lines, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos) continue;

        std::size_t cols = 0;
        std::istringstream fields(line);
        std::string field;
        while (std::getline(fields, field, ',')) {
            const auto first = field.find_first_not_of(" \t");
            const auto last = field.find_last_not_of(" \t");
            if (first == std::string::npos) {
                throw Error(ErrorCode::UnsupportedFormat, "empty CSV field in " + path.string());
            }
            const std::string trimmed = field.substr(first, last - first + 1);
            char* end = nullptr;
            double v = std::strtod(trimmed.c_str(), &end);
            if (end != trimmed.c_str() + trimmed.size() || !std::isfinite(v)) {
                throw Error(ErrorCode::UnsupportedFormat, "non-numeric CSV field '" + trimmed + "'");
            }
            raw.samples.push_back(v);
            ++cols;
        }
        if (raw.width == 0) {
            raw.width = cols;
        } else if (cols != raw.width) {
            throw Error(ErrorCode::DimensionMismatch, "ragged CSV rows in " + path.string());
        }
        ++raw.height;
    }
    if (raw.width == 0 || raw.height == 0) {
        throw Error(ErrorCode::UnsupportedFormat, "empty CSV: " + path.string());
    }
    return raw;
}

std::string lower_extension(const fs::path& path) {
    std::string ext = path.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    return ext;
}

}  // namespace

DepthImage::DepthImage(std::size_t width, std::size_t height, std::vector<double> intensities,
                       std::string source_id)
    : width_(width), height_(height), intensities_(std::move(intensities)), source_id_(std::move(source_id)) {
    if (width_ == 0 || height_ == 0 || intensities_.size() != width_ * height_) {
        throw Error(ErrorCode::InvalidArgument, "intensity count does not match width x height");
    }
    if (!std::all_of(intensities_.begin(), intensities_.end(), in_unit_range)) {
        throw Error(ErrorCode::InvalidArgument, "intensity outside [0,1]");
    }
}

DepthImage DepthImage::with_source_id(std::string id) const {
    DepthImage copy = *this;
    copy.source_id_ = std::move(id);
    return copy;
}

PatchGrid::PatchGrid(std::size_t rows, std::size_t cols, std::size_t patch_px, std::vector<double> values,
                     std::string source_id)
    : rows_(rows), cols_(cols), patch_px_(patch_px), values_(std::move(values)), source_id_(std::move(source_id)) {
    if (rows_ == 0 || cols_ == 0 || values_.size() != rows_ * cols_) {
        throw Error(ErrorCode::InvalidArgument, "grid value count does not match rows x cols");
    }
    if (!std::all_of(values_.begin(), values_.end(), in_unit_range)) {
        throw Error(ErrorCode::InvalidArgument, "grid value outside [0,1]");
    }
}

PatchGrid PatchGrid::mirrored() const {
    std::vector<double> flipped(values_.size());
    for (std::size_t r = 0; r < rows_; ++r) {
        for (std::size_t c = 0; c < cols_; ++c) {
            flipped[r * cols_ + c] = values_[r * cols_ + (cols_ - 1 - c)];
        }
    }
    return PatchGrid(rows_, cols_, patch_px_, std::move(flipped), source_id_);
}

std::vector<double> normalize_intensities(std::span<const double> raw) {
    std::vector<double> out(raw.size());
    if (raw.empty()) return out;
    const auto [lo_it, hi_it] = std::minmax_element(raw.begin(), raw.end());
    const double lo = *lo_it;
    const double hi = *hi_it;
    if (hi == lo) {
        std::fill(out.begin(), out.end(), 0.5);
        return out;
    }
    const double range = hi - lo;
    for (std::size_t i = 0; i < raw.size(); ++i) {
        double v = (raw[i] - lo) / range;
        v = std::nearbyint(v * kLattice) / kLattice;
        out[i] = std::clamp(v, 0.0, 1.0);
    }
    return out;
}

DepthImage load_depth_image(const fs::path& path, const LoadOptions& options) {
    if (!fs::is_regular_file(path)) {
        throw Error(ErrorCode::UnreadableFile, "not a readable file: " + path.string());
    }
    const std::vector<char> bytes = read_bytes(path);
    static constexpr std::array<unsigned char, 8> kPngMagic{0x89, 'P', 'N', 'G', '\r', '\n', 0x1A, '\n'};
    const std::string ext = lower_extension(path);

    RawImage raw;
    if (bytes.size() >= kPngMagic.size() &&
        std::equal(kPngMagic.begin(), kPngMagic.end(), reinterpret_cast<const unsigned char*>(bytes.data()))) {
        raw = decode_png(bytes, path);
    } else if (bytes.size() >= 2 && bytes[0] == 'P' && (bytes[1] == '2' || bytes[1] == '5')) {
        raw = decode_pgm(bytes, path);
    } else if (ext == ".f32" || ext == ".raw" || ext == ".bin") {
        raw = decode_raw_f32(bytes, path);
    } else if (ext == ".csv") {
        raw = decode_csv(bytes, path);
    } else {
        throw Error(ErrorCode::UnsupportedFormat, path.string());
    }

    DepthImage img(raw.width, raw.height, normalize_intensities(raw.samples), path.string());
    return options.invert ? invert(img) : img;
}

DepthImage invert(const DepthImage& img) {
    std::vector<double> out(img.intensities().begin(), img.intensities().end());
    for (double& v : out) v = 1.0 - v;
    return DepthImage(img.width(), img.height(), std::move(out), img.source_id());
}

DepthImage normalize_square(const DepthImage& img, std::size_t side) {
    if (side == 0) {
        throw Error(ErrorCode::InvalidArgument, "side must be positive");
    }
    if (img.width() == side && img.height() == side) {
        return img;
    }

    const double sx = static_cast<double>(img.width()) / static_cast<double>(side);
    const double sy = static_cast<double>(img.height()) / static_cast<double>(side);
    const double max_x = static_cast<double>(img.width() - 1);
    const double max_y = static_cast<double>(img.height() - 1);

    std::vector<double> out(side * side);
    for (std::size_t y = 0; y < side; ++y) {
        const double fy = std::clamp((static_cast<double>(y) + 0.5) * sy - 0.5, 0.0, max_y);
        const auto y0 = static_cast<std::size_t>(fy);
        const std::size_t y1 = std::min(y0 + 1, img.height() - 1);
        const double wy = fy - static_cast<double>(y0);
        for (std::size_t x = 0; x < side; ++x) {
            const double fx = std::clamp((static_cast<double>(x) + 0.5) * sx - 0.5, 0.0, max_x);
            const auto x0 = static_cast<std::size_t>(fx);
            const std::size_t x1 = std::min(x0 + 1, img.width() - 1);
            const double wx = fx - static_cast<double>(x0);
            const double top = img.at(y0, x0) + wx * (img.at(y0, x1) - img.at(y0, x0));
            const double bottom = img.at(y1, x0) + wx * (img.at(y1, x1) - img.at(y1, x0));
            out[y * side + x] = std::clamp(top + wy * (bottom - top), 0.0, 1.0);
        }
    }
    return DepthImage(side, side, std::move(out), img.source_id());
}

namespace {

// Row/column boundaries are given as half-open pixel ranges per grid cell.
PatchGrid mean_pool(const DepthImage& img, const std::vector<std::size_t>& row_edges,
                    const std::vector<std::size_t>& col_edges, std::size_t patch_px) {
    const std::size_t rows = row_edges.size() - 1;
    const std::size_t cols = col_edges.size() - 1;
    if (rows < 2 || cols < 2) {
        throw Error(ErrorCode::PatchTooLarge, "grid " + std::to_string(rows) + "x" + std::to_string(cols) +
                                                  " admits no move; need at least 2x2");
    }
    // One row-major pass over the image. Each patch still sums its pixels
    // row by row, left to right.
    const auto px = img.intensities();
    const std::size_t width = img.width();
    std::vector<double> values(rows * cols, 0.0);
    for (std::size_t r = 0; r < rows; ++r) {
        double* acc = values.data() + r * cols;
        for (std::size_t y = row_edges[r]; y < row_edges[r + 1]; ++y) {
            const double* line = px.data() + y * width;
            for (std::size_t c = 0; c < cols; ++c) {
                double sum = acc[c];
                for (std::size_t x = col_edges[c]; x < col_edges[c + 1]; ++x) sum += line[x];
                acc[c] = sum;
            }
        }
        for (std::size_t c = 0; c < cols; ++c) {
            const auto count =
                static_cast<double>((row_edges[r + 1] - row_edges[r]) * (col_edges[c + 1] - col_edges[c]));
            acc[c] = std::clamp(acc[c] / count, 0.0, 1.0);
        }
    }
    return PatchGrid(rows, cols, patch_px, std::move(values), img.source_id());
}

std::vector<std::size_t> fixed_edges(std::size_t extent, std::size_t step) {
    std::vector<std::size_t> edges;
    for (std::size_t e = 0; e < extent; e += step) edges.push_back(e);
    edges.push_back(extent);
    return edges;
}

std::vector<std::size_t> even_edges(std::size_t extent, std::size_t parts) {
    std::vector<std::size_t> edges(parts + 1);
    for (std::size_t i = 0; i <= parts; ++i) edges[i] = i * extent / parts;
    return edges;
}

}  // namespace

PatchGrid patchify(const DepthImage& img, std::size_t patch_px) {
    if (patch_px == 0) {
        throw Error(ErrorCode::InvalidArgument, "patch_px must be at least 1");
    }
    if (patch_px > std::min(img.width(), img.height())) {
        throw Error(ErrorCode::PatchTooLarge, "patch of " + std::to_string(patch_px) + " px exceeds image side");
    }
    return mean_pool(img, fixed_edges(img.height(), patch_px), fixed_edges(img.width(), patch_px), patch_px);
}

PatchGrid patchify_grid(const DepthImage& img, std::size_t rows, std::size_t cols) {
    if (rows == 0 || cols == 0 || rows > img.height() || cols > img.width()) {
        throw Error(ErrorCode::InvalidArgument, "grid dimensions must lie in [1, image side]");
    }
    return mean_pool(img, even_edges(img.height(), rows), even_edges(img.width(), cols), 0);
}

void write_pgm16(const fs::path& path, std::size_t width, std::size_t height,
                 std::span<const std::uint16_t> pixels) {
    if (pixels.size() != width * height) {
        throw Error(ErrorCode::InvalidArgument, "pixel count does not match width x height");
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCode::UnreadableFile, "cannot write " + path.string());
    out << "P5\n" << width << ' ' << height << "\n65535\n";
    for (std::uint16_t p : pixels) {
        out.put(static_cast<char>(p >> 8));
        out.put(static_cast<char>(p & 0xFF));
    }
}

std::vector<std::uint8_t> encode_png8(const DepthImage& img) {
    std::vector<std::uint8_t> encoded;
    std::string png_message;
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, &png_message, on_png_error, on_png_warning);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        png_destroy_write_struct(&png, &info);
        throw Error(ErrorCode::UnreadableFile, "libpng initialization failed");
    }
    std::vector<png_byte> pixels(img.width() * img.height());
    for (std::size_t i = 0; i < pixels.size(); ++i) {
        pixels[i] = static_cast<png_byte>(std::lround(img.intensities()[i] * 255.0));
    }
    std::vector<png_bytep> rows(img.height());
    for (std::size_t y = 0; y < img.height(); ++y) rows[y] = pixels.data() + y * img.width();

    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw Error(ErrorCode::UnreadableFile, "PNG encoding failed: " + png_message);
    }
    png_set_write_fn(png, &encoded, png_write_to_vector, png_flush_noop);
    png_set_IHDR(png, info, static_cast<png_uint_32>(img.width()), static_cast<png_uint_32>(img.height()), 8,
                 PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    png_write_image(png, rows.data());
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
    return encoded;
}

void write_png8(const fs::path& path, const DepthImage& img) {
    const auto bytes = encode_png8(img);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCode::UnreadableFile, "cannot write " + path.string());
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

}  // namespace pathfinder
