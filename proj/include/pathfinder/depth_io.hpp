#pragma once

// Depth image loading and patch aggregation.
//
// Intensity convention: 1.0 is the nearest surface, 0.0 the farthest. Sources
// that encode near as dark are loaded with `LoadOptions::invert`.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace pathfinder {

class DepthImage {
public:
    DepthImage() = default;
    // Throws Error(InvalidArgument) if the size does not match or a value is
    // outside [0,1].
    DepthImage(std::size_t width, std::size_t height, std::vector<double> intensities,
               std::string source_id = {});

    std::size_t width() const noexcept { return width_; }
    std::size_t height() const noexcept { return height_; }
    std::span<const double> intensities() const noexcept { return intensities_; }
    const std::string& source_id() const noexcept { return source_id_; }

    double at(std::size_t row, std::size_t col) const { return intensities_[row * width_ + col]; }

    DepthImage with_source_id(std::string id) const;

private:
    std::size_t width_ = 0;
    std::size_t height_ = 0;
    std::vector<double> intensities_;
    std::string source_id_;
};

class PatchGrid {
public:
    PatchGrid() = default;
    PatchGrid(std::size_t rows, std::size_t cols, std::size_t patch_px, std::vector<double> values,
              std::string source_id = {});

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    // Side length of a patch in pixels; 0 when the grid was built from
    // explicit grid dimensions instead of a patch size.
    std::size_t patch_px() const noexcept { return patch_px_; }
    std::span<const double> values() const noexcept { return values_; }
    const std::string& source_id() const noexcept { return source_id_; }

    double at(std::size_t row, std::size_t col) const { return values_[row * cols_ + col]; }

    PatchGrid mirrored() const;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::size_t patch_px_ = 0;
    std::vector<double> values_;
    std::string source_id_;
};

struct LoadOptions {
    bool invert = false;
};

// Min-max normalization of raw samples. Constant input maps to 0.5. Results
// are snapped to multiples of 2^-52 so that `invert` is an exact involution.
std::vector<double> normalize_intensities(std::span<const double> raw);

// Supported: 8/16-bit grayscale PNG, PGM (P2/P5), raw little-endian f32 with a
// JSON sidecar ({"width", "height", "dtype": "f32le"}), CSV of reals.
DepthImage load_depth_image(const std::filesystem::path& path, const LoadOptions& options = {});

DepthImage invert(const DepthImage& img);

// Bilinear resample to side x side using pixel-center alignment.
DepthImage normalize_square(const DepthImage& img, std::size_t side);

// Mean intensity over square patches of patch_px pixels. Edge patches average
// only the pixels that exist.
PatchGrid patchify(const DepthImage& img, std::size_t patch_px);

// Mean intensity over an explicit rows x cols partition of the image.
PatchGrid patchify_grid(const DepthImage& img, std::size_t rows, std::size_t cols);

// Writers used by tests, fixtures and the annotation service.
void write_pgm16(const std::filesystem::path& path, std::size_t width, std::size_t height,
                 std::span<const std::uint16_t> pixels);
std::vector<std::uint8_t> encode_png8(const DepthImage& img);
void write_png8(const std::filesystem::path& path, const DepthImage& img);

}  // namespace pathfinder
