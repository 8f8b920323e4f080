#pragma once

// Synthetic scenes and scratch directories shared by the test binaries.

#include <atomic>
#include <cstdlib>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "pathfinder/depth_io.hpp"
#include "pathfinder/pathfinder.hpp"

namespace pathfinder::testing {

class TempDir {
public:
    explicit TempDir(const std::string& tag = "pf") {
        static std::atomic<int> counter{0};
        std::random_device rd;
        path_ = std::filesystem::temp_directory_path() /
                (tag + "-" + std::to_string(rd()) + "-" + std::to_string(counter++));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

inline PatchGrid uniform_grid(std::size_t rows, std::size_t cols, double v) {
    return PatchGrid(rows, cols, 1, std::vector<double>(rows * cols, v));
}

inline PatchGrid grid_from(std::size_t rows, std::size_t cols, std::vector<double> values) {
    return PatchGrid(rows, cols, 1, std::move(values));
}

// 8x8 floor of 0.5 with a bright block (1.0) over columns 0-4 of rows 0-5.
inline PatchGrid obstacle_left_grid() {
    std::vector<double> v(64, 0.5);
    for (std::size_t r = 0; r <= 5; ++r) {
        for (std::size_t c = 0; c <= 4; ++c) v[r * 8 + c] = 1.0;
    }
    return grid_from(8, 8, std::move(v));
}

// 16-bit scenes on a side x side frame.

// Constant scene: normalizes to 0.5 everywhere.
inline std::vector<std::uint16_t> uniform_scene(std::size_t side) {
    return std::vector<std::uint16_t>(side * side, 30000);
}

// Floor at mid intensity with a near (bright) obstacle over the left 5/8 of
// the upper 3/4 of the frame; mirrors obstacle_left_grid() at 60 px patches.
inline std::vector<std::uint16_t> obstacle_left_scene(std::size_t side) {
    std::vector<std::uint16_t> px(side * side, 32768);
    for (std::size_t y = 0; y < side * 6 / 8; ++y) {
        for (std::size_t x = 0; x < side * 5 / 8; ++x) px[y * side + x] = 65535;
    }
    px[side * side - 1] = 0;  // pins the normalization range to [0, 65535]
    return px;
}

// Intensity rises strictly toward the top of the frame, so every upward move
// from the start climbs onto a nearer surface. The single black pixel in the
// top-left corner pins the normalization range.
inline std::vector<std::uint16_t> blocked_scene(std::size_t side) {
    std::vector<std::uint16_t> px(side * side);
    for (std::size_t y = 0; y < side; ++y) {
        const auto v = static_cast<std::uint16_t>(20000 + 45535 * (side - 1 - y) / (side - 1));
        for (std::size_t x = 0; x < side; ++x) px[y * side + x] = v;
    }
    px[0] = 0;
    return px;
}

struct RandomCase {
    PatchGrid grid;
    SearchParams params;
};

// Grids up to max_side x max_side, in three equal shares: independent
// uniform values, a coarse set of levels (equal neighbours and ties), and a
// smooth field that recedes toward the top with small quantized noise, which
// yields long paths.
inline RandomCase random_case(std::mt19937& rng, std::size_t max_side = 12) {
    std::uniform_int_distribution<std::size_t> side(2, max_side);
    const std::size_t rows = side(rng);
    const std::size_t cols = side(rng);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_int_distribution<int> level(0, 4);
    std::uniform_int_distribution<int> jitter(-2, 2);
    const int mode = std::uniform_int_distribution<int>(0, 2)(rng);
    std::vector<double> values(rows * cols);
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < cols; ++c) {
            double v = 0.0;
            if (mode == 0) {
                v = unit(rng);
            } else if (mode == 1) {
                v = level(rng) / 4.0;
            } else {
                v = 0.55 + 0.3 * static_cast<double>(r) / static_cast<double>(rows) + 0.02 * jitter(rng);
            }
            values[r * cols + c] = v;
        }
    }

    std::uniform_real_distribution<double> threshold(0.05, 0.5);
    SearchParams params;
    params.dark_threshold = threshold(rng);
    params.diff_threshold = threshold(rng);
    if (unit(rng) < 0.3) {
        std::uniform_int_distribution<int> r(0, static_cast<int>(rows) - 1);
        std::uniform_int_distribution<int> c(0, static_cast<int>(cols) - 1);
        params.start = Cell{r(rng), c(rng)};
    }
    return RandomCase{PatchGrid(rows, cols, 1, std::move(values)), params};
}

// Type invariants of a returned path.
inline bool path_is_valid(const PatchGrid& grid, const NavPath& path, const SearchParams& params) {
    if (path.cells.empty()) return false;
    for (std::size_t i = 1; i < path.cells.size(); ++i) {
        const Cell a = path.cells[i - 1];
        const Cell b = path.cells[i];
        if (b.row != a.row - 1 || std::abs(b.col - a.col) > 1) return false;
        if (grid.at(b.row, b.col) > grid.at(a.row, a.col)) return false;
        if (stop_check(grid, a, params).has_value()) return false;
    }
    const auto last = stop_check(grid, path.end(), params);
    if (!last || *last != path.stop_reason) return false;
    return path.length_steps() == static_cast<std::size_t>(path.start().row - path.end().row);
}

}  // namespace pathfinder::testing
