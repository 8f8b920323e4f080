#pragma once

// Upward monotone path search over a patch grid.
//
// A path starts near the bottom-middle of the grid and climbs one row per
// move (up, up-left or up-right), never stepping onto a brighter (nearer)
// cell. It ends at the first cell where the stop test fires. The winner is
// the longest path, then the straightest, with a total tie-break order.
//
// Two implementations are provided: `enumerate_paths` follows the recursive
// formulation literally and is exponential, and `dp_search` computes the same
// winner in O(rows * cols) with forward reachability over the move DAG.

#include <compare>
#include <cstddef>
#include <optional>
#include <string_view>
#include <vector>

#include "pathfinder/depth_io.hpp"

namespace pathfinder {

struct Cell {
    int row = 0;
    int col = 0;

    friend auto operator<=>(const Cell&, const Cell&) = default;
};

// Listed in exploration order; this is also the tie-break order.
enum class Move { Up, UpLeft, UpRight };

inline constexpr Move kMoveOrder[] = {Move::Up, Move::UpLeft, Move::UpRight};

constexpr int col_offset(Move m) {
    switch (m) {
        case Move::Up: return 0;
        case Move::UpLeft: return -1;
        case Move::UpRight: return 1;
    }
    return 0;
}

enum class StopReason { DarkHorizon, Discontinuity, TopReached, DeadEnd };

std::string_view to_string(StopReason reason);

struct SearchParams {
    double dark_threshold = 0.20;
    double diff_threshold = 0.20;
    int top_margin_rows = 2;
    // Unset means the bottom-middle cell, see default_start().
    std::optional<Cell> start;
};

// (rows-1, floor((cols-1)/2)): even widths take the left-of-center column.
Cell default_start(const PatchGrid& grid);

// Throws Error(InvalidArgument) if thresholds or margin are out of range or
// the start cell is outside the grid.
Cell resolve_start(const PatchGrid& grid, const SearchParams& params);

struct NavPath {
    std::vector<Cell> cells;
    StopReason stop_reason = StopReason::DeadEnd;

    std::size_t length_steps() const { return cells.empty() ? 0 : cells.size() - 1; }
    const Cell& start() const { return cells.front(); }
    const Cell& end() const { return cells.back(); }

    friend bool operator==(const NavPath&, const NavPath&) = default;
};

// std::nullopt means Continue.
std::optional<StopReason> stop_check(const PatchGrid& grid, Cell cell, const SearchParams& params);

struct EnumerationLimits {
    std::size_t max_cells = 16 * 16;
};

std::vector<NavPath> enumerate_paths(const PatchGrid& grid, const SearchParams& params,
                                     const EnumerationLimits& limits = {});

NavPath select_best(const std::vector<NavPath>& paths, Cell start);

NavPath dp_search(const PatchGrid& grid, const SearchParams& params);

}  // namespace pathfinder
