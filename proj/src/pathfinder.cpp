#include "pathfinder/pathfinder.hpp"

#include <algorithm>
#include <cstdlib>
#include <string>
#include <tuple>

#include "pathfinder/error.hpp"

namespace pathfinder {

namespace {

bool in_bounds(const PatchGrid& grid, int row, int col) {
    return row >= 0 && col >= 0 && row < static_cast<int>(grid.rows()) && col < static_cast<int>(grid.cols());
}

double value(const PatchGrid& grid, Cell c) {
    return grid.at(static_cast<std::size_t>(c.row), static_cast<std::size_t>(c.col));
}

std::optional<Cell> step(const PatchGrid& grid, Cell from, Move m) {
    Cell to{from.row - 1, from.col + col_offset(m)};
    if (!in_bounds(grid, to.row, to.col)) return std::nullopt;
    return to;
}

// A move is allowed when the target is in-bounds and no brighter than the source.
std::optional<Cell> valid_step(const PatchGrid& grid, Cell from, Move m) {
    auto to = step(grid, from, m);
    if (to && value(grid, *to) <= value(grid, from)) return to;
    return std::nullopt;
}

Move move_between(Cell from, Cell to) {
    switch (to.col - from.col) {
        case -1: return Move::UpLeft;
        case 1: return Move::UpRight;
        default: return Move::Up;
    }
}

// Ranking key of a path endpoint; smaller is better.
std::tuple<int, int, int> endpoint_key(Cell end, Cell start) {
    return {end.row, std::abs(end.col - start.col), end.col};
}

std::vector<int> move_ranks(const NavPath& path) {
    std::vector<int> ranks;
    ranks.reserve(path.length_steps());
    for (std::size_t i = 1; i < path.cells.size(); ++i) {
        ranks.push_back(static_cast<int>(move_between(path.cells[i - 1], path.cells[i])));
    }
    return ranks;
}

void check_params(const SearchParams& params) {
    if (params.dark_threshold < 0.0 || params.dark_threshold > 1.0 || params.diff_threshold < 0.0 ||
        params.diff_threshold > 1.0) {
        throw Error(ErrorCode::InvalidArgument, "thresholds must lie in [0,1]");
    }
    if (params.top_margin_rows < 2) {
        throw Error(ErrorCode::InvalidArgument, "top_margin_rows must be at least 2");
    }
}

class Enumerator {
public:
    Enumerator(const PatchGrid& grid, const SearchParams& params) : grid_(grid), params_(params) {}

    std::vector<NavPath> run(Cell start) {
        explore(start);
        return std::move(results_);
    }

private:
    void explore(Cell cell) {
        current_.push_back(cell);
        if (auto stop = stop_check(grid_, cell, params_)) {
            results_.push_back(NavPath{current_, *stop});
        } else {
            for (Move m : kMoveOrder) {
                if (auto next = valid_step(grid_, cell, m)) explore(*next);
            }
        }
        current_.pop_back();
    }

    const PatchGrid& grid_;
    const SearchParams& params_;
    std::vector<Cell> current_;
    std::vector<NavPath> results_;
};

}  // namespace

std::string_view to_string(StopReason reason) {
    switch (reason) {
        case StopReason::DarkHorizon: return "DarkHorizon";
        case StopReason::Discontinuity: return "Discontinuity";
        case StopReason::TopReached: return "TopReached";
        case StopReason::DeadEnd: return "DeadEnd";
    }
    return "Unknown";
}

Cell default_start(const PatchGrid& grid) {
    return Cell{static_cast<int>(grid.rows()) - 1, (static_cast<int>(grid.cols()) - 1) / 2};
}

Cell resolve_start(const PatchGrid& grid, const SearchParams& params) {
    check_params(params);
    Cell start = params.start.value_or(default_start(grid));
    if (!in_bounds(grid, start.row, start.col)) {
        throw Error(ErrorCode::InvalidArgument, "start cell outside grid");
    }
    return start;
}

std::optional<StopReason> stop_check(const PatchGrid& grid, Cell cell, const SearchParams& params) {
    if (cell.row < params.top_margin_rows) {
        return StopReason::TopReached;
    }

    // Six-cell lookahead: up-left, up-up-left, up, up-up, up-right, up-up-right.
    double sum = 0.0;
    int count = 0;
    for (int dc : {-1, 0, 1}) {
        for (int dr : {1, 2}) {
            if (in_bounds(grid, cell.row - dr, cell.col + dc)) {
                sum += grid.at(static_cast<std::size_t>(cell.row - dr), static_cast<std::size_t>(cell.col + dc));
                ++count;
            }
        }
    }
    const double avg = sum / count;
    if (avg < params.dark_threshold) {
        return StopReason::DarkHorizon;
    }
    if (value(grid, cell) - avg > params.diff_threshold) {
        return StopReason::Discontinuity;
    }
    for (Move m : kMoveOrder) {
        if (valid_step(grid, cell, m)) return std::nullopt;
    }
    return StopReason::DeadEnd;
}

std::vector<NavPath> enumerate_paths(const PatchGrid& grid, const SearchParams& params,
                                     const EnumerationLimits& limits) {
    if (grid.rows() * grid.cols() > limits.max_cells) {
        throw Error(ErrorCode::GridTooLarge, std::to_string(grid.rows()) + "x" + std::to_string(grid.cols()) +
                                                 " exceeds the enumeration bound; use dp_search");
    }
    const Cell start = resolve_start(grid, params);
    return Enumerator(grid, params).run(start);
}

NavPath select_best(const std::vector<NavPath>& paths, Cell start) {
    if (paths.empty()) {
        throw Error(ErrorCode::EmptyPathSet, "no candidate paths");
    }
    auto better = [&](const NavPath& a, const NavPath& b) {
        if (a.length_steps() != b.length_steps()) return a.length_steps() > b.length_steps();
        const auto ka = endpoint_key(a.end(), start);
        const auto kb = endpoint_key(b.end(), start);
        if (std::get<1>(ka) != std::get<1>(kb)) return std::get<1>(ka) < std::get<1>(kb);
        if (std::get<2>(ka) != std::get<2>(kb)) return std::get<2>(ka) < std::get<2>(kb);
        return move_ranks(a) < move_ranks(b);
    };
    return *std::min_element(paths.begin(), paths.end(), better);
}

NavPath dp_search(const PatchGrid& grid, const SearchParams& params) {
    const Cell start = resolve_start(grid, params);
    const int cols = static_cast<int>(grid.cols());
    auto idx = [cols](Cell c) { return static_cast<std::size_t>(c.row * cols + c.col); };

    // Forward reachability. Rows are processed bottom-up because every move
    // rises exactly one row.
    std::vector<char> reachable(grid.values().size(), 0);
    std::vector<std::optional<StopReason>> stop(grid.values().size());
    reachable[idx(start)] = 1;

    std::optional<Cell> best;
    for (int r = start.row; r >= 0; --r) {
        for (int c = 0; c < cols; ++c) {
            const Cell cell{r, c};
            if (!reachable[idx(cell)]) continue;
            stop[idx(cell)] = stop_check(grid, cell, params);
            if (stop[idx(cell)]) {
                if (!best || endpoint_key(cell, start) < endpoint_key(*best, start)) best = cell;
                continue;
            }
            for (Move m : kMoveOrder) {
                if (auto next = valid_step(grid, cell, m)) reachable[idx(*next)] = 1;
            }
        }
    }

    // stop_check never returns Continue without a valid move, so some
    // terminal cell is always reachable.
    const Cell target = *best;
    if (target == start && stop[idx(start)] == StopReason::DeadEnd) {
        throw Error(ErrorCode::NoFreePath, "no upward move from start cell");
    }

    // Backward pass: which reachable cells can still reach the target.
    std::vector<char> leads(grid.values().size(), 0);
    leads[idx(target)] = 1;
    for (int r = target.row + 1; r <= start.row; ++r) {
        for (int c = 0; c < cols; ++c) {
            const Cell cell{r, c};
            if (!reachable[idx(cell)] || stop[idx(cell)]) continue;
            for (Move m : kMoveOrder) {
                auto next = valid_step(grid, cell, m);
                if (next && leads[idx(*next)]) {
                    leads[idx(cell)] = 1;
                    break;
                }
            }
        }
    }

    // Forward greedy walk in move order gives the lexicographically least
    // move sequence among all paths to the target.
    NavPath path;
    path.cells.reserve(static_cast<std::size_t>(start.row - target.row + 1));
    Cell cell = start;
    path.cells.push_back(cell);
    while (cell != target) {
        for (Move m : kMoveOrder) {
            auto next = valid_step(grid, cell, m);
            if (next && leads[idx(*next)]) {
                cell = *next;
                break;
            }
        }
        path.cells.push_back(cell);
    }
    path.stop_reason = *stop[idx(target)];
    return path;
}

}  // namespace pathfinder
