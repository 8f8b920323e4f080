#include <doctest.h>

#include <cstdlib>
#include <optional>
#include <random>

#include "pathfinder/error.hpp"
#include "pathfinder/pathfinder.hpp"
#include "support/fixtures.hpp"

using namespace pathfinder;
using namespace pathfinder::testing;

namespace {

SearchParams params_at(int row, int col) {
    SearchParams p;
    p.start = Cell{row, col};
    return p;
}

NavPath straight_path(int start_row, int col, int steps) {
    NavPath p;
    for (int i = 0; i <= steps; ++i) p.cells.push_back({start_row - i, col});
    p.stop_reason = StopReason::TopReached;
    return p;
}

NavPath path_of(std::vector<Cell> cells) {
    NavPath p;
    p.cells = std::move(cells);
    p.stop_reason = StopReason::TopReached;
    return p;
}

}  // namespace

TEST_CASE("default start is the bottom middle, left of center on even widths") {
    CHECK(default_start(uniform_grid(8, 8, 0.5)) == Cell{7, 3});
    CHECK(default_start(uniform_grid(5, 7, 0.5)) == Cell{4, 3});
    CHECK(default_start(uniform_grid(2, 2, 0.5)) == Cell{1, 0});
}

TEST_CASE("stop_check") {
    const SearchParams params;  // 0.2 / 0.2 / margin 2

    SUBCASE("uniform interior cell continues") {
        CHECK_FALSE(stop_check(uniform_grid(6, 6, 0.5), {4, 2}, params).has_value());
    }
    SUBCASE("rows above the margin stop as TopReached") {
        std::mt19937 rng(5);
        for (int i = 0; i < 10; ++i) {
            auto c = random_case(rng, 8);
            CHECK(stop_check(c.grid, {1, 0}, params) == StopReason::TopReached);
        }
    }
    SUBCASE("dark lookahead wins over the discontinuity by check order") {
        // Cell 0.9 under six cells of 0.1: avg 0.1 < 0.2 (dark) and
        // 0.9 - 0.1 = 0.8 > 0.2 (discontinuity); dark is checked first.
        std::vector<double> v(5 * 3, 0.1);
        v[4 * 3 + 1] = 0.9;
        v[3 * 3 + 1] = 0.1;
        const PatchGrid g = grid_from(5, 3, v);
        CHECK(stop_check(g, {4, 1}, params) == StopReason::DarkHorizon);
    }
    SUBCASE("discontinuity") {
        // Lookahead average 0.3 (not dark) and a drop of 0.6.
        std::vector<double> v(5 * 3, 0.3);
        v[4 * 3 + 1] = 0.9;
        CHECK(stop_check(grid_from(5, 3, v), {4, 1}, params) == StopReason::Discontinuity);
    }
    SUBCASE("dead end when every upward neighbour is brighter") {
        std::vector<double> v(4 * 3, 0.6);
        v[3 * 3 + 1] = 0.5;
        CHECK(stop_check(grid_from(4, 3, v), {3, 1}, params) == StopReason::DeadEnd);
    }
    SUBCASE("lateral borders average only in-bounds cells") {
        // Left edge: lookahead is {up, up-up, up-right, up-up-right} with
        // mean (0.375 + 0.375 + 0.125 + 0.125) / 4 = 0.25, not below 0.25.
        SearchParams p = params;
        p.dark_threshold = 0.25;
        std::vector<double> v{0.375, 0.125, 0.5, 0.375, 0.125, 0.5, 0.35, 0.5, 0.5};
        CHECK_FALSE(stop_check(grid_from(3, 3, v), {2, 0}, p).has_value());
        v[1] = 0.0625;
        CHECK(stop_check(grid_from(3, 3, v), {2, 0}, p) == StopReason::DarkHorizon);
    }
}

TEST_CASE("enumerate_paths") {
    SUBCASE("3x3 uniform: one path per move") {
        const auto paths = enumerate_paths(uniform_grid(3, 3, 0.5), params_at(2, 1));
        REQUIRE(paths.size() == 3);
        const Cell ends[] = {{1, 1}, {1, 0}, {1, 2}};  // up, up-left, up-right
        for (std::size_t i = 0; i < 3; ++i) {
            CHECK(paths[i].length_steps() == 1);
            CHECK(paths[i].end() == ends[i]);
            CHECK(paths[i].stop_reason == StopReason::TopReached);
        }
    }
    SUBCASE("start with only brighter neighbours yields a single DeadEnd path") {
        std::vector<double> v(3 * 3, 0.8);
        v[2 * 3 + 0] = 0.4;
        const auto paths = enumerate_paths(grid_from(3, 3, v), params_at(2, 0));
        REQUIRE(paths.size() == 1);
        CHECK(paths[0].length_steps() == 0);
        CHECK(paths[0].stop_reason == StopReason::DeadEnd);
    }
    SUBCASE("2x2 grid stops immediately at the top margin") {
        const auto paths = enumerate_paths(uniform_grid(2, 2, 0.5), params_at(1, 0));
        REQUIRE(paths.size() == 1);
        CHECK(paths[0].stop_reason == StopReason::TopReached);
    }
    SUBCASE("bound") {
        try {
            enumerate_paths(uniform_grid(17, 17, 0.5), SearchParams{});
            FAIL("expected GridTooLarge");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::GridTooLarge);
        }
        CHECK_NOTHROW(enumerate_paths(uniform_grid(16, 16, 0.1), SearchParams{}));
    }
}

TEST_CASE("select_best") {
    const Cell start{7, 4};
    SUBCASE("longest wins") {
        const auto best = select_best({straight_path(7, 4, 3), straight_path(7, 4, 5)}, start);
        CHECK(best.length_steps() == 5);
    }
    SUBCASE("equal length and deviation: smaller column wins") {
        const NavPath right = path_of({{7, 4}, {6, 5}, {5, 6}, {4, 6}, {3, 6}});
        const NavPath left = path_of({{7, 4}, {6, 3}, {5, 2}, {4, 2}, {3, 2}});
        CHECK(select_best({right, left}, start).end() == Cell{3, 2});
    }
    SUBCASE("straighter endpoint beats a wider one") {
        const NavPath wide = path_of({{7, 4}, {6, 3}, {5, 2}});
        const NavPath narrow = path_of({{7, 4}, {6, 5}, {5, 5}});
        CHECK(select_best({wide, narrow}, start).end() == Cell{5, 5});
    }
    SUBCASE("same endpoint: move order up < up-left < up-right") {
        const NavPath a = path_of({{7, 4}, {6, 3}, {5, 4}});  // up-left, up-right
        const NavPath b = path_of({{7, 4}, {6, 4}, {5, 4}});  // up, up
        const NavPath c = path_of({{7, 4}, {6, 5}, {5, 4}});  // up-right, up-left
        CHECK(select_best({c, a, b}, start) == b);
        CHECK(select_best({c, a}, start) == a);
    }
    SUBCASE("empty set") {
        try {
            select_best({}, start);
            FAIL("expected EmptyPathSet");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::EmptyPathSet);
        }
    }
}

TEST_CASE("dp_search examples") {
    SUBCASE("uniform 8x8 climbs straight to the margin") {
        const NavPath p = dp_search(uniform_grid(8, 8, 0.5), params_at(7, 4));
        CHECK(p.end() == Cell{1, 4});
        CHECK(p.length_steps() == 6);
        CHECK(p.stop_reason == StopReason::TopReached);
        for (const Cell& c : p.cells) CHECK(c.col == 4);
    }
    SUBCASE("obstacle on the left: agrees with enumeration and ends on the right") {
        const PatchGrid g = obstacle_left_grid();
        const SearchParams params = params_at(7, 4);
        const NavPath dp = dp_search(g, params);
        const NavPath oracle = select_best(enumerate_paths(g, params), Cell{7, 4});
        CHECK(dp == oracle);
        CHECK(dp.end() == Cell{1, 5});
        CHECK(dp.end().col >= 4);
    }
    SUBCASE("no free move from start") {
        std::vector<double> v(4 * 5, 0.9);
        v[3 * 5 + 2] = 0.3;
        try {
            dp_search(grid_from(4, 5, v), SearchParams{});
            FAIL("expected NoFreePath");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::NoFreePath);
        }
    }
    SUBCASE("invalid parameters") {
        SearchParams bad;
        bad.top_margin_rows = 1;
        CHECK_THROWS_AS(dp_search(uniform_grid(4, 4, 0.5), bad), Error);
        CHECK_THROWS_AS(dp_search(uniform_grid(4, 4, 0.5), params_at(4, 0)), Error);
    }
}

TEST_CASE("dp_search matches exhaustive enumeration on random grids") {
    std::mt19937 rng(20240601);
    for (int trial = 0; trial < 300; ++trial) {
        const RandomCase c = random_case(rng, 9);
        const Cell start = resolve_start(c.grid, c.params);
        const auto paths = enumerate_paths(c.grid, c.params);
        for (const NavPath& p : paths) REQUIRE(path_is_valid(c.grid, p, c.params));

        const NavPath oracle = select_best(paths, start);
        if (oracle.length_steps() == 0 && oracle.stop_reason == StopReason::DeadEnd) {
            CHECK_THROWS_AS(dp_search(c.grid, c.params), Error);
            continue;
        }
        const NavPath dp = dp_search(c.grid, c.params);
        CHECK(dp == oracle);
        CHECK(path_is_valid(c.grid, dp, c.params));
    }
}

TEST_CASE("mirroring the grid mirrors the chosen deviation") {
    std::mt19937 rng(99);
    int compared = 0;
    for (int trial = 0; trial < 300; ++trial) {
        RandomCase c = random_case(rng, 12);
        const Cell start = resolve_start(c.grid, c.params);
        SearchParams mirrored_params = c.params;
        mirrored_params.start = Cell{start.row, static_cast<int>(c.grid.cols()) - 1 - start.col};
        try {
            const NavPath a = dp_search(c.grid, c.params);
            const NavPath b = dp_search(c.grid.mirrored(), mirrored_params);
            CHECK(a.end().row == b.end().row);
            CHECK(std::abs(a.end().col - start.col) == std::abs(b.end().col - mirrored_params.start->col));
            ++compared;
        } catch (const Error& e) {
            REQUIRE(e.code() == ErrorCode::NoFreePath);
            CHECK_THROWS_AS(dp_search(c.grid.mirrored(), mirrored_params), Error);
        }
    }
    CHECK(compared > 100);
}

TEST_CASE("dp_search is deterministic") {
    std::mt19937 rng(4);
    for (int trial = 0; trial < 20; ++trial) {
        RandomCase c = random_case(rng, 40);
        c.params.start.reset();
        std::optional<NavPath> a;
        try {
            a = dp_search(c.grid, c.params);
        } catch (const Error&) {
            CHECK_THROWS_AS(dp_search(c.grid, c.params), Error);
            continue;
        }
        CHECK(dp_search(c.grid, c.params) == *a);
    }
}
