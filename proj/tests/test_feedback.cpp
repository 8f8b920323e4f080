#include <doctest.h>

#include <nlohmann/json.hpp>
#include <set>

#include "pathfinder/feedback.hpp"

using namespace pathfinder;

TEST_CASE("voice prompts") {
    const auto forward = voice_for(estimate_from_deviation(0));
    CHECK(forward.voice_short == "move forward");
    CHECK(forward.voice_clock == "12 o'clock");

    const auto right = voice_for(estimate_from_deviation(60));
    CHECK(right.voice_short == "move right");
    CHECK(right.voice_clock == "2 o'clock");

    const auto left = voice_for(estimate_from_deviation(-45));
    CHECK(left.voice_short == "move left");
    CHECK(left.voice_clock == "10 thirty");
}

TEST_CASE("haptic patterns by pulse length") {
    std::set<std::vector<int>> distinct;
    for (ClockDirection c : ClockDirection::all()) {
        const HapticPattern p = haptic_for(c);
        distinct.insert(p.timings_ms);
        REQUIRE(p.timings_ms.size() % 2 == 0);
        CHECK(p.timings_ms.front() == 0);
        const int expected_on = c.signed_degrees() >= 0 ? 200 : 600;
        for (std::size_t i = 1; i < p.timings_ms.size(); i += 2) CHECK(p.timings_ms[i] == expected_on);
        for (std::size_t i = 2; i < p.timings_ms.size(); i += 2) CHECK(p.timings_ms[i] == 100);
    }
    CHECK(distinct.size() == 7);
}

TEST_CASE("bundle") {
    const FeedbackBundle noon = bundle(estimate_from_deviation(0));
    CHECK(noon.haptic.timings_ms == std::vector<int>{0, 200});
    CHECK(noon.visual.arrow_deg == 0.0);
    CHECK(noon.visual.clock_label == "12:00");

    const FeedbackBundle three = bundle(estimate_from_deviation(90));
    CHECK(three.haptic.type_name == "Quad Short Pulse");
    CHECK(three.visual.arrow_deg == 90.0);

    const FeedbackBundle half_nine = bundle(estimate_from_deviation(-75));
    CHECK(half_nine.haptic.type_name == "Triple Long Pulse");
    CHECK(half_nine.visual.arrow_deg == -75.0);
    CHECK(half_nine.visual.clock_label == "9:30");

    const auto j = to_json(three);
    CHECK(j.at("voice_short") == "move right");
    CHECK(j.at("voice_clock") == "3 o'clock");
    CHECK(j.at("haptic").at("timings_ms") == nlohmann::json({0, 200, 100, 200, 100, 200, 100, 200}));
    CHECK(j.at("haptic").at("type") == "Quad Short Pulse");
    CHECK(j.at("visual").at("arrow_deg") == 90.0);
    CHECK(j.at("visual").at("clock_label") == "3:00");
}
