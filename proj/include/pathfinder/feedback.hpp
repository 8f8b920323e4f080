#pragma once

// Voice, haptic and visual encodings of a direction estimate.

#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "pathfinder/schemes.hpp"

namespace pathfinder {

// Alternating off/on durations in milliseconds, starting with an off interval.
struct HapticPattern {
    std::vector<int> timings_ms;
    std::string type_name;

    friend bool operator==(const HapticPattern&, const HapticPattern&) = default;
};

struct VisualCue {
    double arrow_deg = 0.0;
    std::string clock_label;
};

struct FeedbackBundle {
    std::string voice_short;
    std::string voice_clock;
    HapticPattern haptic;
    VisualCue visual;
};

struct VoicePrompts {
    std::string voice_short;
    std::string voice_clock;
};

// Short pulses (200 ms) for 12:00 .. 3:00, long pulses (600 ms) for
// 9:00 .. 11:30; pulse count grows with distance from straight ahead and
// each half-hour shares the pattern of its whole hour.
HapticPattern haptic_for(ClockDirection c);

// ("move right", "2 o'clock"), ("move left", "10 thirty").
VoicePrompts voice_for(const DirectionEstimate& d);

FeedbackBundle bundle(const DirectionEstimate& d);

nlohmann::json to_json(const FeedbackBundle& b);

}  // namespace pathfinder
