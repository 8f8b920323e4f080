#include "pathfinder/feedback.hpp"

#include <nlohmann/json.hpp>

namespace pathfinder {

namespace {

constexpr int kShortPulseMs = 200;
constexpr int kLongPulseMs = 600;
constexpr int kGapMs = 100;

HapticPattern pulses(int count, bool long_pulse) {
    static constexpr const char* kCountNames[] = {"", "Single", "Double", "Triple", "Quad"};
    HapticPattern p;
    p.timings_ms.push_back(0);
    for (int i = 0; i < count; ++i) {
        if (i > 0) p.timings_ms.push_back(kGapMs);
        p.timings_ms.push_back(long_pulse ? kLongPulseMs : kShortPulseMs);
    }
    p.type_name = std::string(kCountNames[count]) + (long_pulse ? " Long Pulse" : " Short Pulse");
    return p;
}

}  // namespace

HapticPattern haptic_for(ClockDirection c) {
    const int from_noon = c.index() - 6;
    if (from_noon >= 0) {
        return pulses(from_noon / 2 + 1, false);
    }
    return pulses((1 - from_noon) / 2, true);
}

VoicePrompts voice_for(const DirectionEstimate& d) {
    VoicePrompts v;
    v.voice_short = "move " + std::string(to_string(d.dof3));
    v.voice_clock = std::to_string(d.clock.hour()) + (d.clock.is_half_hour() ? " thirty" : " o'clock");
    return v;
}

FeedbackBundle bundle(const DirectionEstimate& d) {
    auto voice = voice_for(d);
    return FeedbackBundle{std::move(voice.voice_short), std::move(voice.voice_clock), haptic_for(d.clock),
                          VisualCue{d.deviation_deg, d.clock.label()}};
}

nlohmann::json to_json(const FeedbackBundle& b) {
    return nlohmann::json{
        {"voice_short", b.voice_short},
        {"voice_clock", b.voice_clock},
        {"haptic", {{"timings_ms", b.haptic.timings_ms}, {"type", b.haptic.type_name}}},
        {"visual", {{"arrow_deg", b.visual.arrow_deg}, {"clock_label", b.visual.clock_label}}},
    };
}

}  // namespace pathfinder
