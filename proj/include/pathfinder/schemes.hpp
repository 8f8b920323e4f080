#pragma once

// Direction quantization: deviation angle -> left/forward/right, clock face
// (9:00 .. 3:00 in half-hour steps) and whole degrees.

#include <array>
#include <optional>
#include <string>
#include <string_view>

#include "pathfinder/pathfinder.hpp"

namespace pathfinder {

// One of the 13 frontal clock positions, stored as a step index where 0 is
// 9:00 (-90 deg), 6 is 12:00 and 12 is 3:00 (+90 deg).
class ClockDirection {
public:
    static constexpr int kCount = 13;

    constexpr ClockDirection() = default;

    // Throws Error(InvalidClock) for an index outside [0, 12].
    static ClockDirection from_index(int index);
    // Accepts the canonical "H:MM" form, e.g. "9:30", "12:00", "3:00".
    static ClockDirection parse(std::string_view text);
    static std::optional<ClockDirection> try_parse(std::string_view text);

    static std::array<ClockDirection, kCount> all();

    constexpr int index() const noexcept { return index_; }
    // Signed deviation from straight ahead, -90 .. +90 in 15 degree steps.
    constexpr int signed_degrees() const noexcept { return (index_ - 6) * 15; }
    int hour() const noexcept;
    bool is_half_hour() const noexcept { return index_ % 2 == 1; }

    std::string label() const;

    friend constexpr auto operator<=>(ClockDirection, ClockDirection) = default;

private:
    constexpr explicit ClockDirection(int index) : index_(index) {}

    int index_ = 6;
};

enum class Dof3 { Left, Forward, Right };

std::string_view to_string(Dof3 d);

struct DirectionEstimate {
    double deviation_deg = 0.0;  // 0 straight ahead, positive to the right
    ClockDirection clock;
    Dof3 dof3 = Dof3::Forward;
    int raw_deg = 0;
};

ClockDirection quantize_clock(double deviation_deg);
Dof3 quantize_dof3(double deviation_deg);

// Quantizes all three schemes for a deviation in [-90, +90].
DirectionEstimate estimate_from_deviation(double deviation_deg);

// Bearing from the path start to its endpoint.
DirectionEstimate direction_from_path(const NavPath& path, Cell start);

// 12:00 -> 0, 1:00 -> 30, ..., 11:00 -> 330; half-hours add 15.
double clock_to_degrees(ClockDirection c);

// Circular distance in [0, 180].
double angular_distance(double a_deg, double b_deg);

// "45deg", "-23deg".
std::string format_degrees(int deg);

}  // namespace pathfinder
