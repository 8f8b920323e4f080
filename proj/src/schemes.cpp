#include "pathfinder/schemes.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numbers>

#include "pathfinder/error.hpp"

namespace pathfinder {

ClockDirection ClockDirection::from_index(int index) {
    if (index < 0 || index >= kCount) {
        throw Error(ErrorCode::InvalidClock, "clock index " + std::to_string(index));
    }
    return ClockDirection(index);
}

std::optional<ClockDirection> ClockDirection::try_parse(std::string_view text) {
    const auto colon = text.find(':');
    if (colon == std::string_view::npos || colon == 0 || colon > 2 || text.size() != colon + 3) {
        return std::nullopt;
    }
    int hour = 0;
    int minute = 0;
    auto hr = std::from_chars(text.data(), text.data() + colon, hour);
    auto mr = std::from_chars(text.data() + colon + 1, text.data() + text.size(), minute);
    if (hr.ec != std::errc() || hr.ptr != text.data() + colon || mr.ec != std::errc() ||
        mr.ptr != text.data() + text.size()) {
        return std::nullopt;
    }
    if (minute != 0 && minute != 30) return std::nullopt;

    int steps_from_noon = 0;
    if (hour == 12) {
        steps_from_noon = 0;
    } else if (hour >= 1 && hour <= 3) {
        steps_from_noon = hour * 2;
    } else if (hour >= 9 && hour <= 11) {
        steps_from_noon = (hour - 12) * 2;
    } else {
        return std::nullopt;
    }
    steps_from_noon += minute == 30 ? 1 : 0;
    if (steps_from_noon > 6) return std::nullopt;  // 3:30
    return ClockDirection(steps_from_noon + 6);
}

ClockDirection ClockDirection::parse(std::string_view text) {
    if (auto c = try_parse(text)) return *c;
    throw Error(ErrorCode::InvalidClock, "'" + std::string(text) + "' is not one of 9:00 .. 3:00");
}

std::array<ClockDirection, ClockDirection::kCount> ClockDirection::all() {
    std::array<ClockDirection, kCount> out;
    for (int i = 0; i < kCount; ++i) out[static_cast<std::size_t>(i)] = ClockDirection(i);
    return out;
}

int ClockDirection::hour() const noexcept {
    const int whole_steps = (index_ - 6) >= 0 ? (index_ - 6) / 2 : -((6 - index_ + 1) / 2);
    const int h = 12 + whole_steps;
    return h > 12 ? h - 12 : h;
}

std::string ClockDirection::label() const {
    return std::to_string(hour()) + (is_half_hour() ? ":30" : ":00");
}

std::string_view to_string(Dof3 d) {
    switch (d) {
        case Dof3::Left: return "left";
        case Dof3::Forward: return "forward";
        case Dof3::Right: return "right";
    }
    return "forward";
}

namespace {

void check_field(double deviation_deg) {
    if (!(std::abs(deviation_deg) <= 90.0)) {
        throw Error(ErrorCode::OutOfField, std::to_string(deviation_deg) + " deg is outside [-90, 90]");
    }
}

}  // namespace

ClockDirection quantize_clock(double deviation_deg) {
    check_field(deviation_deg);
    // Nearest 15 degree step; exact half-steps round toward straight ahead.
    const double steps = std::abs(deviation_deg) / 15.0;
    double whole = std::floor(steps);
    if (steps - whole > 0.5) whole += 1.0;
    const int signed_steps = static_cast<int>(whole) * (deviation_deg < 0 ? -1 : 1);
    return ClockDirection::from_index(signed_steps + 6);
}

Dof3 quantize_dof3(double deviation_deg) {
    check_field(deviation_deg);
    if (deviation_deg < -30.0) return Dof3::Left;
    if (deviation_deg > 30.0) return Dof3::Right;
    return Dof3::Forward;
}

DirectionEstimate estimate_from_deviation(double deviation_deg) {
    DirectionEstimate d;
    d.deviation_deg = deviation_deg;
    d.clock = quantize_clock(deviation_deg);
    d.dof3 = quantize_dof3(deviation_deg);
    d.raw_deg = static_cast<int>(std::lround(deviation_deg));
    return d;
}

DirectionEstimate direction_from_path(const NavPath& path, Cell start) {
    if (path.length_steps() == 0) {
        throw Error(ErrorCode::ZeroLengthPath, "path has no moves");
    }
    const double dcol = path.end().col - start.col;
    const double drow = start.row - path.end().row;
    return estimate_from_deviation(std::atan2(dcol, drow) * 180.0 / std::numbers::pi);
}

double clock_to_degrees(ClockDirection c) {
    const int d = c.signed_degrees();
    return d < 0 ? d + 360.0 : static_cast<double>(d);
}

double angular_distance(double a_deg, double b_deg) {
    const double diff = std::abs(a_deg - b_deg);
    return std::min(diff, 360.0 - diff);
}

std::string format_degrees(int deg) { return std::to_string(deg) + "deg"; }

}  // namespace pathfinder
