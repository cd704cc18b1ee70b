#pragma once

#include <cmath>
#include <cstddef>

#include "regcap/errors.hpp"

namespace regcap {

/// Uniform time grid: t_i = t0 + i*step, i in [0, points).
struct TimeGrid {
    double t0 = 0.0;
    double step = 0.01;
    std::size_t points = 0;

    static TimeGrid over_horizon(double horizon, double step, double t0 = 0.0) {
        if (!(horizon > 0.0) || !(step > 0.0))
            fail(ErrorCode::InvalidParameter, "horizon and step must be positive");
        // floor(horizon/step)+1 samples; epsilon guards FP noise in the division
        auto intervals = static_cast<std::size_t>(std::floor(horizon / step + 1e-9));
        return TimeGrid{t0, step, intervals + 1};
    }

    double time(std::size_t i) const { return t0 + step * static_cast<double>(i); }
    double end() const { return points == 0 ? t0 : time(points - 1); }
    double span() const { return points == 0 ? 0.0 : end() - t0; }

    bool operator==(const TimeGrid&) const = default;
};

}  // namespace regcap
