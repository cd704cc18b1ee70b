#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "regcap/errors.hpp"
#include "regcap/grid.hpp"

namespace regcap {

// ---------------------------------------------------------------------------
// Policy / suppression signal functions P_j(t). All evaluation is pure.
// ---------------------------------------------------------------------------

struct ConstantSignal {
    double value = 0.0;
    bool operator==(const ConstantSignal&) const = default;
};

struct StepSignal {
    double t0 = 0.0;
    double value = 1.0;
    bool operator==(const StepSignal&) const = default;
};

/// Logistic ramp 1/(1+e^{-k(t-t0)}); k sets the startup speed, t0 the
/// announcement point.
struct SigmoidSignal {
    double k = 1.0;
    double t0 = 0.0;
    bool operator==(const SigmoidSignal&) const = default;
};

/// Three-stage suppression injection: a low-frequency stable stage before t1,
/// a high-frequency negative impulse stage on [t1,t2), and a decaying
/// residual oscillation from t2 on.
struct SsifSignal {
    double t1 = 6.0;
    double t2 = 14.0;
    double base_amp = 0.05;
    double pulse_amp = 1.0;
    double decay_rate = 0.5;
    double freq_low = 0.25;
    double freq_high = 2.0;
    bool operator==(const SsifSignal&) const = default;
};

struct PiecewiseLinearSignal {
    std::vector<std::pair<double, double>> knots;  // (t, value), strictly increasing t
    bool operator==(const PiecewiseLinearSignal&) const = default;
};

using SignalShape = std::variant<ConstantSignal, StepSignal, SigmoidSignal, SsifSignal, PiecewiseLinearSignal>;

struct PolicySignal {
    std::string name;
    SignalShape shape;

    bool operator==(const PolicySignal&) const = default;
};

namespace detail {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

inline double two_pi() { return 2.0 * std::numbers::pi; }

}  // namespace detail

inline double eval_signal(const PolicySignal& signal, double t) {
    return std::visit(
        detail::overloaded{
            [&](const ConstantSignal& s) { return s.value; },
            [&](const StepSignal& s) { return t < s.t0 ? 0.0 : s.value; },
            [&](const SigmoidSignal& s) { return 1.0 / (1.0 + std::exp(-s.k * (t - s.t0))); },
            [&](const SsifSignal& s) {
                if (t < s.t1) return s.base_amp * std::sin(detail::two_pi() * s.freq_low * t);
                if (t < s.t2) return -s.pulse_amp * std::abs(std::sin(detail::two_pi() * s.freq_high * t));
                return -s.pulse_amp * std::exp(-s.decay_rate * (t - s.t2)) *
                       std::sin(detail::two_pi() * s.freq_high * t);
            },
            [&](const PiecewiseLinearSignal& s) {
                if (s.knots.empty()) return 0.0;
                if (t <= s.knots.front().first) return s.knots.front().second;
                if (t >= s.knots.back().first) return s.knots.back().second;
                for (std::size_t i = 1; i < s.knots.size(); ++i) {
                    if (t <= s.knots[i].first) {
                        const auto& [ta, va] = s.knots[i - 1];
                        const auto& [tb, vb] = s.knots[i];
                        return va + (vb - va) * (t - ta) / (tb - ta);
                    }
                }
                return s.knots.back().second;
            },
        },
        signal.shape);
}

/// Central difference (f(t+h)-f(t-h))/2h; the sigmoid uses its analytic
/// derivative k*p*(1-p).
inline double signal_derivative(const PolicySignal& signal, double t, double h) {
    if (!(h > 0.0)) fail(ErrorCode::InvalidParameter, "derivative step h must be > 0");
    if (const auto* s = std::get_if<SigmoidSignal>(&signal.shape)) {
        const double p = 1.0 / (1.0 + std::exp(-s->k * (t - s->t0)));
        return s->k * p * (1.0 - p);
    }
    return (eval_signal(signal, t + h) - eval_signal(signal, t - h)) / (2.0 * h);
}

struct DerivativePeak {
    double t;
    double derivative;
};

/// Interior grid points where |dP/dt| strictly exceeds both neighbours —
/// the moments the signal moves fastest, i.e. when the system downstream is
/// most sensitive to it. Sorted by |derivative| descending, earlier t first
/// on ties. The derivative step equals the grid step.
inline std::vector<DerivativePeak> vulnerability_windows(const PolicySignal& signal, const TimeGrid& grid) {
    if (grid.points < 3) fail(ErrorCode::GridTooSmall, "vulnerability windows need at least 3 grid points");

    std::vector<double> d(grid.points);
    for (std::size_t i = 0; i < grid.points; ++i) d[i] = signal_derivative(signal, grid.time(i), grid.step);

    std::vector<DerivativePeak> peaks;
    for (std::size_t i = 1; i + 1 < grid.points; ++i) {
        if (std::abs(d[i]) > std::abs(d[i - 1]) && std::abs(d[i]) > std::abs(d[i + 1]))
            peaks.push_back({grid.time(i), d[i]});
    }
    std::stable_sort(peaks.begin(), peaks.end(), [](const DerivativePeak& a, const DerivativePeak& b) {
        if (std::abs(a.derivative) != std::abs(b.derivative)) return std::abs(a.derivative) > std::abs(b.derivative);
        return a.t < b.t;
    });
    return peaks;
}

}  // namespace regcap
