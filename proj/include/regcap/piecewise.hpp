#pragma once

#include <algorithm>
#include <cmath>
#include <variant>

namespace regcap {

// ---------------------------------------------------------------------------
// Piecewise capability-decline models. Variant A: plateau, exponential
// decline, then a second (post-jump) exponential. Variant B: linear
// degradation, quadratic latency accumulation, then triggered exponential
// collapse.
// ---------------------------------------------------------------------------

struct PiecewiseA {
    double t0 = 5.5;
    double t1 = 6.0;
    double lambda1 = 1.0;
    double lambda2 = 1.0;
    double beta = 0.4;
    bool operator==(const PiecewiseA&) const = default;
};

struct PiecewiseB {
    double t1 = 2.0;  // end of the linear phase
    double t2 = 6.0;  // collapse trigger
    double alpha = 0.05;
    double beta = 0.02;
    double gamma = 0.6;
    double delta = 1.0;
    bool operator==(const PiecewiseB&) const = default;
};

struct PiecewiseParams {
    std::variant<PiecewiseA, PiecewiseB> model;
    bool operator==(const PiecewiseParams&) const = default;
};

namespace detail {

inline double piecewise_raw(const PiecewiseA& p, double t) {
    if (t < p.t0) return 1.0;
    if (t < p.t1) return std::exp(-p.lambda1 * (t - p.t0));
    return p.beta * std::exp(-p.lambda2 * (t - p.t1));
}

inline double piecewise_raw(const PiecewiseB& p, double t) {
    if (t < p.t1) return 1.0 - p.alpha * t;
    if (t < p.t2) return 1.0 - p.alpha * p.t1 - p.beta * (t - p.t1) * (t - p.t1);
    return p.gamma * std::exp(-p.delta * (t - p.t2));
}

}  // namespace detail

/// Literal piecewise evaluation, clamped to [0,1]. Segment boundaries may be
/// discontinuous; continuity is checked at load time, not enforced here.
inline double eval_piecewise(const PiecewiseParams& params, double t) {
    const double raw =
        std::visit([&](const auto& p) { return detail::piecewise_raw(p, t); }, params.model);
    return std::clamp(raw, 0.0, 1.0);
}

/// Largest inter-segment jump (unclamped limits), used for the load-time
/// discontinuity warning.
inline double piecewise_jump(const PiecewiseParams& params) {
    return std::visit(
        [](const auto& p) {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, PiecewiseA>) {
                const double left = std::exp(-p.lambda1 * (p.t1 - p.t0));
                return std::abs(left - p.beta);
            } else {
                const double left = 1.0 - p.alpha * p.t1 - p.beta * (p.t2 - p.t1) * (p.t2 - p.t1);
                return std::abs(left - p.gamma);
            }
        },
        params.model);
}

}  // namespace regcap
