#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "regcap/grid.hpp"
#include "regcap/graph.hpp"
#include "regcap/piecewise.hpp"
#include "regcap/signals.hpp"

namespace regcap {

// ---------------------------------------------------------------------------
// Scenario: everything one run needs. Immutable after load; time unit is
// years throughout.
// ---------------------------------------------------------------------------

/// Removal of `severity` of one resource's supply, ramping down linearly over
/// `ramp` years starting at `onset`.
struct DisruptionEvent {
    std::string resource_id;
    double onset = 0.0;
    double severity = 1.0;
    double ramp = 0.0;

    bool operator==(const DisruptionEvent&) const = default;
};

/// Per-capability / per-signal dynamics parameters. Maps are keyed by node id
/// (outer) and signal name (inner); missing entries fall back to defaults.
struct DynamicsParams {
    std::map<std::string, double> gamma;                         // capability -> decay rate (1/yr)
    std::map<std::string, double> c0;                            // capability -> initial level, default 1.0
    std::map<std::string, std::map<std::string, double>> theta;  // capability -> signal -> sensitivity
    std::map<std::string, double> tau;                           // signal -> lag (years)
    std::map<std::string, std::map<std::string, double>> k;      // capability -> signal -> coupling
    std::map<std::string, std::map<std::string, double>> lambda; // capability -> signal -> transfer decay

    double gamma_of(const std::string& cap) const {
        auto it = gamma.find(cap);
        return it == gamma.end() ? 0.0 : it->second;
    }
    double c0_of(const std::string& cap) const {
        auto it = c0.find(cap);
        return it == c0.end() ? 1.0 : it->second;
    }
    double tau_of(const std::string& sig) const {
        auto it = tau.find(sig);
        return it == tau.end() ? 0.0 : it->second;
    }
    static double pair_value(const std::map<std::string, std::map<std::string, double>>& m, const std::string& cap,
                             const std::string& sig, double fallback) {
        auto it = m.find(cap);
        if (it == m.end()) return fallback;
        auto jt = it->second.find(sig);
        return jt == it->second.end() ? fallback : jt->second;
    }
    double theta_of(const std::string& cap, const std::string& sig) const { return pair_value(theta, cap, sig, 0.0); }
    double k_of(const std::string& cap, const std::string& sig) const { return pair_value(k, cap, sig, 0.0); }
    double lambda_of(const std::string& cap, const std::string& sig) const {
        return pair_value(lambda, cap, sig, 0.0);
    }

    bool operator==(const DynamicsParams&) const = default;
};

enum class ModelKind { LaggedOde, ConvolutionTransfer, PiecewiseOnly };

inline const char* to_string(ModelKind model) {
    switch (model) {
        case ModelKind::LaggedOde: return "lagged_ode";
        case ModelKind::ConvolutionTransfer: return "convolution_transfer";
        case ModelKind::PiecewiseOnly: return "piecewise_only";
    }
    return "?";
}

inline std::optional<ModelKind> model_from_string(const std::string& name) {
    if (name == "lagged_ode") return ModelKind::LaggedOde;
    if (name == "convolution_transfer") return ModelKind::ConvolutionTransfer;
    if (name == "piecewise_only") return ModelKind::PiecewiseOnly;
    return std::nullopt;
}

struct Scenario {
    RegCapGraph graph;
    double horizon = 12.0;
    double step = 0.01;
    std::vector<DisruptionEvent> events;
    std::vector<PolicySignal> signals;
    DynamicsParams dynamics;
    ModelKind model = ModelKind::LaggedOde;
    std::map<std::string, PiecewiseParams> piecewise;  // capability -> params
    std::int64_t seed = 0;

    TimeGrid grid() const { return TimeGrid::over_horizon(horizon, step); }

    const PolicySignal* find_signal(const std::string& name) const {
        for (const auto& s : signals)
            if (s.name == name) return &s;
        return nullptr;
    }

    bool operator==(const Scenario&) const = default;
};

/// Fraction of a resource's supply still available at time t. 1 before the
/// first onset; each event ramps its factor linearly from 1 down to
/// 1-severity across [onset, onset+ramp] and holds it afterwards; multiple
/// events on one resource compose multiplicatively.
inline double resource_availability(const Scenario& scenario, const std::string& resource_id, double t) {
    if (!scenario.graph.contains(resource_id)) fail(ErrorCode::UnknownNodeId, "no node '" + resource_id + "'");
    double level = 1.0;
    for (const auto& event : scenario.events) {
        if (event.resource_id != resource_id) continue;
        double factor = 1.0;
        if (t >= event.onset) {
            const double progress =
                event.ramp > 0.0 ? std::min(1.0, (t - event.onset) / event.ramp) : 1.0;
            factor = 1.0 - event.severity * progress;
        }
        level *= factor;
    }
    return std::clamp(level, 0.0, 1.0);
}

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

namespace detail {

inline bool valid_signal_shape(const PolicySignal& signal, std::string& why) {
    return std::visit(
        overloaded{
            [&](const ConstantSignal&) { return true; },
            [&](const StepSignal&) { return true; },
            [&](const SigmoidSignal& s) {
                if (s.k > 0.0) return true;
                why = "sigmoid k must be > 0";
                return false;
            },
            [&](const SsifSignal& s) {
                if (!(s.t1 < s.t2)) { why = "ssif requires t1 < t2"; return false; }
                if (s.decay_rate < 0.0 || s.freq_low < 0.0 || s.freq_high < 0.0) {
                    why = "ssif rates and frequencies must be >= 0";
                    return false;
                }
                return true;
            },
            [&](const PiecewiseLinearSignal& s) {
                if (s.knots.empty()) { why = "piecewise_linear needs at least one knot"; return false; }
                for (std::size_t i = 1; i < s.knots.size(); ++i)
                    if (!(s.knots[i - 1].first < s.knots[i].first)) {
                        why = "piecewise_linear knots must be strictly increasing in t";
                        return false;
                    }
                return true;
            },
        },
        signal.shape);
}

}  // namespace detail

inline ValidationReport validate_scenario(const Scenario& scenario) {
    ValidationReport report = validate_graph(scenario.graph);

    if (!(scenario.horizon > 0.0))
        report.error(IssueCode::GridTooCoarse, "horizon must be > 0");
    else if (!(scenario.step > 0.0) || scenario.step > scenario.horizon / 10.0)
        report.error(IssueCode::GridTooCoarse, "step must be positive and at most horizon/10");

    std::set<std::string> signal_names;
    for (const auto& signal : scenario.signals) {
        if (!signal_names.insert(signal.name).second)
            report.error(IssueCode::DuplicateSignalName, "signal '" + signal.name + "' defined twice");
        std::string why;
        if (!detail::valid_signal_shape(signal, why))
            report.error(IssueCode::InvalidSignal, "signal '" + signal.name + "': " + why);
    }

    for (const auto& event : scenario.events) {
        const RegCapNode* node = scenario.graph.find(event.resource_id);
        if (node == nullptr)
            report.error(IssueCode::UnknownNodeId, "event references unknown node '" + event.resource_id + "'");
        else if (node->layer != LayerKind::Resource)
            report.error(IssueCode::InvalidEvent, "event target '" + event.resource_id + "' is not a resource");
        if (!(event.severity >= 0.0 && event.severity <= 1.0))
            report.error(IssueCode::InvalidEvent, "event on '" + event.resource_id + "': severity must lie in [0,1]");
        if (event.onset < 0.0 || event.ramp < 0.0)
            report.error(IssueCode::InvalidEvent, "event on '" + event.resource_id + "': onset and ramp must be >= 0");
    }

    auto require_capability = [&](const std::string& id, const char* where) {
        const RegCapNode* node = scenario.graph.find(id);
        if (node == nullptr)
            report.error(IssueCode::UnknownNodeId, std::string(where) + " references unknown node '" + id + "'");
        else if (node->layer != LayerKind::Capability)
            report.error(IssueCode::InvalidDynamics, std::string(where) + " key '" + id + "' is not a capability");
    };
    auto require_signal = [&](const std::string& name, const char* where) {
        if (signal_names.count(name) == 0)
            report.error(IssueCode::UnknownSignal, std::string(where) + " references unknown signal '" + name + "'");
    };

    for (const auto& [cap, rate] : scenario.dynamics.gamma) {
        require_capability(cap, "dynamics.gamma");
        if (!(rate >= 0.0) || !std::isfinite(rate))
            report.error(IssueCode::InvalidDynamics, "gamma for '" + cap + "' must be finite and >= 0");
    }
    for (const auto& [cap, level] : scenario.dynamics.c0) {
        require_capability(cap, "dynamics.c0");
        if (!(level > 0.0 && level <= 1.0))
            report.error(IssueCode::InvalidDynamics, "c0 for '" + cap + "' must lie in (0,1]");
    }
    for (const auto& [cap, by_signal] : scenario.dynamics.theta) {
        require_capability(cap, "dynamics.theta");
        for (const auto& [sig, value] : by_signal) {
            require_signal(sig, "dynamics.theta");
            if (!std::isfinite(value))
                report.error(IssueCode::InvalidDynamics, "theta for ('" + cap + "','" + sig + "') must be finite");
        }
    }
    for (const auto& [sig, lag] : scenario.dynamics.tau) {
        require_signal(sig, "dynamics.tau");
        if (!(lag >= 0.0) || !std::isfinite(lag))
            report.error(IssueCode::InvalidDynamics, "tau for '" + sig + "' must be finite and >= 0");
    }
    for (const auto& [cap, by_signal] : scenario.dynamics.k) {
        require_capability(cap, "dynamics.k");
        for (const auto& [sig, value] : by_signal) {
            require_signal(sig, "dynamics.k");
            if (!(value >= 0.0) || !std::isfinite(value))
                report.error(IssueCode::InvalidDynamics, "k for ('" + cap + "','" + sig + "') must be >= 0");
        }
    }
    for (const auto& [cap, by_signal] : scenario.dynamics.lambda) {
        require_capability(cap, "dynamics.lambda");
        for (const auto& [sig, value] : by_signal) {
            require_signal(sig, "dynamics.lambda");
            if (!(value >= 0.0) || !std::isfinite(value))
                report.error(IssueCode::InvalidDynamics, "lambda for ('" + cap + "','" + sig + "') must be >= 0");
        }
    }

    for (const auto& [cap, params] : scenario.piecewise) {
        require_capability(cap, "piecewise");
        if (const auto* a = std::get_if<PiecewiseA>(&params.model)) {
            if (!(a->t0 < a->t1))
                report.error(IssueCode::InvalidPiecewise, "piecewise '" + cap + "': t0 must be < t1");
            if (a->lambda1 < 0.0 || a->lambda2 < 0.0)
                report.error(IssueCode::InvalidPiecewise, "piecewise '" + cap + "': rates must be >= 0");
        } else if (const auto* b = std::get_if<PiecewiseB>(&params.model)) {
            if (!(b->t1 < b->t2))
                report.error(IssueCode::InvalidPiecewise, "piecewise '" + cap + "': t1 must be < t2");
            if (b->alpha < 0.0 || b->beta < 0.0 || b->gamma < 0.0 || b->delta < 0.0)
                report.error(IssueCode::InvalidPiecewise, "piecewise '" + cap + "': coefficients must be >= 0");
            if (b->gamma > 1.0)
                report.error(IssueCode::InvalidPiecewise, "piecewise '" + cap + "': gamma must be <= 1");
        }
        if (piecewise_jump(params) > 1e-6)
            report.warn(IssueCode::PiecewiseDiscontinuity,
                        "piecewise '" + cap + "' has an inter-segment jump larger than 1e-6");
    }

    if (scenario.model == ModelKind::PiecewiseOnly) {
        for (const auto& cap : scenario.graph.ids_of(LayerKind::Capability))
            if (scenario.piecewise.count(cap) == 0)
                report.warn(IssueCode::MissingPiecewiseParams,
                            "capability '" + cap + "' has no piecewise params; it will hold at c0");
    }

    return report;
}

}  // namespace regcap
