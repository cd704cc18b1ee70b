#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "regcap/scenario.hpp"

namespace regcap {

// ---------------------------------------------------------------------------
// Capability-evolution models. A run is a pure function of its Scenario;
// identical scenarios produce bit-identical results.
// ---------------------------------------------------------------------------

struct Trajectory {
    std::string node_id;
    TimeGrid grid;
    std::vector<double> values;
};

enum class EventKind { Collapse, ReversibilityLost, ReversibilityRegained };

inline const char* to_string(EventKind kind) {
    switch (kind) {
        case EventKind::Collapse: return "collapse";
        case EventKind::ReversibilityLost: return "reversibility_lost";
        case EventKind::ReversibilityRegained: return "reversibility_regained";
    }
    return "?";
}

struct ThresholdEvent {
    double t;
    EventKind kind;
    std::string node_id;
};

struct SimulationResult {
    TimeGrid grid;
    std::map<std::string, Trajectory> trajectories;  // capability levels, resource
                                                     // availability, equipment supply
    std::vector<ThresholdEvent> event_log;
};

// ---------------------------------------------------------------------------
// Cross-layer cascade
// ---------------------------------------------------------------------------

namespace detail {

/// Flattened propagation structure: per equipment its inbound resource
/// weights; per capability the (equipment, delay, scale) contributions, where
/// delay = tau_EG*(1-sigma_sub) for routes through a generation node and 0
/// for direct E->C edges, and scale is the weight of the edge into the
/// capability.
struct CascadePlan {
    struct Inbound {
        std::string resource_id;
        double omega;
    };
    struct EquipmentSupply {
        std::string equipment_id;
        std::vector<Inbound> inbound;
        double omega_sum = 0.0;
    };
    struct Contribution {
        std::size_t equipment_index;
        double delay;
        double scale;
    };

    std::vector<std::string> capability_ids;  // sorted
    std::vector<EquipmentSupply> equipment;   // sorted by id
    std::vector<std::vector<Contribution>> contributions;  // per capability

    static CascadePlan build(const RegCapGraph& graph) {
        CascadePlan plan;
        plan.capability_ids = graph.ids_of(LayerKind::Capability);
        const auto equipment_ids = graph.ids_of(LayerKind::Equipment);

        std::map<std::string, std::size_t> equipment_index;
        for (const auto& id : equipment_ids) {
            EquipmentSupply supply;
            supply.equipment_id = id;
            for (const auto& edge : graph.edges) {
                if (edge.dst != id) continue;
                const RegCapNode* src = graph.find(edge.src);
                if (src && src->layer == LayerKind::Resource) {
                    supply.inbound.push_back({edge.src, edge.weight});
                    supply.omega_sum += edge.weight;
                }
            }
            equipment_index[id] = plan.equipment.size();
            plan.equipment.push_back(std::move(supply));
        }

        std::map<std::string, std::size_t> capability_index;
        for (std::size_t i = 0; i < plan.capability_ids.size(); ++i) capability_index[plan.capability_ids[i]] = i;
        plan.contributions.assign(plan.capability_ids.size(), {});

        for (const auto& into_cap : graph.edges) {
            auto cap = capability_index.find(into_cap.dst);
            if (cap == capability_index.end()) continue;
            const RegCapNode* src = graph.find(into_cap.src);
            if (src == nullptr) continue;
            if (src->layer == LayerKind::Equipment) {
                plan.contributions[cap->second].push_back({equipment_index.at(src->id), 0.0, into_cap.weight});
            } else if (src->layer == LayerKind::Generation) {
                for (const auto& into_gen : graph.edges) {
                    if (into_gen.dst != src->id) continue;
                    const RegCapNode* equip = graph.find(into_gen.src);
                    if (equip == nullptr || equip->layer != LayerKind::Equipment) continue;
                    const double delay = into_gen.delay_years * (1.0 - into_gen.sigma_sub);
                    plan.contributions[cap->second].push_back({equipment_index.at(equip->id), delay, into_cap.weight});
                }
            }
        }
        return plan;
    }

    /// Effective supply s_e(t): omega-weighted mean of the inbound resource
    /// availabilities; 1 when nothing feeds the equipment and for t < 0
    /// (pre-history convention).
    double supply(const Scenario& scenario, std::size_t equipment_idx, double t) const {
        if (t < 0.0) return 1.0;
        const EquipmentSupply& e = equipment[equipment_idx];
        if (e.inbound.empty() || e.omega_sum <= 0.0) return 1.0;
        double acc = 0.0;
        for (const auto& in : e.inbound) acc += in.omega * resource_availability(scenario, in.resource_id, t);
        return acc / e.omega_sum;
    }

    /// Forcing on capability i at time t: -sum over contributing routes of
    /// scale * (1 - s_e(t - delay)).
    double forcing(const Scenario& scenario, std::size_t capability_idx, double t) const {
        double acc = 0.0;
        for (const auto& c : contributions[capability_idx]) acc += c.scale * (1.0 - supply(scenario, c.equipment_index, t - c.delay));
        return -acc;
    }
};

}  // namespace detail

/// Supply-deficit forcing rate (1/yr, signed) for every capability node.
inline std::map<std::string, double> cascade_forcing(const RegCapGraph& graph, const Scenario& scenario, double t) {
    const auto plan = detail::CascadePlan::build(graph);
    std::map<std::string, double> out;
    for (std::size_t i = 0; i < plan.capability_ids.size(); ++i)
        out[plan.capability_ids[i]] = plan.forcing(scenario, i, t);
    return out;
}

// ---------------------------------------------------------------------------
// Shared result assembly
// ---------------------------------------------------------------------------

namespace detail {

inline void record_context_trajectories(const Scenario& scenario, const CascadePlan& plan, SimulationResult& result) {
    const TimeGrid grid = result.grid;
    for (const auto& id : scenario.graph.ids_of(LayerKind::Resource)) {
        Trajectory traj{id, grid, {}};
        traj.values.reserve(grid.points);
        for (std::size_t i = 0; i < grid.points; ++i) traj.values.push_back(resource_availability(scenario, id, grid.time(i)));
        result.trajectories.emplace(id, std::move(traj));
    }
    for (std::size_t e = 0; e < plan.equipment.size(); ++e) {
        Trajectory traj{plan.equipment[e].equipment_id, grid, {}};
        traj.values.reserve(grid.points);
        for (std::size_t i = 0; i < grid.points; ++i) traj.values.push_back(plan.supply(scenario, e, grid.time(i)));
        result.trajectories.emplace(traj.node_id, std::move(traj));
    }
}

/// Threshold crossings with linearly interpolated crossing times:
/// theta_col downward, theta_rev in both directions.
inline void append_threshold_events(const Scenario& scenario, const Trajectory& traj, SimulationResult& result) {
    const RegCapNode* node = scenario.graph.find(traj.node_id);
    if (node == nullptr || !node->capability) return;
    const double theta_col = node->capability->theta_col;
    const double theta_rev = node->capability->theta_rev;

    auto cross_time = [&](std::size_t i, double threshold) {
        const double prev = traj.values[i - 1];
        const double cur = traj.values[i];
        const double t_prev = traj.grid.time(i - 1);
        if (cur == prev) return t_prev;
        return t_prev + traj.grid.step * (threshold - prev) / (cur - prev);
    };

    for (std::size_t i = 1; i < traj.values.size(); ++i) {
        const double prev = traj.values[i - 1];
        const double cur = traj.values[i];
        if (prev >= theta_col && cur < theta_col)
            result.event_log.push_back({cross_time(i, theta_col), EventKind::Collapse, traj.node_id});
        if (prev >= theta_rev && cur < theta_rev)
            result.event_log.push_back({cross_time(i, theta_rev), EventKind::ReversibilityLost, traj.node_id});
        if (prev < theta_rev && cur >= theta_rev)
            result.event_log.push_back({cross_time(i, theta_rev), EventKind::ReversibilityRegained, traj.node_id});
    }
}

inline void sort_event_log(SimulationResult& result) {
    std::stable_sort(result.event_log.begin(), result.event_log.end(),
                     [](const ThresholdEvent& a, const ThresholdEvent& b) {
                         if (a.t != b.t) return a.t < b.t;
                         return a.node_id < b.node_id;
                     });
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Lagged ODE system
// ---------------------------------------------------------------------------

struct OdeOptions {
    bool clamp_levels = true;  // keep C_i in [0,1] after each step
};

/// Integrates dC_i/dt = -gamma_i*C_i + sum_j theta_ij*P_j(t - tau_j) + F_i(t)
/// with classical fixed-step RK4. Signals are closed-form, so lagged terms
/// are evaluated directly at shifted time; cascade delays use the s_e = 1
/// pre-history for negative time.
inline SimulationResult simulate_ode(const Scenario& scenario, const OdeOptions& options = {}) {
    if (scenario.model != ModelKind::LaggedOde)
        fail(ErrorCode::ModelMismatch, "scenario model is not lagged_ode");

    const TimeGrid grid = scenario.grid();
    const auto plan = detail::CascadePlan::build(scenario.graph);
    const auto& caps = plan.capability_ids;
    const std::size_t n = caps.size();

    std::vector<double> gammas(n);
    for (std::size_t i = 0; i < n; ++i) gammas[i] = scenario.dynamics.gamma_of(caps[i]);

    // (capability, signal) sensitivities, with per-signal lags
    struct Drive {
        const PolicySignal* signal;
        double theta;
        double tau;
    };
    std::vector<std::vector<Drive>> drives(n);
    for (std::size_t i = 0; i < n; ++i) {
        auto it = scenario.dynamics.theta.find(caps[i]);
        if (it == scenario.dynamics.theta.end()) continue;
        for (const auto& [name, theta] : it->second) {
            const PolicySignal* signal = scenario.find_signal(name);
            if (signal != nullptr) drives[i].push_back({signal, theta, scenario.dynamics.tau_of(name)});
        }
    }

    auto rhs = [&](double t, const std::vector<double>& state, std::vector<double>& out) {
        for (std::size_t i = 0; i < n; ++i) {
            double rate = -gammas[i] * state[i];
            for (const auto& d : drives[i]) rate += d.theta * eval_signal(*d.signal, t - d.tau);
            rate += plan.forcing(scenario, i, t);
            out[i] = rate;
        }
    };

    std::vector<double> state(n);
    for (std::size_t i = 0; i < n; ++i) state[i] = scenario.dynamics.c0_of(caps[i]);

    std::vector<std::vector<double>> series(n);
    for (std::size_t i = 0; i < n; ++i) {
        series[i].reserve(grid.points);
        series[i].push_back(state[i]);
    }

    const double h = grid.step;
    std::vector<double> k1(n), k2(n), k3(n), k4(n), tmp(n);
    for (std::size_t stepi = 1; stepi < grid.points; ++stepi) {
        const double t = grid.time(stepi - 1);
        rhs(t, state, k1);
        for (std::size_t i = 0; i < n; ++i) tmp[i] = state[i] + 0.5 * h * k1[i];
        rhs(t + 0.5 * h, tmp, k2);
        for (std::size_t i = 0; i < n; ++i) tmp[i] = state[i] + 0.5 * h * k2[i];
        rhs(t + 0.5 * h, tmp, k3);
        for (std::size_t i = 0; i < n; ++i) tmp[i] = state[i] + h * k3[i];
        rhs(t + h, tmp, k4);
        for (std::size_t i = 0; i < n; ++i) {
            state[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
            if (options.clamp_levels) state[i] = std::clamp(state[i], 0.0, 1.0);
            series[i].push_back(state[i]);
        }
    }

    SimulationResult result;
    result.grid = grid;
    for (std::size_t i = 0; i < n; ++i) {
        Trajectory traj{caps[i], grid, std::move(series[i])};
        detail::append_threshold_events(scenario, traj, result);
        result.trajectories.emplace(caps[i], std::move(traj));
    }
    detail::record_context_trajectories(scenario, plan, result);
    detail::sort_event_log(result);
    return result;
}

// ---------------------------------------------------------------------------
// Convolution transfer
// ---------------------------------------------------------------------------

/// Accumulated policy pressure C_i(t) = sum_j K_ij * integral_0^t
/// P_j(u) e^{-lambda_ij (t-u)} du, evaluated by trapezoidal quadrature on the
/// scenario grid (exact recursion per step). The output is a raw response,
/// not a clamped level.
inline SimulationResult convolve_transfer(const Scenario& scenario) {
    if (scenario.model != ModelKind::ConvolutionTransfer)
        fail(ErrorCode::ModelMismatch, "scenario model is not convolution_transfer");

    const TimeGrid grid = scenario.grid();
    const auto plan = detail::CascadePlan::build(scenario.graph);
    const auto& caps = plan.capability_ids;
    const double h = grid.step;

    SimulationResult result;
    result.grid = grid;
    for (const auto& cap : caps) {
        std::vector<double> total(grid.points, 0.0);
        auto it = scenario.dynamics.k.find(cap);
        if (it != scenario.dynamics.k.end()) {
            for (const auto& [name, coupling] : it->second) {
                const PolicySignal* signal = scenario.find_signal(name);
                if (signal == nullptr || coupling == 0.0) continue;
                const double lambda = scenario.dynamics.lambda_of(cap, name);
                const double decay = std::exp(-lambda * h);
                double integral = 0.0;
                double prev = eval_signal(*signal, grid.time(0));
                for (std::size_t i = 1; i < grid.points; ++i) {
                    const double cur = eval_signal(*signal, grid.time(i));
                    integral = decay * integral + 0.5 * h * (decay * prev + cur);
                    total[i] += coupling * integral;
                    prev = cur;
                }
            }
        }
        result.trajectories.emplace(cap, Trajectory{cap, grid, std::move(total)});
    }
    detail::record_context_trajectories(scenario, plan, result);
    return result;
}

// ---------------------------------------------------------------------------
// Piecewise-only runs
// ---------------------------------------------------------------------------

/// Evaluates the configured piecewise decline model per capability over the
/// grid; capabilities without parameters hold at c0.
inline SimulationResult simulate_piecewise(const Scenario& scenario) {
    if (scenario.model != ModelKind::PiecewiseOnly)
        fail(ErrorCode::ModelMismatch, "scenario model is not piecewise_only");

    const TimeGrid grid = scenario.grid();
    const auto plan = detail::CascadePlan::build(scenario.graph);

    SimulationResult result;
    result.grid = grid;
    for (const auto& cap : plan.capability_ids) {
        Trajectory traj{cap, grid, {}};
        traj.values.reserve(grid.points);
        auto it = scenario.piecewise.find(cap);
        if (it == scenario.piecewise.end()) {
            traj.values.assign(grid.points, scenario.dynamics.c0_of(cap));
        } else {
            for (std::size_t i = 0; i < grid.points; ++i) traj.values.push_back(eval_piecewise(it->second, grid.time(i)));
        }
        detail::append_threshold_events(scenario, traj, result);
        result.trajectories.emplace(cap, std::move(traj));
    }
    detail::record_context_trajectories(scenario, plan, result);
    detail::sort_event_log(result);
    return result;
}

/// Dispatch on scenario.model.
inline SimulationResult run_simulation(const Scenario& scenario) {
    switch (scenario.model) {
        case ModelKind::LaggedOde: return simulate_ode(scenario);
        case ModelKind::ConvolutionTransfer: return convolve_transfer(scenario);
        case ModelKind::PiecewiseOnly: return simulate_piecewise(scenario);
    }
    fail(ErrorCode::ModelMismatch, "unknown model");
}

}  // namespace regcap
