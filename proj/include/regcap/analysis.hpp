#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "regcap/dynamics.hpp"

namespace regcap {

// ---------------------------------------------------------------------------
// Strategic diagnostics over trajectories and graph structure.
// ---------------------------------------------------------------------------

/// A time that may never have occurred within the horizon. Lag windows carry
/// the grid end as their censored value; collapse times carry NaN.
struct CensoredTime {
    double value = std::numeric_limits<double>::quiet_NaN();
    bool censored = true;

    static CensoredTime at(double t) { return {t, false}; }
    static CensoredTime censored_at(double t) { return {t, true}; }
};

/// Earliest time the trajectory crosses below theta_col, linearly
/// interpolated between grid samples; censored if it never does.
inline CensoredTime detect_collapse_point(const Trajectory& traj, double theta_col) {
    if (traj.values.empty()) fail(ErrorCode::EmptyTrajectory, "trajectory '" + traj.node_id + "' is empty");
    if (!(theta_col > 0.0 && theta_col < 1.0)) fail(ErrorCode::InvalidParameter, "theta_col must lie in (0,1)");

    if (traj.values.front() < theta_col) return CensoredTime::at(traj.grid.time(0));
    for (std::size_t i = 1; i < traj.values.size(); ++i) {
        const double prev = traj.values[i - 1];
        const double cur = traj.values[i];
        if (cur < theta_col) {
            const double frac = (prev - theta_col) / (prev - cur);
            return CensoredTime::at(traj.grid.time(i - 1) + traj.grid.step * frac);
        }
    }
    return CensoredTime{};
}

/// Lag window: the last grid sample still at/above `stability` before the
/// first below-stability dip. Censored at the grid end when the trajectory
/// never dips.
inline CensoredTime detect_lag_window(const Trajectory& traj, double stability = 0.9) {
    if (traj.values.empty()) fail(ErrorCode::EmptyTrajectory, "trajectory '" + traj.node_id + "' is empty");
    if (!(stability > 0.0 && stability < 1.0)) fail(ErrorCode::InvalidParameter, "stability must lie in (0,1)");

    for (std::size_t i = 0; i < traj.values.size(); ++i) {
        if (traj.values[i] < stability)
            return CensoredTime::at(i == 0 ? traj.grid.time(0) : traj.grid.time(i - 1));
    }
    return CensoredTime::censored_at(traj.grid.end());
}

struct BreakdownSlope {
    double t;     // nonlinear acceleration point
    double rate;  // most negative central-difference derivative (1/yr)
};

/// Grid point with the most negative central-difference derivative; earliest
/// t wins ties.
inline BreakdownSlope breakdown_slope(const Trajectory& traj) {
    if (traj.values.size() < 3)
        fail(ErrorCode::TrajectoryTooShort, "breakdown slope needs at least 3 samples");
    BreakdownSlope best{traj.grid.time(1), std::numeric_limits<double>::infinity()};
    for (std::size_t i = 1; i + 1 < traj.values.size(); ++i) {
        const double rate = (traj.values[i + 1] - traj.values[i - 1]) / (2.0 * traj.grid.step);
        if (rate < best.rate) best = {traj.grid.time(i), rate};
    }
    return best;
}

/// Rupture score in [0,1]: w_norm * |rate|/(|rate|+1) * 1/(1+Lw). Short lag
/// and steep break score highest; w_norm is the node weight normalized to
/// [0,1] by the caller.
inline double rupture_score(double lag_window, double rate, double w_cl_normalized) {
    const double magnitude = std::abs(rate);
    const double lw = std::max(lag_window, 0.0);
    return w_cl_normalized * magnitude / (magnitude + 1.0) / (1.0 + lw);
}

struct LagWindowReport {
    std::string capability_id;
    CensoredTime lag_window;
    CensoredTime collapse_time;
    double t_max_decline = 0.0;
    double max_decline_rate = 0.0;
    double rupture_score = 0.0;
};

/// Per-capability lag/collapse/slope/rupture report. theta_col comes from the
/// node attributes unless overridden; w_cl is normalized by the maximum over
/// the reported capabilities.
inline std::vector<LagWindowReport> lag_window_reports(const RegCapGraph& graph, const SimulationResult& sim,
                                                       std::optional<double> theta_col_override = std::nullopt,
                                                       double stability = 0.9) {
    std::vector<LagWindowReport> reports;
    const auto caps = graph.ids_of(LayerKind::Capability);

    double max_w = 0.0;
    for (const auto& id : caps) {
        const RegCapNode& node = graph.at(id);
        if (node.capability) max_w = std::max(max_w, node.capability->w_cl);
    }

    for (const auto& id : caps) {
        auto it = sim.trajectories.find(id);
        if (it == sim.trajectories.end()) fail(ErrorCode::MissingTrajectory, "no trajectory for '" + id + "'");
        const Trajectory& traj = it->second;
        const RegCapNode& node = graph.at(id);

        LagWindowReport report;
        report.capability_id = id;
        const double theta =
            theta_col_override.value_or(node.capability ? node.capability->theta_col : 0.4);
        // a threshold at the boundary of the level range can never be crossed
        report.collapse_time =
            (theta > 0.0 && theta < 1.0) ? detect_collapse_point(traj, theta) : CensoredTime{};
        report.lag_window = detect_lag_window(traj, stability);
        const BreakdownSlope slope = breakdown_slope(traj);
        report.t_max_decline = slope.t;
        report.max_decline_rate = slope.rate;

        const double w = node.capability ? node.capability->w_cl : 0.0;
        const double w_norm = max_w > 0.0 ? w / max_w : 0.0;
        report.rupture_score = rupture_score(report.lag_window.value, report.max_decline_rate, w_norm);
        reports.push_back(std::move(report));
    }
    return reports;
}

// ---------------------------------------------------------------------------
// Path overlap
// ---------------------------------------------------------------------------

struct OverlapMatrix {
    std::vector<std::string> row_ids;
    std::vector<std::string> col_ids;
    std::vector<std::vector<double>> entries;  // O_ij in [0,1]
};

using PathSet = std::vector<std::vector<std::string>>;  // node-id sequences

namespace detail {

using PathKeySet = std::set<std::vector<std::string>>;

inline double overlap_entry(const PathKeySet& a, const PathKeySet& b) {
    std::size_t shared = 0;
    for (const auto& path : a) shared += b.count(path);
    return static_cast<double>(shared) / std::sqrt(static_cast<double>(a.size()) * static_cast<double>(b.size()));
}

inline std::map<std::string, PathKeySet> to_key_sets(const std::map<std::string, PathSet>& sets) {
    std::map<std::string, PathKeySet> out;
    for (const auto& [id, paths] : sets) {
        if (paths.empty()) fail(ErrorCode::EmptyPathSet, "path set for '" + id + "' is empty");
        out[id] = PathKeySet(paths.begin(), paths.end());
    }
    return out;
}

}  // namespace detail

/// O_ij = |P_i ∩ P_j| / sqrt(|P_i|*|P_j|) over two id families (rectangular
/// mode); a path's identity is its full node-id sequence.
inline OverlapMatrix path_overlap_matrix(const std::map<std::string, PathSet>& rows,
                                         const std::map<std::string, PathSet>& cols) {
    OverlapMatrix m;
    const auto row_sets = detail::to_key_sets(rows);
    const auto col_sets = detail::to_key_sets(cols);
    for (const auto& [id, set] : row_sets) {
        (void)set;
        m.row_ids.push_back(id);
    }
    for (const auto& [id, set] : col_sets) {
        (void)set;
        m.col_ids.push_back(id);
    }
    m.entries.assign(m.row_ids.size(), std::vector<double>(m.col_ids.size(), 0.0));
    for (std::size_t i = 0; i < m.row_ids.size(); ++i)
        for (std::size_t j = 0; j < m.col_ids.size(); ++j)
            m.entries[i][j] = detail::overlap_entry(row_sets.at(m.row_ids[i]), col_sets.at(m.col_ids[j]));
    return m;
}

/// Square single-family mode: symmetric with unit diagonal.
inline OverlapMatrix path_overlap_matrix(const std::map<std::string, PathSet>& sets) {
    return path_overlap_matrix(sets, sets);
}

namespace detail {

inline std::map<std::string, PathSet> channel_paths(const std::map<std::string, std::vector<Channel>>& sets) {
    std::map<std::string, PathSet> out;
    for (const auto& [id, channels] : sets) {
        PathSet paths;
        for (const auto& c : channels) paths.push_back(c.path);
        out[id] = std::move(paths);
    }
    return out;
}

}  // namespace detail

inline OverlapMatrix path_overlap_matrix(const std::map<std::string, std::vector<Channel>>& rows,
                                         const std::map<std::string, std::vector<Channel>>& cols) {
    return path_overlap_matrix(detail::channel_paths(rows), detail::channel_paths(cols));
}

inline OverlapMatrix path_overlap_matrix(const std::map<std::string, std::vector<Channel>>& sets) {
    return path_overlap_matrix(detail::channel_paths(sets));
}

/// Upstream route sets per capability: the distinct resource->...->feeder
/// prefixes of its channels (terminal capability stripped). Two capabilities
/// share an entry exactly when the same resource route feeds both, which is
/// what the capability-vs-capability overlap compares. Capabilities with no
/// channel are omitted.
inline std::map<std::string, PathSet> upstream_route_sets(const RegCapGraph& graph) {
    std::map<std::string, std::set<std::vector<std::string>>> dedup;
    for (const auto& channel : enumerate_channels(graph)) {
        std::vector<std::string> prefix(channel.path.begin(), channel.path.end() - 1);
        dedup[channel.path.back()].insert(std::move(prefix));
    }
    std::map<std::string, PathSet> out;
    for (const auto& [id, prefixes] : dedup) out[id] = PathSet(prefixes.begin(), prefixes.end());
    return out;
}

// ---------------------------------------------------------------------------
// Response covariance
// ---------------------------------------------------------------------------

struct CoupledBand {
    std::string first;
    std::string second;
    double correlation;
};

struct CovarianceReport {
    std::vector<std::string> ids;
    std::vector<std::vector<double>> covariance;
    std::vector<std::vector<double>> correlation;
    std::vector<bool> degenerate;  // near-zero variance series
    std::vector<CoupledBand> coupled_bands;
};

/// Sample covariance over time samples (divisor N) and Pearson correlation.
/// Constant series get correlation 0 and a degenerate flag; pairs with
/// correlation above `band_threshold` are flagged as coupled bands.
inline CovarianceReport response_covariance(const std::vector<Trajectory>& trajectories,
                                            double band_threshold = 0.8) {
    if (trajectories.size() < 2)
        fail(ErrorCode::InvalidParameter, "response covariance needs at least 2 trajectories");
    const TimeGrid grid = trajectories.front().grid;
    for (const auto& traj : trajectories)
        if (!(traj.grid == grid) || traj.values.size() != trajectories.front().values.size())
            fail(ErrorCode::GridMismatch, "trajectory '" + traj.node_id + "' is on a different grid");

    const std::size_t n = trajectories.size();
    const std::size_t samples = trajectories.front().values.size();
    if (samples == 0) fail(ErrorCode::EmptyTrajectory, "trajectories are empty");

    CovarianceReport report;
    for (const auto& traj : trajectories) report.ids.push_back(traj.node_id);

    std::vector<double> mean(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (double v : trajectories[i].values) mean[i] += v;
        mean[i] /= static_cast<double>(samples);
    }

    report.covariance.assign(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i; j < n; ++j) {
            double acc = 0.0;
            for (std::size_t s = 0; s < samples; ++s)
                acc += (trajectories[i].values[s] - mean[i]) * (trajectories[j].values[s] - mean[j]);
            const double cov = acc / static_cast<double>(samples);
            report.covariance[i][j] = cov;
            report.covariance[j][i] = cov;
        }
    }

    report.degenerate.assign(n, false);
    for (std::size_t i = 0; i < n; ++i) {
        const double var = report.covariance[i][i];
        report.degenerate[i] = var <= 1e-18 * (1.0 + mean[i] * mean[i]);
    }

    report.correlation.assign(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (report.degenerate[i] || report.degenerate[j]) continue;
            report.correlation[i][j] =
                report.covariance[i][j] / std::sqrt(report.covariance[i][i] * report.covariance[j][j]);
        }
    }

    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (report.correlation[i][j] > band_threshold)
                report.coupled_bands.push_back({report.ids[i], report.ids[j], report.correlation[i][j]});
    return report;
}

// ---------------------------------------------------------------------------
// Security-critical zones
// ---------------------------------------------------------------------------

struct SczThresholds {
    double overlap_min = 0.7;
    double corr_min = 0.8;
    double lag_max = 2.0;
};

struct SczCluster {
    std::vector<std::string> members;  // sorted ids, size >= 2
    double mean_overlap = 0.0;
    double mean_correlation = 0.0;
    double min_lag_window = 0.0;
};

/// Connected components of the qualification graph (pairwise overlap >=
/// overlap_min AND correlation >= corr_min), kept when they have >= 2 members
/// and their smallest lag window is <= lag_max. Ordered by smallest member id.
inline std::vector<SczCluster> identify_scz(const OverlapMatrix& overlap, const CovarianceReport& cov,
                                            const std::vector<LagWindowReport>& lags, const SczThresholds& thresholds) {
    auto sorted_set = [](std::vector<std::string> ids) {
        std::sort(ids.begin(), ids.end());
        return ids;
    };
    std::vector<std::string> ids = sorted_set(overlap.row_ids);
    if (sorted_set(overlap.col_ids) != ids || sorted_set(cov.ids) != ids)
        fail(ErrorCode::InconsistentIds, "overlap and covariance id sets differ");
    std::vector<std::string> lag_ids;
    for (const auto& report : lags) lag_ids.push_back(report.capability_id);
    if (sorted_set(lag_ids) != ids) fail(ErrorCode::InconsistentIds, "lag report id set differs");

    const std::size_t n = ids.size();
    auto index_in = [](const std::vector<std::string>& family, const std::string& id) {
        return static_cast<std::size_t>(std::find(family.begin(), family.end(), id) - family.begin());
    };

    auto overlap_of = [&](const std::string& a, const std::string& b) {
        return overlap.entries[index_in(overlap.row_ids, a)][index_in(overlap.col_ids, b)];
    };
    auto corr_of = [&](const std::string& a, const std::string& b) {
        return cov.correlation[index_in(cov.ids, a)][index_in(cov.ids, b)];
    };
    auto lag_of = [&](const std::string& id) {
        for (const auto& report : lags)
            if (report.capability_id == id) return report.lag_window.value;
        return std::numeric_limits<double>::quiet_NaN();
    };

    // Union of qualified pairs via BFS components.
    std::vector<std::vector<std::size_t>> adj(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (overlap_of(ids[i], ids[j]) >= thresholds.overlap_min && corr_of(ids[i], ids[j]) >= thresholds.corr_min) {
                adj[i].push_back(j);
                adj[j].push_back(i);
            }

    std::vector<bool> visited(n, false);
    std::vector<SczCluster> clusters;
    for (std::size_t start = 0; start < n; ++start) {
        if (visited[start]) continue;
        std::vector<std::size_t> component{start};
        visited[start] = true;
        for (std::size_t cursor = 0; cursor < component.size(); ++cursor)
            for (std::size_t next : adj[component[cursor]])
                if (!visited[next]) {
                    visited[next] = true;
                    component.push_back(next);
                }
        if (component.size() < 2) continue;

        SczCluster cluster;
        for (std::size_t idx : component) cluster.members.push_back(ids[idx]);
        std::sort(cluster.members.begin(), cluster.members.end());

        double overlap_sum = 0.0, corr_sum = 0.0;
        std::size_t pairs = 0;
        cluster.min_lag_window = std::numeric_limits<double>::infinity();
        for (std::size_t a = 0; a < cluster.members.size(); ++a) {
            cluster.min_lag_window = std::min(cluster.min_lag_window, lag_of(cluster.members[a]));
            for (std::size_t b = a + 1; b < cluster.members.size(); ++b) {
                overlap_sum += overlap_of(cluster.members[a], cluster.members[b]);
                corr_sum += corr_of(cluster.members[a], cluster.members[b]);
                ++pairs;
            }
        }
        cluster.mean_overlap = overlap_sum / static_cast<double>(pairs);
        cluster.mean_correlation = corr_sum / static_cast<double>(pairs);
        if (cluster.min_lag_window <= thresholds.lag_max) clusters.push_back(std::move(cluster));
    }
    std::sort(clusters.begin(), clusters.end(),
              [](const SczCluster& a, const SczCluster& b) { return a.members.front() < b.members.front(); });
    return clusters;
}

// ---------------------------------------------------------------------------
// Deterrence channels
// ---------------------------------------------------------------------------

struct DeterrenceWeights {
    double alpha = 1.0 / 3.0;
    double beta = 1.0 / 3.0;
    double gamma = 1.0 / 3.0;
};

/// D(w) = alpha*P_collapse + beta*V_strategic + gamma*I_policy.
inline double deterrence_weight(double p_collapse, double v_strategic, double i_policy, double alpha, double beta,
                                double gamma) {
    auto in_unit = [](double v) { return v >= 0.0 && v <= 1.0; };
    if (!in_unit(p_collapse) || !in_unit(v_strategic) || !in_unit(i_policy))
        fail(ErrorCode::InvalidParameter, "deterrence components must lie in [0,1]");
    if (alpha < 0.0 || beta < 0.0 || gamma < 0.0)
        fail(ErrorCode::InvalidParameter, "deterrence weights must be >= 0");
    return alpha * p_collapse + beta * v_strategic + gamma * i_policy;
}

struct ChannelScore {
    Channel channel;
    double p_collapse = 0.0;
    double v_strategic = 0.0;
    double i_policy = 0.0;
    double d = 0.0;
};

/// Scores every channel. p_collapse = 1 when the terminal capability crossed
/// theta_col, else the normalized drawdown (c0 - min C)/(c0 - theta_col);
/// v_strategic is the terminal node attribute; i_policy is the mean omega of
/// the channel's R->E edges normalized by the graph's largest omega. Sorted
/// by d descending, path order on ties.
inline std::vector<ChannelScore> rank_channels(const RegCapGraph& graph, const SimulationResult& sim,
                                               const DeterrenceWeights& weights = {}) {
    double max_omega = 0.0;
    for (const auto& edge : graph.edges) {
        const RegCapNode* src = graph.find(edge.src);
        const RegCapNode* dst = graph.find(edge.dst);
        if (src && dst && src->layer == LayerKind::Resource && dst->layer == LayerKind::Equipment)
            max_omega = std::max(max_omega, edge.weight);
    }

    std::vector<ChannelScore> scores;
    for (const auto& channel : enumerate_channels(graph)) {
        ChannelScore score;
        score.channel = channel;

        const std::string& terminal = channel.path.back();
        auto it = sim.trajectories.find(terminal);
        if (it == sim.trajectories.end())
            fail(ErrorCode::MissingTrajectory, "no trajectory for capability '" + terminal + "'");
        const Trajectory& traj = it->second;
        const RegCapNode& node = graph.at(terminal);
        const double theta_col = node.capability ? node.capability->theta_col : 0.4;

        const double c0 = traj.values.front();
        const double low = *std::min_element(traj.values.begin(), traj.values.end());
        const bool crossed =
            theta_col > 0.0 && theta_col < 1.0 && !detect_collapse_point(traj, theta_col).censored;
        if (crossed)
            score.p_collapse = 1.0;
        else if (c0 > theta_col)
            score.p_collapse = std::min(1.0, std::max(0.0, (c0 - low) / (c0 - theta_col)));

        score.v_strategic = node.capability ? node.capability->v_strategic : 0.0;

        double omega_sum = 0.0;
        std::size_t omega_count = 0;
        for (std::size_t i = 1; i < channel.path.size(); ++i) {
            const RegCapNode& a = graph.at(channel.path[i - 1]);
            const RegCapNode& b = graph.at(channel.path[i]);
            if (a.layer != LayerKind::Resource || b.layer != LayerKind::Equipment) continue;
            for (const auto& edge : graph.edges)
                if (edge.src == a.id && edge.dst == b.id) {
                    omega_sum += edge.weight;
                    ++omega_count;
                }
        }
        if (omega_count > 0 && max_omega > 0.0)
            score.i_policy = std::min(1.0, omega_sum / static_cast<double>(omega_count) / max_omega);

        score.d = deterrence_weight(score.p_collapse, score.v_strategic, score.i_policy, weights.alpha, weights.beta,
                                    weights.gamma);
        scores.push_back(std::move(score));
    }
    std::sort(scores.begin(), scores.end(), [](const ChannelScore& a, const ChannelScore& b) {
        if (a.d != b.d) return a.d > b.d;
        return a.channel.path < b.channel.path;
    });
    return scores;
}

// ---------------------------------------------------------------------------
// Strategic-policy impact surface
// ---------------------------------------------------------------------------

struct ImpactSurface {
    std::vector<double> intensity;                  // x axis
    std::vector<double> activation;                 // y axis
    std::vector<std::vector<double>> suppression;   // S(x,y), row-major by intensity; NaN = invalid cell
};

namespace detail {

inline bool signal_is_suppressive(const PolicySignal& signal, const TimeGrid& grid) {
    for (std::size_t i = 0; i < grid.points; ++i)
        if (eval_signal(signal, grid.time(i)) < -1e-12) return true;
    return false;
}

/// Scales the amplitude parameters of a signal by y. Sigmoids carry no
/// amplitude and evaluate in (0,1), so they are never suppressive and never
/// scaled.
inline PolicySignal scale_signal_amplitude(PolicySignal signal, double y) {
    std::visit(overloaded{
                   [&](ConstantSignal& s) { s.value *= y; },
                   [&](StepSignal& s) { s.value *= y; },
                   [&](SigmoidSignal&) {},
                   [&](SsifSignal& s) {
                       s.base_amp *= y;
                       s.pulse_amp *= y;
                   },
                   [&](PiecewiseLinearSignal& s) {
                       for (auto& [t, v] : s.knots) v *= y;
                   },
               },
               signal.shape);
    return signal;
}

inline double suppression_score(const SimulationResult& sim, const RegCapGraph& graph) {
    const auto caps = graph.ids_of(LayerKind::Capability);
    if (caps.empty() || sim.grid.points < 2) return 0.0;

    // 1 - time-averaged mean capability level (trapezoid)
    double integral = 0.0;
    for (std::size_t i = 0; i + 1 < sim.grid.points; ++i) {
        double mean_a = 0.0, mean_b = 0.0;
        for (const auto& id : caps) {
            const auto& values = sim.trajectories.at(id).values;
            mean_a += values[i];
            mean_b += values[i + 1];
        }
        mean_a /= static_cast<double>(caps.size());
        mean_b /= static_cast<double>(caps.size());
        integral += 0.5 * sim.grid.step * (mean_a + mean_b);
    }
    return std::clamp(1.0 - integral / sim.grid.span(), 0.0, 1.0);
}

}  // namespace detail

/// Sweeps (intensity x, activation y): event severities scale by x,
/// suppressive-signal amplitudes by y; each cell runs the scenario's model
/// and scores S = 1 - time-averaged mean capability level. Cells failing
/// validation are NaN. Cells are independent; execution order never affects
/// the assembled grid.
inline ImpactSurface impact_surface(const Scenario& base, const std::vector<double>& intensity_axis,
                                    const std::vector<double>& activation_axis, unsigned n_threads = 1) {
    if (intensity_axis.size() < 2 || activation_axis.size() < 2)
        fail(ErrorCode::InvalidParameter, "surface axes need at least 2 points each");

    ImpactSurface surface;
    surface.intensity = intensity_axis;
    surface.activation = activation_axis;
    surface.suppression.assign(intensity_axis.size(),
                               std::vector<double>(activation_axis.size(), std::numeric_limits<double>::quiet_NaN()));

    const TimeGrid grid = base.grid();
    std::vector<bool> suppressive(base.signals.size());
    for (std::size_t s = 0; s < base.signals.size(); ++s)
        suppressive[s] = detail::signal_is_suppressive(base.signals[s], grid);

    auto cell = [&](std::size_t ix, std::size_t iy) {
        Scenario scenario = base;
        for (auto& event : scenario.events) event.severity *= intensity_axis[ix];
        for (std::size_t s = 0; s < scenario.signals.size(); ++s)
            if (suppressive[s])
                scenario.signals[s] = detail::scale_signal_amplitude(scenario.signals[s], activation_axis[iy]);
        if (!validate_scenario(scenario).ok()) return;  // leave NaN
        const SimulationResult sim = run_simulation(scenario);
        surface.suppression[ix][iy] = detail::suppression_score(sim, scenario.graph);
    };

    const std::size_t total = intensity_axis.size() * activation_axis.size();
    if (n_threads <= 1) {
        for (std::size_t i = 0; i < total; ++i) cell(i / activation_axis.size(), i % activation_axis.size());
    } else {
        std::atomic<std::size_t> next{0};
        auto worker = [&]() {
            for (std::size_t i = next.fetch_add(1); i < total; i = next.fetch_add(1))
                cell(i / activation_axis.size(), i % activation_axis.size());
        };
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < n_threads; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    return surface;
}

/// Inclusive linear axis, n >= 2 points.
inline std::vector<double> linspace(double from, double to, std::size_t n) {
    if (n < 2) fail(ErrorCode::InvalidParameter, "axis needs at least 2 points");
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i)
        out[i] = from + (to - from) * static_cast<double>(i) / static_cast<double>(n - 1);
    return out;
}

}  // namespace regcap
