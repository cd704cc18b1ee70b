#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include "regcap/analysis.hpp"
#include "regcap/scenario_io.hpp"
#include "regcap/version.hpp"

namespace regcap {

// ---------------------------------------------------------------------------
// Deterministic file artifacts: trajectory CSV, analysis JSON, surface CSV,
// run manifest.
// ---------------------------------------------------------------------------

/// Fixed 9-significant-digit formatting so output bytes are reproducible.
inline std::string format_number(double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

/// FNV-1a 64-bit over raw bytes; platform-independent content digest.
inline std::string content_digest(const std::string& bytes) {
    std::uint64_t hash = 14695981039346656037ull;
    for (unsigned char c : bytes) {
        hash ^= c;
        hash *= 1099511628211ull;
    }
    char buf[24];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(hash));
    return std::string("fnv1a64:") + buf;
}

struct RunManifest {
    std::string tool_version = kVersion;
    std::string scenario_digest;
    std::string command;
    json parameters = json::object();
    double wall_time_seconds = 0.0;
};

inline json manifest_to_json(const RunManifest& manifest) {
    json j;
    j["tool_version"] = manifest.tool_version;
    j["scenario_digest"] = manifest.scenario_digest;
    j["command"] = manifest.command;
    j["parameters"] = manifest.parameters;
    j["wall_time_seconds"] = manifest.wall_time_seconds;
    return j;
}

inline void write_manifest(const RunManifest& manifest, const std::string& path) {
    write_file(path, manifest_to_json(manifest).dump(2) + "\n");
}

// ---- trajectory CSV -------------------------------------------------------

/// Header `t,<node ids sorted lexicographically>`, one row per grid point,
/// 9 significant digits, LF line endings.
inline void write_timeseries(const SimulationResult& result, const std::string& path) {
    if (result.trajectories.empty()) fail(ErrorCode::InvalidParameter, "simulation result has no trajectories");

    std::string out = "t";
    for (const auto& [id, traj] : result.trajectories) {
        (void)traj;
        out += "," + id;
    }
    out += "\n";
    for (std::size_t i = 0; i < result.grid.points; ++i) {
        out += format_number(result.grid.time(i));
        for (const auto& [id, traj] : result.trajectories) {
            (void)id;
            out += "," + format_number(traj.values[i]);
        }
        out += "\n";
    }
    write_file(path, out);
}

inline void write_events(const SimulationResult& result, const std::string& path) {
    std::string out = "t,kind,node_id\n";
    for (const auto& event : result.event_log)
        out += format_number(event.t) + "," + to_string(event.kind) + "," + event.node_id + "\n";
    write_file(path, out);
}

// ---- analysis JSON ---------------------------------------------------------

struct AnalysisOutputs {
    std::optional<std::vector<LagWindowReport>> lag_windows;
    std::optional<OverlapMatrix> overlap;
    std::optional<CovarianceReport> covariance;
    std::optional<std::vector<SczCluster>> scz;
    std::optional<std::vector<ChannelScore>> channels;
    std::optional<ImpactSurface> surface;
};

namespace detail {

inline void put_censored(json& j, const char* key, const char* flag_key, const CensoredTime& value) {
    if (value.censored)
        j[key] = nullptr;
    else
        j[key] = value.value;
    j[flag_key] = value.censored;
}

}  // namespace detail

inline json analysis_to_json(const AnalysisOutputs& outputs) {
    json j = json::object();
    if (outputs.lag_windows) {
        json rows = json::array();
        for (const auto& report : *outputs.lag_windows) {
            json row;
            row["capability_id"] = report.capability_id;
            detail::put_censored(row, "lag_window_lw", "lag_window_censored", report.lag_window);
            detail::put_censored(row, "collapse_time_tc", "collapse_time_censored", report.collapse_time);
            row["t_max_decline"] = report.t_max_decline;
            row["max_decline_rate"] = report.max_decline_rate;
            row["rupture_score"] = report.rupture_score;
            rows.push_back(std::move(row));
        }
        j["lag_windows"] = std::move(rows);
    }
    if (outputs.overlap) {
        json o;
        o["row_ids"] = outputs.overlap->row_ids;
        o["col_ids"] = outputs.overlap->col_ids;
        o["entries"] = outputs.overlap->entries;
        j["overlap"] = std::move(o);
    }
    if (outputs.covariance) {
        json c;
        c["ids"] = outputs.covariance->ids;
        c["covariance"] = outputs.covariance->covariance;
        c["correlation"] = outputs.covariance->correlation;
        json degenerate = json::array();
        for (std::size_t i = 0; i < outputs.covariance->ids.size(); ++i)
            if (outputs.covariance->degenerate[i]) degenerate.push_back(outputs.covariance->ids[i]);
        c["degenerate_ids"] = std::move(degenerate);
        json bands = json::array();
        for (const auto& band : outputs.covariance->coupled_bands) {
            json b;
            b["first"] = band.first;
            b["second"] = band.second;
            b["correlation"] = band.correlation;
            bands.push_back(std::move(b));
        }
        c["coupled_bands"] = std::move(bands);
        j["covariance"] = std::move(c);
    }
    if (outputs.scz) {
        json clusters = json::array();
        for (const auto& cluster : *outputs.scz) {
            json c;
            c["members"] = cluster.members;
            c["mean_overlap"] = cluster.mean_overlap;
            c["mean_correlation"] = cluster.mean_correlation;
            c["min_lag_window"] = cluster.min_lag_window;
            clusters.push_back(std::move(c));
        }
        j["scz"] = std::move(clusters);
    }
    if (outputs.channels) {
        json rows = json::array();
        for (const auto& score : *outputs.channels) {
            json row;
            row["path"] = score.channel.path;
            row["p_collapse"] = score.p_collapse;
            row["v_strategic"] = score.v_strategic;
            row["i_policy"] = score.i_policy;
            row["d"] = score.d;
            rows.push_back(std::move(row));
        }
        j["channels"] = std::move(rows);
    }
    if (outputs.surface) {
        json s;
        s["intensity"] = outputs.surface->intensity;
        s["activation"] = outputs.surface->activation;
        s["suppression"] = outputs.surface->suppression;  // NaN -> null
        j["surface"] = std::move(s);
    }
    return j;
}

inline void write_analysis(const AnalysisOutputs& outputs, const std::string& path) {
    write_file(path, analysis_to_json(outputs).dump(2) + "\n");
}

/// Long-format heatmap CSV: intensity,activation,suppression.
inline void write_surface_csv(const ImpactSurface& surface, const std::string& path) {
    std::string out = "intensity,activation,suppression\n";
    for (std::size_t ix = 0; ix < surface.intensity.size(); ++ix)
        for (std::size_t iy = 0; iy < surface.activation.size(); ++iy)
            out += format_number(surface.intensity[ix]) + "," + format_number(surface.activation[iy]) + "," +
                   format_number(surface.suppression[ix][iy]) + "\n";
    write_file(path, out);
}

}  // namespace regcap
