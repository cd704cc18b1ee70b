#pragma once

#include <chrono>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "regcap/report.hpp"

namespace regcap::cli {

// ---------------------------------------------------------------------------
// Subcommands: validate, simulate, analyze, channels, surface, generate.
// Exit codes: 0 success, 1 validation/run failure, 2 usage error.
// ---------------------------------------------------------------------------

namespace detail {

struct UsageFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline std::vector<double> parse_axis(const std::string& text) {
    // "<from>:<to>:<points>"
    const auto first = text.find(':');
    const auto second = text.find(':', first == std::string::npos ? first : first + 1);
    if (first == std::string::npos || second == std::string::npos)
        throw UsageFailure("axis '" + text + "' must be <from>:<to>:<points>");
    try {
        const double from = std::stod(text.substr(0, first));
        const double to = std::stod(text.substr(first + 1, second - first - 1));
        const long points = std::stol(text.substr(second + 1));
        if (points < 2) throw UsageFailure("axis '" + text + "' needs at least 2 points");
        return linspace(from, to, static_cast<std::size_t>(points));
    } catch (const UsageFailure&) {
        throw;
    } catch (const std::exception&) {
        throw UsageFailure("axis '" + text + "' must be <from>:<to>:<points>");
    }
}

class Stopwatch {
public:
    Stopwatch() : start_(std::chrono::steady_clock::now()) {}
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_;
};

inline void ensure_out_dir(const std::string& out) {
    std::error_code ec;
    std::filesystem::create_directories(out, ec);
    if (ec) fail(ErrorCode::IoError, "cannot create output directory '" + out + "'");
}

inline RunManifest make_manifest(const std::string& command, const std::string& scenario_path, json parameters) {
    RunManifest manifest;
    manifest.command = command;
    manifest.scenario_digest = scenario_path.empty() ? "" : content_digest(read_file(scenario_path));
    manifest.parameters = std::move(parameters);
    return manifest;
}

inline std::string join_path(const std::string& dir, const char* name) {
    return (std::filesystem::path(dir) / name).string();
}

}  // namespace detail

// ---- handlers ---------------------------------------------------------------

inline int cmd_validate(const std::string& scenario_path) {
    Scenario scenario;
    try {
        scenario = parse_scenario_text(read_file(scenario_path));
    } catch (const Error& e) {
        std::cerr << e.what() << "\n";
        return 1;
    }
    const ValidationReport report = validate_scenario(scenario);
    std::cerr << report.to_string();
    if (!report.ok()) return 1;
    std::cout << "OK: " << scenario_path << "\n";
    return 0;
}

inline int cmd_simulate(const std::string& scenario_path, const std::string& out, std::optional<double> step) {
    detail::Stopwatch watch;
    Scenario scenario = load_scenario(scenario_path);
    if (step) {
        scenario.step = *step;
        const ValidationReport report = validate_scenario(scenario);
        if (!report.ok()) fail(ErrorCode::ValidationFailed, "step override\n" + report.to_string());
    }
    const SimulationResult result = run_simulation(scenario);

    detail::ensure_out_dir(out);
    write_timeseries(result, detail::join_path(out, "timeseries.csv"));
    write_events(result, detail::join_path(out, "events.csv"));

    json parameters;
    parameters["scenario"] = scenario_path;
    parameters["step"] = scenario.step;
    RunManifest manifest = detail::make_manifest("simulate", scenario_path, std::move(parameters));
    manifest.wall_time_seconds = watch.seconds();
    write_manifest(manifest, detail::join_path(out, "manifest.json"));
    return 0;
}

struct AnalyzeOptions {
    std::optional<double> theta_col;
    double stability = 0.9;
    double band_threshold = 0.8;
    SczThresholds scz;
};

inline int cmd_analyze(const std::string& scenario_path, const std::string& out, const AnalyzeOptions& options) {
    detail::Stopwatch watch;
    const Scenario scenario = load_scenario(scenario_path);
    const SimulationResult sim = run_simulation(scenario);

    AnalysisOutputs outputs;
    outputs.lag_windows = lag_window_reports(scenario.graph, sim, options.theta_col, options.stability);

    const auto caps = scenario.graph.ids_of(LayerKind::Capability);
    std::vector<Trajectory> cap_trajectories;
    for (const auto& id : caps) cap_trajectories.push_back(sim.trajectories.at(id));
    if (cap_trajectories.size() >= 2)
        outputs.covariance = response_covariance(cap_trajectories, options.band_threshold);

    // Capability-vs-capability overlap over shared upstream routes.
    const auto routes = upstream_route_sets(scenario.graph);
    if (!routes.empty()) outputs.overlap = path_overlap_matrix(routes);

    // SCZ needs a consistent id set: capabilities that carry channels.
    if (routes.size() >= 2) {
        std::vector<Trajectory> scz_trajectories;
        std::vector<LagWindowReport> scz_lags;
        for (const auto& [id, paths] : routes) {
            (void)paths;
            scz_trajectories.push_back(sim.trajectories.at(id));
            for (const auto& report : *outputs.lag_windows)
                if (report.capability_id == id) scz_lags.push_back(report);
        }
        const CovarianceReport scz_cov = response_covariance(scz_trajectories, options.band_threshold);
        outputs.scz = identify_scz(*outputs.overlap, scz_cov, scz_lags, options.scz);
    }

    detail::ensure_out_dir(out);
    write_analysis(outputs, detail::join_path(out, "analysis.json"));

    json parameters;
    parameters["scenario"] = scenario_path;
    if (options.theta_col) parameters["theta_col"] = *options.theta_col;
    parameters["stability"] = options.stability;
    parameters["band_threshold"] = options.band_threshold;
    parameters["overlap_min"] = options.scz.overlap_min;
    parameters["corr_min"] = options.scz.corr_min;
    parameters["lag_max"] = options.scz.lag_max;
    RunManifest manifest = detail::make_manifest("analyze", scenario_path, std::move(parameters));
    manifest.wall_time_seconds = watch.seconds();
    write_manifest(manifest, detail::join_path(out, "manifest.json"));
    return 0;
}

inline int cmd_channels(const std::string& scenario_path, const std::string& out, const DeterrenceWeights& weights) {
    detail::Stopwatch watch;
    const Scenario scenario = load_scenario(scenario_path);
    const SimulationResult sim = run_simulation(scenario);

    AnalysisOutputs outputs;
    outputs.channels = rank_channels(scenario.graph, sim, weights);

    detail::ensure_out_dir(out);
    write_analysis(outputs, detail::join_path(out, "analysis.json"));

    json parameters;
    parameters["scenario"] = scenario_path;
    parameters["alpha"] = weights.alpha;
    parameters["beta"] = weights.beta;
    parameters["gamma"] = weights.gamma;
    RunManifest manifest = detail::make_manifest("channels", scenario_path, std::move(parameters));
    manifest.wall_time_seconds = watch.seconds();
    write_manifest(manifest, detail::join_path(out, "manifest.json"));
    return 0;
}

inline int cmd_surface(const std::string& scenario_path, const std::string& out, const std::string& intensity_spec,
                       const std::string& activation_spec, unsigned threads) {
    detail::Stopwatch watch;
    const auto intensity = detail::parse_axis(intensity_spec);
    const auto activation = detail::parse_axis(activation_spec);

    const Scenario scenario = load_scenario(scenario_path);
    const ImpactSurface surface = impact_surface(scenario, intensity, activation, threads);

    detail::ensure_out_dir(out);
    write_surface_csv(surface, detail::join_path(out, "surface.csv"));
    AnalysisOutputs outputs;
    outputs.surface = surface;
    write_analysis(outputs, detail::join_path(out, "analysis.json"));

    json parameters;
    parameters["scenario"] = scenario_path;
    parameters["intensity"] = intensity_spec;
    parameters["activation"] = activation_spec;
    parameters["threads"] = threads;
    RunManifest manifest = detail::make_manifest("surface", scenario_path, std::move(parameters));
    manifest.wall_time_seconds = watch.seconds();
    write_manifest(manifest, detail::join_path(out, "manifest.json"));
    return 0;
}

struct GenerateOptions {
    std::size_t resources = 4;
    std::size_t equipment = 2;
    std::size_t generations = 2;
    std::size_t capabilities = 2;
    double exponent = 3.0;
    std::int64_t seed = 0;
};

inline int cmd_generate(const GenerateOptions& options, const std::string& out_file) {
    Scenario scenario;
    scenario.graph = generate_power_law_graph(options.resources, options.equipment, options.generations,
                                              options.capabilities, options.exponent,
                                              static_cast<std::uint64_t>(options.seed));
    scenario.horizon = 12.0;
    scenario.step = 0.01;
    scenario.model = ModelKind::LaggedOde;
    scenario.seed = options.seed;
    for (const auto& cap : scenario.graph.ids_of(LayerKind::Capability)) scenario.dynamics.gamma[cap] = 0.35;
    save_scenario(scenario, out_file);
    std::cout << "wrote " << out_file << "\n";
    return 0;
}

// ---- entry point -------------------------------------------------------------

inline int run(int argc, const char* const* argv) {
    CLI::App app{"Layered resource->equipment->generation->capability disruption simulator"};
    app.require_subcommand(1);

    std::string scenario_path, out_dir, out_file;
    std::optional<double> step_override;
    AnalyzeOptions analyze_options;
    double theta_col = -1.0;
    DeterrenceWeights weights;
    std::string intensity_spec = "0:1:21", activation_spec = "0:1:21";
    unsigned threads = 1;
    GenerateOptions generate_options;

    auto* validate = app.add_subcommand("validate", "Validate a scenario file");
    validate->add_option("scenario", scenario_path, "scenario JSON file")->required();

    auto* simulate = app.add_subcommand("simulate", "Run a simulation and write CSV artifacts");
    simulate->add_option("--scenario", scenario_path, "scenario JSON file")->required();
    simulate->add_option("--out", out_dir, "output directory")->required();
    simulate->add_option("--step", step_override, "override the scenario grid step (years)");

    auto* analyze = app.add_subcommand("analyze", "Run a simulation and write the analysis report");
    analyze->add_option("--scenario", scenario_path, "scenario JSON file")->required();
    analyze->add_option("--out", out_dir, "output directory")->required();
    analyze->add_option("--theta-col", theta_col, "collapse threshold override");
    analyze->add_option("--stability", analyze_options.stability, "lag-window stability level");
    analyze->add_option("--band-threshold", analyze_options.band_threshold, "coupled-band correlation threshold");
    analyze->add_option("--overlap-min", analyze_options.scz.overlap_min, "SCZ minimum pairwise overlap");
    analyze->add_option("--corr-min", analyze_options.scz.corr_min, "SCZ minimum pairwise correlation");
    analyze->add_option("--lag-max", analyze_options.scz.lag_max, "SCZ maximum of the cluster's min lag window");

    auto* channels = app.add_subcommand("channels", "Rank resource->capability channels by deterrence weight");
    channels->add_option("--scenario", scenario_path, "scenario JSON file")->required();
    channels->add_option("--out", out_dir, "output directory")->required();
    channels->add_option("--alpha", weights.alpha, "weight of p_collapse");
    channels->add_option("--beta", weights.beta, "weight of v_strategic");
    channels->add_option("--gamma", weights.gamma, "weight of i_policy");

    auto* surface = app.add_subcommand("surface", "Sweep the policy-impact surface");
    surface->add_option("--scenario", scenario_path, "scenario JSON file")->required();
    surface->add_option("--out", out_dir, "output directory")->required();
    surface->add_option("--intensity", intensity_spec, "intensity axis <from>:<to>:<points>");
    surface->add_option("--activation", activation_spec, "activation axis <from>:<to>:<points>");
    surface->add_option("--threads", threads, "worker threads for surface cells");

    auto* generate = app.add_subcommand("generate", "Write a synthetic power-law scenario");
    generate->add_option("--resources", generate_options.resources, "resource count")->required();
    generate->add_option("--equipment", generate_options.equipment, "equipment count")->required();
    generate->add_option("--generations", generate_options.generations, "generation count")->required();
    generate->add_option("--capabilities", generate_options.capabilities, "capability count")->required();
    generate->add_option("--exponent", generate_options.exponent, "power-law exponent (> 1)")->required();
    generate->add_option("--seed", generate_options.seed, "generator seed")->required();
    generate->add_option("--out", out_file, "output scenario file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (validate->parsed()) return cmd_validate(scenario_path);
        if (simulate->parsed()) return cmd_simulate(scenario_path, out_dir, step_override);
        if (analyze->parsed()) {
            if (theta_col >= 0.0) analyze_options.theta_col = theta_col;
            return cmd_analyze(scenario_path, out_dir, analyze_options);
        }
        if (channels->parsed()) return cmd_channels(scenario_path, out_dir, weights);
        if (surface->parsed()) return cmd_surface(scenario_path, out_dir, intensity_spec, activation_spec, threads);
        if (generate->parsed()) return cmd_generate(generate_options, out_file);
    } catch (const detail::UsageFailure& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        std::cerr << e.what() << "\n";
        return 1;
    }
    return 2;
}

inline int run(const std::vector<std::string>& args) {
    std::vector<std::string> with_program{"regcap"};
    with_program.insert(with_program.end(), args.begin(), args.end());
    std::vector<const char*> argv;
    argv.reserve(with_program.size());
    for (const auto& arg : with_program) argv.push_back(arg.c_str());
    return run(static_cast<int>(argv.size()), argv.data());
}

}  // namespace regcap::cli
