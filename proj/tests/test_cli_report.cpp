#include <doctest.h>

#include <cmath>
#include <fstream>
#include <sstream>

#include "regcap/cli.hpp"
#include "test_support.hpp"

using namespace regcap;
using testsupport::fixture_path;
using testsupport::temp_dir;

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, sep)) out.push_back(field);
    return out;
}

std::vector<std::vector<std::string>> read_csv(const std::string& path) {
    std::vector<std::vector<std::string>> rows;
    std::ifstream in(path);
    REQUIRE(in.good());
    std::string line;
    while (std::getline(in, line)) rows.push_back(split(line, ','));
    return rows;
}

}  // namespace

TEST_CASE("load_scenario surfaces the reference decay and lag parameters") {
    const Scenario s = load_scenario(fixture_path("baseline_ode.json"));
    CHECK(s.dynamics.gamma_of("ISR") == doctest::Approx(0.35));
    CHECK(s.dynamics.tau_of("policy_1") == doctest::Approx(4.0));
    CHECK(s.dynamics.theta_of("StrategicMobility", "policy_1") == doctest::Approx(0.6));
    CHECK(s.model == ModelKind::LaggedOde);
}

TEST_CASE("write_timeseries emits one column per node and one row per grid point") {
    Scenario s;
    s.graph.add_capability("alpha", {0.4, 0.9, 1.0, 0.5});
    s.graph.add_capability("bravo", {0.4, 0.9, 1.0, 0.5});
    s.horizon = 1.0;
    s.step = 0.5;
    const auto result = simulate_ode(s);

    const auto dir = temp_dir("csv");
    write_timeseries(result, dir + "/timeseries.csv");
    const auto rows = read_csv(dir + "/timeseries.csv");
    REQUIRE(rows.size() == 4);  // header + 3 grid points
    CHECK(rows[0] == std::vector<std::string>{"t", "alpha", "bravo"});
    for (std::size_t r = 1; r < rows.size(); ++r) CHECK(rows[r].size() == 3);
}

TEST_CASE("write_timeseries is byte-deterministic") {
    const Scenario s = load_scenario(fixture_path("baseline_ode.json"));
    const auto result = run_simulation(s);
    const auto dir = temp_dir("det");
    write_timeseries(result, dir + "/a.csv");
    write_timeseries(result, dir + "/b.csv");
    CHECK(read_file(dir + "/a.csv") == read_file(dir + "/b.csv"));
}

TEST_CASE("pure-decay CSV reparses to the closed form within 1e-6") {
    const Scenario s = load_scenario(fixture_path("pure_decay.json"));
    const auto result = run_simulation(s);
    const auto dir = temp_dir("decay");
    write_timeseries(result, dir + "/timeseries.csv");

    const auto rows = read_csv(dir + "/timeseries.csv");
    const auto& header = rows[0];
    std::size_t col = 0;
    for (std::size_t i = 0; i < header.size(); ++i)
        if (header[i] == "ISR") col = i;
    REQUIRE(col > 0);
    for (std::size_t r = 1; r < rows.size(); ++r) {
        const double t = std::stod(rows[r][0]);
        const double v = std::stod(rows[r][col]);
        CHECK(std::abs(v - std::exp(-0.35 * t)) < 1e-6);
    }
}

TEST_CASE("events CSV lists interpolated threshold crossings") {
    const Scenario s = load_scenario(fixture_path("isr_collapse_piecewise.json"));
    const auto result = run_simulation(s);
    const auto dir = temp_dir("events");
    write_events(result, dir + "/events.csv");
    const auto rows = read_csv(dir + "/events.csv");
    REQUIRE(rows.size() >= 2);
    CHECK(rows[0] == std::vector<std::string>{"t", "kind", "node_id"});
    bool collapse = false;
    for (std::size_t r = 1; r < rows.size(); ++r)
        if (rows[r][1] == "collapse" && rows[r][2] == "ISR") {
            collapse = true;
            CHECK(std::stod(rows[r][0]) == doctest::Approx(6.0).epsilon(0.002));
        }
    CHECK(collapse);
}

TEST_CASE("analysis JSON carries the calibrated lag window and collapse point") {
    const Scenario s = load_scenario(fixture_path("isr_collapse_piecewise.json"));
    const auto sim = run_simulation(s);
    AnalysisOutputs outputs;
    outputs.lag_windows = lag_window_reports(s.graph, sim);

    const auto dir = temp_dir("analysis");
    write_analysis(outputs, dir + "/analysis.json");
    const json j = json::parse(read_file(dir + "/analysis.json"));
    REQUIRE(j.contains("lag_windows"));
    REQUIRE(j["lag_windows"].size() == 1);
    const auto& row = j["lag_windows"][0];
    CHECK(row["capability_id"] == "ISR");
    CHECK(row["lag_window_lw"].get<double>() == doctest::Approx(5.5).epsilon(0.002));
    CHECK(row["collapse_time_tc"].get<double>() == doctest::Approx(6.0).epsilon(0.0017));
    CHECK(row["lag_window_censored"] == false);
    CHECK(row["collapse_time_censored"] == false);
}

TEST_CASE("censored diagnostics serialize as null plus a flag") {
    Scenario s;
    s.graph.add_capability("steady", {0.4, 0.9, 1.0, 0.5});
    s.horizon = 12.0;
    s.step = 0.5;
    const auto sim = simulate_ode(s);
    AnalysisOutputs outputs;
    outputs.lag_windows = lag_window_reports(s.graph, sim);

    const auto dir = temp_dir("censored");
    write_analysis(outputs, dir + "/analysis.json");
    const json j = json::parse(read_file(dir + "/analysis.json"));
    const auto& row = j["lag_windows"][0];
    CHECK(row["collapse_time_tc"].is_null());
    CHECK(row["collapse_time_censored"] == true);
    CHECK(row["lag_window_lw"].is_null());
    CHECK(row["lag_window_censored"] == true);
}

TEST_CASE("empty analysis serializes as an empty object") {
    const auto dir = temp_dir("empty");
    write_analysis(AnalysisOutputs{}, dir + "/analysis.json");
    CHECK(read_file(dir + "/analysis.json") == "{}\n");
}

TEST_CASE("channel scores reparse to the exact weighted sum") {
    const Scenario s = load_scenario(fixture_path("channel_ranking.json"));
    const auto sim = run_simulation(s);
    AnalysisOutputs outputs;
    outputs.channels = rank_channels(s.graph, sim, {0.5, 0.3, 0.2});

    const auto dir = temp_dir("channels");
    write_analysis(outputs, dir + "/analysis.json");
    const json j = json::parse(read_file(dir + "/analysis.json"));
    REQUIRE(j.contains("channels"));
    for (const auto& row : j["channels"]) {
        const double d = 0.5 * row["p_collapse"].get<double>() + 0.3 * row["v_strategic"].get<double>() +
                         0.2 * row["i_policy"].get<double>();
        CHECK(row["d"].get<double>() == doctest::Approx(d).epsilon(1e-12));
    }
}

TEST_CASE("content digest is stable and sensitive to single-byte changes") {
    const std::string bytes = read_file(fixture_path("baseline_ode.json"));
    CHECK(content_digest(bytes) == content_digest(bytes));
    CHECK(content_digest(bytes) != content_digest(bytes + " "));
    CHECK(content_digest("").rfind("fnv1a64:", 0) == 0);
}

// ---- CLI ----------------------------------------------------------------------

TEST_CASE("cli validate exits 0 on a clean scenario and 1 on a broken one") {
    CHECK(cli::run({"validate", fixture_path("baseline_ode.json")}) == 0);

    const auto dir = temp_dir("cli_validate");
    write_file(dir + "/bad.json", R"({"graph":{"nodes":[],"edges":[]},"horizon":12,"step":44.0})");
    CHECK(cli::run({"validate", dir + "/bad.json"}) == 1);
    write_file(dir + "/unparseable.json", "{nope");
    CHECK(cli::run({"validate", dir + "/unparseable.json"}) == 1);
}

TEST_CASE("cli simulate without --scenario is a usage error") {
    CHECK(cli::run({"simulate"}) == 2);
    CHECK(cli::run({"frobnicate"}) == 2);
    CHECK(cli::run({}) == 2);
}

TEST_CASE("cli simulate writes timeseries, events and manifest") {
    const auto dir = temp_dir("cli_sim");
    CHECK(cli::run({"simulate", "--scenario", fixture_path("baseline_ode.json"), "--out", dir}) == 0);
    CHECK(std::filesystem::exists(dir + "/timeseries.csv"));
    CHECK(std::filesystem::exists(dir + "/events.csv"));
    const json manifest = json::parse(read_file(dir + "/manifest.json"));
    CHECK(manifest["command"] == "simulate");
    CHECK(manifest["scenario_digest"] == content_digest(read_file(fixture_path("baseline_ode.json"))));
}

TEST_CASE("cli simulate honors the --step override and rejects bad overrides") {
    const auto dir = temp_dir("cli_step");
    CHECK(cli::run({"simulate", "--scenario", fixture_path("pure_decay.json"), "--out", dir, "--step", "0.5"}) == 0);
    const auto rows = read_csv(dir + "/timeseries.csv");
    CHECK(rows.size() == 1 + 25);  // header + 12/0.5 + 1 points
    CHECK(cli::run({"simulate", "--scenario", fixture_path("pure_decay.json"), "--out", dir, "--step", "9.9"}) == 1);
}

TEST_CASE("cli analyze reproduces the calibrated collapse point end to end") {
    const auto dir = temp_dir("cli_analyze");
    CHECK(cli::run({"analyze", "--scenario", fixture_path("isr_collapse_piecewise.json"), "--out", dir}) == 0);
    const json j = json::parse(read_file(dir + "/analysis.json"));
    REQUIRE(j.contains("lag_windows"));
    const auto& row = j["lag_windows"][0];
    CHECK(row["capability_id"] == "ISR");
    CHECK(row["collapse_time_tc"].get<double>() == doctest::Approx(6.0).epsilon(0.0017));
    CHECK(row["lag_window_lw"].get<double>() == doctest::Approx(5.5).epsilon(0.002));
}

TEST_CASE("cli analyze emits overlap, covariance and scz sections when possible") {
    const auto dir = temp_dir("cli_scz");
    CHECK(cli::run({"analyze", "--scenario", fixture_path("shared_dependency.json"), "--out", dir}) == 0);
    const json j = json::parse(read_file(dir + "/analysis.json"));
    REQUIRE(j.contains("overlap"));
    REQUIRE(j.contains("covariance"));
    REQUIRE(j.contains("scz"));

    bool coupled = false;
    for (const auto& band : j["covariance"]["coupled_bands"])
        if (band["first"] == "AI-Targeting" && band["second"] == "ISR") coupled = true;
    CHECK(coupled);

    REQUIRE(j["scz"].size() == 1);
    CHECK(j["scz"][0]["members"] == json::array({"AI-Targeting", "ISR"}));
    CHECK(j["covariance"]["degenerate_ids"] == json::array({"CyberDefense"}));
}

TEST_CASE("cli channels ranks the collapsing channel first") {
    const auto dir = temp_dir("cli_channels");
    CHECK(cli::run({"channels", "--scenario", fixture_path("channel_ranking.json"), "--alpha", "0.5", "--beta",
                    "0.3", "--gamma", "0.2", "--out", dir}) == 0);
    const json j = json::parse(read_file(dir + "/analysis.json"));
    REQUIRE(j.contains("channels"));
    CHECK(j["channels"][0]["path"][0] == "Nd");
    CHECK(j["channels"][0]["p_collapse"].get<double>() == 1.0);
}

TEST_CASE("cli surface writes the long-format grid and the analysis section") {
    const auto dir = temp_dir("cli_surface");
    CHECK(cli::run({"surface", "--scenario", fixture_path("monotone_sweep.json"), "--intensity", "0:1:4",
                    "--activation", "0:1:3", "--out", dir}) == 0);
    const auto rows = read_csv(dir + "/surface.csv");
    REQUIRE(rows.size() == 1 + 4 * 3);
    CHECK(rows[0] == std::vector<std::string>{"intensity", "activation", "suppression"});
    const json j = json::parse(read_file(dir + "/analysis.json"));
    REQUIRE(j.contains("surface"));
    CHECK(j["surface"]["intensity"].size() == 4);
    CHECK(j["surface"]["suppression"].size() == 4);

    CHECK(cli::run({"surface", "--scenario", fixture_path("monotone_sweep.json"), "--intensity", "zap",
                    "--activation", "0:1:3", "--out", dir}) == 2);
}

TEST_CASE("cli generate emits a scenario that validates and simulates") {
    const auto dir = temp_dir("cli_generate");
    const auto file = dir + "/generated.json";
    CHECK(cli::run({"generate", "--resources", "5", "--equipment", "3", "--generations", "2", "--capabilities",
                    "2", "--exponent", "3.0", "--seed", "42", "--out", file}) == 0);
    CHECK(cli::run({"validate", file}) == 0);
    CHECK(cli::run({"simulate", "--scenario", file, "--out", dir + "/run"}) == 0);

    // identical seeds produce byte-identical scenario files
    const auto file2 = dir + "/generated2.json";
    CHECK(cli::run({"generate", "--resources", "5", "--equipment", "3", "--generations", "2", "--capabilities",
                    "2", "--exponent", "3.0", "--seed", "42", "--out", file2}) == 0);
    CHECK(read_file(file) == read_file(file2));

    CHECK(cli::run({"generate", "--resources", "5", "--equipment", "3", "--generations", "2", "--capabilities",
                    "2", "--exponent", "0.5", "--seed", "42", "--out", file}) == 1);
}

TEST_CASE("manifest digest tracks scenario bytes exactly") {
    const auto dir = temp_dir("digest");
    const auto copy = dir + "/scenario.json";
    write_file(copy, read_file(fixture_path("pure_decay.json")));

    CHECK(cli::run({"simulate", "--scenario", copy, "--out", dir + "/run1"}) == 0);
    CHECK(cli::run({"simulate", "--scenario", copy, "--out", dir + "/run2"}) == 0);
    const json m1 = json::parse(read_file(dir + "/run1/manifest.json"));
    const json m2 = json::parse(read_file(dir + "/run2/manifest.json"));
    CHECK(m1["scenario_digest"] == m2["scenario_digest"]);

    write_file(copy, read_file(fixture_path("pure_decay.json")) + "\n");
    CHECK(cli::run({"simulate", "--scenario", copy, "--out", dir + "/run3"}) == 0);
    const json m3 = json::parse(read_file(dir + "/run3/manifest.json"));
    CHECK(m1["scenario_digest"] != m3["scenario_digest"]);
}
