#include <doctest.h>

#include <cmath>
#include <random>

#include "regcap/dynamics.hpp"
#include "test_support.hpp"

using namespace regcap;
using testsupport::reference_graph;

namespace {

// Single chain r -> e -> g -> c with configurable weights and delay.
Scenario chain_scenario(double omega, double delta, double delay, double sigma) {
    Scenario s;
    s.graph.add_resource("r");
    s.graph.add_equipment("e");
    s.graph.add_generation("g");
    s.graph.add_capability("c", {0.4, 0.9, 1.0, 0.5});
    s.graph.add_edge({"r", "e", omega, 0.0, 0.0});
    s.graph.add_edge({"e", "g", 1.0, delay, sigma});
    s.graph.add_edge({"g", "c", delta, 0.0, 0.0});
    s.horizon = 12.0;
    s.step = 0.01;
    return s;
}

Scenario pure_decay_scenario(double gamma, double step = 0.01) {
    Scenario s;
    s.graph.add_resource("r");
    s.graph.add_capability("c", {0.4, 0.9, 1.0, 0.5});
    s.horizon = 12.0;
    s.step = step;
    s.dynamics.gamma["c"] = gamma;
    return s;
}

double max_abs_error_vs_exp(const Trajectory& traj, double gamma) {
    double worst = 0.0;
    for (std::size_t i = 0; i < traj.values.size(); ++i)
        worst = std::max(worst, std::abs(traj.values[i] - std::exp(-gamma * traj.grid.time(i))));
    return worst;
}

}  // namespace

TEST_CASE("cascade_forcing is zero when every availability is 1") {
    const Scenario s = chain_scenario(1.0, 1.0, 0.0, 0.0);
    const auto forcing = cascade_forcing(s.graph, s, 3.0);
    CHECK(forcing.at("c") == doctest::Approx(0.0));
}

TEST_CASE("cascade_forcing unit chain under full cutoff") {
    Scenario s = chain_scenario(1.0, 1.0, 0.0, 0.0);
    s.events.push_back({"r", 0.0, 1.0, 0.0});
    CHECK(cascade_forcing(s.graph, s, 1.0).at("c") == doctest::Approx(-1.0));
}

TEST_CASE("cascade_forcing weights partial deficits by omega") {
    Scenario s;
    s.graph.add_resource("r1").add_resource("r2");
    s.graph.add_equipment("e");
    s.graph.add_generation("g");
    s.graph.add_capability("c", {0.4, 0.9, 1.0, 0.5});
    s.graph.add_edge({"r1", "e", 0.8, 0.0, 0.0});
    s.graph.add_edge({"r2", "e", 0.2, 0.0, 0.0});
    s.graph.add_edge({"e", "g", 1.0, 0.0, 0.0});
    s.graph.add_edge({"g", "c", 0.5, 0.0, 0.0});
    s.horizon = 12.0;
    s.events.push_back({"r1", 0.0, 1.0, 0.0});
    // s_e = 0.2, deficit 0.8, scaled by delta 0.5
    CHECK(cascade_forcing(s.graph, s, 2.0).at("c") == doctest::Approx(-0.4));
}

TEST_CASE("cascade delays hold forcing at zero until the deficit arrives") {
    Scenario s = chain_scenario(1.0, 1.0, 2.0, 0.0);
    s.events.push_back({"r", 1.0, 1.0, 0.0});
    CHECK(cascade_forcing(s.graph, s, 2.9).at("c") == doctest::Approx(0.0));
    CHECK(cascade_forcing(s.graph, s, 3.1).at("c") == doctest::Approx(-1.0));
}

TEST_CASE("substitution elasticity attenuates the effective delay") {
    Scenario s = chain_scenario(1.0, 1.0, 2.0, 0.5);  // effective delay 1.0
    s.events.push_back({"r", 1.0, 1.0, 0.0});
    CHECK(cascade_forcing(s.graph, s, 1.9).at("c") == doctest::Approx(0.0));
    CHECK(cascade_forcing(s.graph, s, 2.1).at("c") == doctest::Approx(-1.0));
}

TEST_CASE("pre-history convention: no deficit before t = 0") {
    Scenario s = chain_scenario(1.0, 1.0, 4.0, 0.0);
    s.events.push_back({"r", 0.0, 1.0, 0.0});
    // t - delay < 0 -> s_e = 1
    CHECK(cascade_forcing(s.graph, s, 3.0).at("c") == doctest::Approx(0.0));
}

TEST_CASE("simulate_ode matches the closed-form decay within 1e-6") {
    const Scenario s = pure_decay_scenario(0.35);
    const auto result = simulate_ode(s);
    const auto& traj = result.trajectories.at("c");
    CHECK(traj.values[100] == doctest::Approx(std::exp(-0.35)).epsilon(1e-6));
    CHECK(max_abs_error_vs_exp(traj, 0.35) < 1e-6);
}

TEST_CASE("simulate_ode with zero decay is stationary") {
    Scenario s = pure_decay_scenario(0.0);
    s.dynamics.c0["c"] = 0.75;
    const auto result = simulate_ode(s);
    for (double v : result.trajectories.at("c").values) CHECK(v == doctest::Approx(0.75));
}

TEST_CASE("RK4 order: halving the step shrinks the decay error by >= 12x") {
    const auto coarse = simulate_ode(pure_decay_scenario(0.35, 0.1));
    const auto fine = simulate_ode(pure_decay_scenario(0.35, 0.05));
    const double e_coarse = max_abs_error_vs_exp(coarse.trajectories.at("c"), 0.35);
    const double e_fine = max_abs_error_vs_exp(fine.trajectories.at("c"), 0.35);
    CHECK(e_coarse / e_fine >= 12.0);
}

TEST_CASE("lagged signal run equals the no-signal run before the lag arrives") {
    Scenario lagged = pure_decay_scenario(0.35);
    lagged.signals.push_back({"recovery", SigmoidSignal{5.0, 5.0}});
    lagged.dynamics.theta["c"]["recovery"] = 0.4;
    lagged.dynamics.tau["recovery"] = 2.0;

    const Scenario plain = pure_decay_scenario(0.35);

    const auto a = simulate_ode(lagged);
    const auto b = simulate_ode(plain);
    const auto& va = a.trajectories.at("c").values;
    const auto& vb = b.trajectories.at("c").values;
    // identical within 1e-9 on [0, 2): the shifted sigmoid tail is ~1e-11
    for (std::size_t i = 0; i * 0.01 < 2.0; ++i) CHECK(std::abs(va[i] - vb[i]) < 1e-9);
    // the recovery term lifts the trajectory well after the lag
    CHECK(va.back() > vb.back() + 0.05);
}

TEST_CASE("lag equivalence: lagging a sigmoid equals shifting its midpoint") {
    Scenario lagged = pure_decay_scenario(0.2);
    lagged.signals.push_back({"policy", SigmoidSignal{1.5, 3.0}});
    lagged.dynamics.theta["c"]["policy"] = 0.3;
    lagged.dynamics.tau["policy"] = 2.0;

    Scenario shifted = pure_decay_scenario(0.2);
    shifted.signals.push_back({"policy", SigmoidSignal{1.5, 5.0}});
    shifted.dynamics.theta["c"]["policy"] = 0.3;

    const auto a = simulate_ode(lagged).trajectories.at("c").values;
    const auto b = simulate_ode(shifted).trajectories.at("c").values;
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(std::abs(a[i] - b[i]) < 1e-9);
}

TEST_CASE("monotone collapse: no policy signals means non-increasing trajectories") {
    std::mt19937 rng(2024);
    auto unit = [&]() { return (rng() % 1000) / 999.0; };
    for (int trial = 0; trial < 30; ++trial) {
        Scenario s;
        s.graph = generate_power_law_graph(2 + rng() % 3, 1 + rng() % 2, 1 + rng() % 2, 1 + rng() % 2, 2.5, rng());
        s.horizon = 2.0;
        s.step = 0.05;
        for (const auto& cap : s.graph.ids_of(LayerKind::Capability)) s.dynamics.gamma[cap] = unit();
        for (const auto& res : s.graph.ids_of(LayerKind::Resource))
            if (rng() % 2 == 0) s.events.push_back({res, 1.5 * unit(), unit(), unit()});
        const auto result = simulate_ode(s);
        for (const auto& cap : s.graph.ids_of(LayerKind::Capability)) {
            const auto& values = result.trajectories.at(cap).values;
            for (std::size_t i = 1; i < values.size(); ++i) CHECK(values[i] <= values[i - 1] + 1e-12);
        }
    }
}

TEST_CASE("clamped and unclamped runs agree until the level exits [0,1]") {
    Scenario s = chain_scenario(1.0, 1.0, 0.0, 0.0);
    s.events.push_back({"r", 0.0, 1.0, 0.0});  // C declines at rate 1, hits 0 at t=1
    const auto clamped = simulate_ode(s);
    const auto raw = simulate_ode(s, OdeOptions{false});
    const auto& vc = clamped.trajectories.at("c").values;
    const auto& vr = raw.trajectories.at("c").values;
    std::size_t first_exit = vr.size();
    for (std::size_t i = 0; i < vr.size(); ++i)
        if (vr[i] < 0.0 || vr[i] > 1.0) {
            first_exit = i;
            break;
        }
    REQUIRE(first_exit < vr.size());
    for (std::size_t i = 0; i < first_exit; ++i) CHECK(vc[i] == vr[i]);
    for (std::size_t i = first_exit; i < vc.size(); ++i) CHECK(vc[i] >= 0.0);
    CHECK(vr.back() < 0.0);
    CHECK(vc.back() == 0.0);
}

TEST_CASE("identical scenarios give bit-identical results") {
    Scenario s = chain_scenario(0.9, 0.8, 1.0, 0.3);
    s.events.push_back({"r", 1.0, 0.7, 0.5});
    s.dynamics.gamma["c"] = 0.2;
    const auto a = simulate_ode(s);
    const auto b = simulate_ode(s);
    for (const auto& [id, traj] : a.trajectories) {
        const auto& other = b.trajectories.at(id).values;
        REQUIRE(traj.values.size() == other.size());
        for (std::size_t i = 0; i < other.size(); ++i) CHECK(traj.values[i] == other[i]);
    }
}

TEST_CASE("threshold crossings land in the event log with interpolated times") {
    Scenario s = chain_scenario(1.0, 1.0, 0.0, 0.0);
    s.events.push_back({"r", 0.0, 1.0, 0.0});  // C(t) = 1 - t
    const auto result = simulate_ode(s);
    REQUIRE(result.event_log.size() >= 2);
    CHECK(result.event_log[0].kind == EventKind::ReversibilityLost);
    CHECK(result.event_log[0].t == doctest::Approx(0.1).epsilon(1e-6));
    CHECK(result.event_log[1].kind == EventKind::Collapse);
    CHECK(result.event_log[1].t == doctest::Approx(0.6).epsilon(1e-6));
}

TEST_CASE("recovery recrossing theta_rev logs a regained event") {
    Scenario s;
    s.graph.add_resource("r");
    s.graph.add_capability("c", {0.4, 0.9, 1.0, 0.5});
    s.horizon = 12.0;
    s.step = 0.01;
    PiecewiseLinearSignal pwl;
    pwl.knots = {{0.0, -0.3}, {2.0, -0.3}, {2.2, 0.3}};
    s.signals.push_back({"swing", pwl});
    s.dynamics.theta["c"]["swing"] = 1.0;
    const auto result = simulate_ode(s);

    int collapse = 0, lost = 0, regained = 0;
    double t_lost = -1.0, t_regained = -1.0;
    for (const auto& e : result.event_log) {
        if (e.kind == EventKind::Collapse) ++collapse;
        if (e.kind == EventKind::ReversibilityLost) {
            ++lost;
            t_lost = e.t;
        }
        if (e.kind == EventKind::ReversibilityRegained) {
            ++regained;
            t_regained = e.t;
        }
    }
    CHECK(collapse == 1);
    CHECK(lost == 1);
    CHECK(regained == 1);
    CHECK(t_lost < t_regained);
}

TEST_CASE("simulate_ode rejects other models") {
    Scenario s = pure_decay_scenario(0.35);
    s.model = ModelKind::ConvolutionTransfer;
    try {
        (void)simulate_ode(s);
        FAIL("expected ModelMismatch");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::ModelMismatch);
    }
}

// ---- convolution transfer ---------------------------------------------------

namespace {

Scenario convolution_scenario(double coupling, double lambda, double p0) {
    Scenario s;
    s.graph.add_resource("r");
    s.graph.add_capability("c", {0.4, 0.9, 1.0, 0.5});
    s.horizon = 12.0;
    s.step = 0.01;
    s.model = ModelKind::ConvolutionTransfer;
    s.signals.push_back({"p", ConstantSignal{p0}});
    s.dynamics.k["c"]["p"] = coupling;
    if (lambda != 0.0) s.dynamics.lambda["c"]["p"] = lambda;
    return s;
}

}  // namespace

TEST_CASE("convolution of a zero signal is identically zero") {
    const auto result = convolve_transfer(convolution_scenario(0.5, 0.8, 0.0));
    for (double v : result.trajectories.at("c").values) CHECK(v == 0.0);
}

TEST_CASE("constant-input convolution matches the closed-form integral") {
    const double k = 0.5, lambda = 0.8, p0 = 1.0;
    const auto result = convolve_transfer(convolution_scenario(k, lambda, p0));
    const auto& traj = result.trajectories.at("c");
    for (std::size_t i = 0; i < traj.values.size(); ++i) {
        const double t = traj.grid.time(i);
        const double expected = p0 * k * (1.0 - std::exp(-lambda * t)) / lambda;
        CHECK(std::abs(traj.values[i] - expected) < 1e-4);
    }
}

TEST_CASE("lambda = 0 convolution integrates the signal linearly") {
    const double k = 0.5, p0 = 2.0;
    const auto result = convolve_transfer(convolution_scenario(k, 0.0, p0));
    const auto& traj = result.trajectories.at("c");
    for (std::size_t i = 0; i < traj.values.size(); ++i)
        CHECK(std::abs(traj.values[i] - p0 * k * traj.grid.time(i)) < 1e-6);
}

TEST_CASE("convolve_transfer rejects other models") {
    Scenario s = convolution_scenario(0.5, 0.8, 1.0);
    s.model = ModelKind::LaggedOde;
    CHECK_THROWS_AS((void)convolve_transfer(s), Error);
}

// ---- piecewise models --------------------------------------------------------

TEST_CASE("variant A holds at 1 before the plateau knee") {
    PiecewiseParams p;
    p.model = PiecewiseA{5.5, 6.0, 1.8325814637483102, 1.0, 0.4};
    CHECK(eval_piecewise(p, 0.0) == 1.0);
    CHECK(eval_piecewise(p, 5.4999) == 1.0);
}

TEST_CASE("variant A calibrated to reach 0.4 half a year past the knee") {
    PiecewiseParams p;
    p.model = PiecewiseA{5.5, 6.0, std::log(2.5) / 0.5, 1.0, 0.4};
    CHECK(eval_piecewise(p, 6.0) == doctest::Approx(0.4).epsilon(1e-12));
    // second segment decays from beta
    CHECK(eval_piecewise(p, 6.5) == doctest::Approx(0.4 * std::exp(-0.5)).epsilon(1e-12));
}

TEST_CASE("variant B starts at 1 and follows its three segments") {
    PiecewiseParams p;
    p.model = PiecewiseB{2.0, 6.0, 0.05, 0.02, 0.6, 1.0};
    CHECK(eval_piecewise(p, 0.0) == doctest::Approx(1.0));
    CHECK(eval_piecewise(p, 1.0) == doctest::Approx(0.95));
    CHECK(eval_piecewise(p, 4.0) == doctest::Approx(1.0 - 0.05 * 2.0 - 0.02 * 4.0));
    CHECK(eval_piecewise(p, 6.0) == doctest::Approx(0.6));
    CHECK(eval_piecewise(p, 8.0) == doctest::Approx(0.6 * std::exp(-2.0)));
}

TEST_CASE("eval_piecewise clamps to [0,1]") {
    PiecewiseParams p;
    p.model = PiecewiseB{2.0, 20.0, 0.05, 0.1, 0.6, 1.0};  // quadratic segment dives below 0
    for (double t = 0.0; t < 20.0; t += 0.25) {
        const double v = eval_piecewise(p, t);
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
    }
}

TEST_CASE("piecewise_jump measures the inter-segment discontinuity") {
    PiecewiseParams continuous;
    continuous.model = PiecewiseA{5.5, 6.0, std::log(2.5) / 0.5, 1.0, 0.4};
    CHECK(piecewise_jump(continuous) < 1e-12);

    PiecewiseParams jumpy;
    jumpy.model = PiecewiseA{2.0, 4.0, 0.5, 0.5, 0.9};
    CHECK(piecewise_jump(jumpy) == doctest::Approx(std::abs(std::exp(-1.0) - 0.9)));
}

TEST_CASE("piecewise-only runs evaluate per capability and log crossings") {
    Scenario s;
    s.graph.add_resource("r");
    s.graph.add_capability("hot", {0.4, 0.9, 1.0, 0.5});
    s.graph.add_capability("idle", {0.4, 0.9, 1.0, 0.5});
    s.horizon = 12.0;
    s.step = 0.5;
    s.model = ModelKind::PiecewiseOnly;
    PiecewiseParams p;
    p.model = PiecewiseA{5.5, 6.0, std::log(2.5) / 0.5, 1.0, 0.4};
    s.piecewise["hot"] = p;
    s.dynamics.c0["idle"] = 0.95;

    const auto result = simulate_piecewise(s);
    CHECK(result.trajectories.at("hot").values.front() == 1.0);
    for (double v : result.trajectories.at("idle").values) CHECK(v == doctest::Approx(0.95));

    bool collapse_logged = false;
    for (const auto& e : result.event_log)
        if (e.kind == EventKind::Collapse && e.node_id == "hot") collapse_logged = true;
    CHECK(collapse_logged);
}
