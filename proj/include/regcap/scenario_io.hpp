#pragma once

#include <fstream>
#include <initializer_list>
#include <set>
#include <sstream>
#include <string>

#include <json.hpp>

#include "regcap/scenario.hpp"

namespace regcap {

using json = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Scenario file format: a single JSON document with top-level keys
//   graph{nodes[],edges[]}, horizon, step, events[], signals[], dynamics{},
//   model, piecewise{}, seed
// Field names mirror the in-memory types in lower_snake_case. Unknown keys
// are rejected with a ParseError.
// ---------------------------------------------------------------------------

namespace detail {

[[noreturn]] inline void parse_fail(const std::string& where, const std::string& what) {
    fail(ErrorCode::ParseError, where.empty() ? what : where + ": " + what);
}

inline void reject_unknown_keys(const json& object, const std::string& where,
                                std::initializer_list<const char*> allowed) {
    for (const auto& [key, value] : object.items()) {
        (void)value;
        bool known = false;
        for (const char* a : allowed)
            if (key == a) {
                known = true;
                break;
            }
        if (!known) parse_fail(where, "unknown key '" + key + "'");
    }
}

inline double require_number(const json& object, const std::string& where, const char* key) {
    if (!object.contains(key)) parse_fail(where, std::string("missing key '") + key + "'");
    if (!object[key].is_number()) parse_fail(where, std::string("key '") + key + "' must be a number");
    return object[key].get<double>();
}

inline double number_or(const json& object, const std::string& where, const char* key, double fallback) {
    if (!object.contains(key)) return fallback;
    if (!object[key].is_number()) parse_fail(where, std::string("key '") + key + "' must be a number");
    return object[key].get<double>();
}

inline std::string require_string(const json& object, const std::string& where, const char* key) {
    if (!object.contains(key)) parse_fail(where, std::string("missing key '") + key + "'");
    if (!object[key].is_string()) parse_fail(where, std::string("key '") + key + "' must be a string");
    return object[key].get<std::string>();
}

inline std::map<std::string, double> parse_string_double_map(const json& object, const std::string& where) {
    if (!object.is_object()) parse_fail(where, "expected an object");
    std::map<std::string, double> out;
    for (const auto& [key, value] : object.items()) {
        if (!value.is_number()) parse_fail(where, "value for '" + key + "' must be a number");
        out[key] = value.get<double>();
    }
    return out;
}

inline std::map<std::string, std::map<std::string, double>> parse_nested_map(const json& object,
                                                                             const std::string& where) {
    if (!object.is_object()) parse_fail(where, "expected an object");
    std::map<std::string, std::map<std::string, double>> out;
    for (const auto& [key, value] : object.items()) out[key] = parse_string_double_map(value, where + "." + key);
    return out;
}

}  // namespace detail

// ---- graph --------------------------------------------------------------

inline json node_to_json(const RegCapNode& node) {
    json j;
    j["id"] = node.id;
    j["layer"] = to_string(node.layer);
    if (node.label != node.id) j["label"] = node.label;
    if (node.equipment) {
        j["rei"] = node.equipment->rei;
        j["tns"] = node.equipment->tns;
        j["sdi"] = node.equipment->sdi;
    }
    if (node.capability) {
        j["theta_col"] = node.capability->theta_col;
        j["theta_rev"] = node.capability->theta_rev;
        j["w_cl"] = node.capability->w_cl;
        j["v_strategic"] = node.capability->v_strategic;
    }
    return j;
}

inline RegCapNode node_from_json(const json& j) {
    const std::string where = "graph.nodes[" + (j.contains("id") && j["id"].is_string()
                                                    ? j["id"].get<std::string>()
                                                    : std::string("?")) +
                              "]";
    if (!j.is_object()) detail::parse_fail("graph.nodes", "node entries must be objects");

    RegCapNode node;
    node.id = detail::require_string(j, where, "id");
    const std::string layer_name = detail::require_string(j, where, "layer");
    auto layer = layer_from_string(layer_name);
    if (!layer) detail::parse_fail(where, "unknown layer '" + layer_name + "'");
    node.layer = *layer;
    node.label = j.contains("label") ? detail::require_string(j, where, "label") : node.id;

    switch (node.layer) {
        case LayerKind::Equipment: {
            detail::reject_unknown_keys(j, where, {"id", "layer", "label", "rei", "tns", "sdi"});
            EquipmentAttrs attrs;
            attrs.rei = detail::number_or(j, where, "rei", attrs.rei);
            attrs.tns = detail::number_or(j, where, "tns", attrs.tns);
            attrs.sdi = detail::number_or(j, where, "sdi", attrs.sdi);
            node.equipment = attrs;
            break;
        }
        case LayerKind::Capability: {
            detail::reject_unknown_keys(j, where,
                                        {"id", "layer", "label", "theta_col", "theta_rev", "w_cl", "v_strategic"});
            CapabilityAttrs attrs;
            attrs.theta_col = detail::number_or(j, where, "theta_col", attrs.theta_col);
            attrs.theta_rev = detail::number_or(j, where, "theta_rev", attrs.theta_rev);
            attrs.w_cl = detail::number_or(j, where, "w_cl", attrs.w_cl);
            attrs.v_strategic = detail::number_or(j, where, "v_strategic", attrs.v_strategic);
            node.capability = attrs;
            break;
        }
        default:
            detail::reject_unknown_keys(j, where, {"id", "layer", "label"});
            break;
    }
    return node;
}

inline json edge_to_json(const RegCapEdge& edge) {
    json j;
    j["src"] = edge.src;
    j["dst"] = edge.dst;
    if (edge.weight != 1.0) j["weight"] = edge.weight;
    if (edge.delay_years != 0.0) j["delay_years"] = edge.delay_years;
    if (edge.sigma_sub != 0.0) j["sigma_sub"] = edge.sigma_sub;
    return j;
}

inline RegCapEdge edge_from_json(const json& j) {
    if (!j.is_object()) detail::parse_fail("graph.edges", "edge entries must be objects");
    RegCapEdge edge;
    edge.src = detail::require_string(j, "graph.edges", "src");
    edge.dst = detail::require_string(j, "graph.edges", "dst");
    const std::string where = "graph.edges[" + edge.src + "->" + edge.dst + "]";
    detail::reject_unknown_keys(j, where, {"src", "dst", "weight", "delay_years", "sigma_sub"});
    edge.weight = detail::number_or(j, where, "weight", 1.0);
    edge.delay_years = detail::number_or(j, where, "delay_years", 0.0);
    edge.sigma_sub = detail::number_or(j, where, "sigma_sub", 0.0);
    return edge;
}

inline json graph_to_json(const RegCapGraph& graph) {
    json j;
    j["nodes"] = json::array();
    for (const auto& node : graph.nodes) j["nodes"].push_back(node_to_json(node));
    j["edges"] = json::array();
    for (const auto& edge : graph.edges) j["edges"].push_back(edge_to_json(edge));
    return j;
}

inline RegCapGraph graph_from_json(const json& j) {
    if (!j.is_object()) detail::parse_fail("graph", "expected an object");
    detail::reject_unknown_keys(j, "graph", {"nodes", "edges"});
    RegCapGraph graph;
    if (j.contains("nodes")) {
        if (!j["nodes"].is_array()) detail::parse_fail("graph.nodes", "expected an array");
        for (const auto& entry : j["nodes"]) graph.add_node(node_from_json(entry));
    }
    if (j.contains("edges")) {
        if (!j["edges"].is_array()) detail::parse_fail("graph.edges", "expected an array");
        for (const auto& entry : j["edges"]) graph.add_edge(edge_from_json(entry));
    }
    return graph;
}

// ---- signals ------------------------------------------------------------

inline json signal_to_json(const PolicySignal& signal) {
    json j;
    j["name"] = signal.name;
    std::visit(detail::overloaded{
                   [&](const ConstantSignal& s) {
                       j["variant"] = "constant";
                       j["value"] = s.value;
                   },
                   [&](const StepSignal& s) {
                       j["variant"] = "step";
                       j["t0"] = s.t0;
                       j["value"] = s.value;
                   },
                   [&](const SigmoidSignal& s) {
                       j["variant"] = "sigmoid";
                       j["k"] = s.k;
                       j["t0"] = s.t0;
                   },
                   [&](const SsifSignal& s) {
                       j["variant"] = "ssif";
                       j["t1"] = s.t1;
                       j["t2"] = s.t2;
                       j["base_amp"] = s.base_amp;
                       j["pulse_amp"] = s.pulse_amp;
                       j["decay_rate"] = s.decay_rate;
                       j["freq_low"] = s.freq_low;
                       j["freq_high"] = s.freq_high;
                   },
                   [&](const PiecewiseLinearSignal& s) {
                       j["variant"] = "piecewise_linear";
                       json knots = json::array();
                       for (const auto& [t, v] : s.knots) knots.push_back(json::array({t, v}));
                       j["knots"] = std::move(knots);
                   },
               },
               signal.shape);
    return j;
}

inline PolicySignal signal_from_json(const json& j) {
    if (!j.is_object()) detail::parse_fail("signals", "signal entries must be objects");
    PolicySignal signal;
    signal.name = detail::require_string(j, "signals", "name");
    const std::string where = "signals[" + signal.name + "]";
    const std::string variant = detail::require_string(j, where, "variant");

    if (variant == "constant") {
        detail::reject_unknown_keys(j, where, {"name", "variant", "value"});
        signal.shape = ConstantSignal{detail::number_or(j, where, "value", 0.0)};
    } else if (variant == "step") {
        detail::reject_unknown_keys(j, where, {"name", "variant", "t0", "value"});
        signal.shape = StepSignal{detail::number_or(j, where, "t0", 0.0), detail::number_or(j, where, "value", 1.0)};
    } else if (variant == "sigmoid") {
        detail::reject_unknown_keys(j, where, {"name", "variant", "k", "t0"});
        signal.shape = SigmoidSignal{detail::require_number(j, where, "k"), detail::number_or(j, where, "t0", 0.0)};
    } else if (variant == "ssif") {
        detail::reject_unknown_keys(
            j, where, {"name", "variant", "t1", "t2", "base_amp", "pulse_amp", "decay_rate", "freq_low", "freq_high"});
        SsifSignal s;
        s.t1 = detail::number_or(j, where, "t1", s.t1);
        s.t2 = detail::number_or(j, where, "t2", s.t2);
        s.base_amp = detail::number_or(j, where, "base_amp", s.base_amp);
        s.pulse_amp = detail::number_or(j, where, "pulse_amp", s.pulse_amp);
        s.decay_rate = detail::number_or(j, where, "decay_rate", s.decay_rate);
        s.freq_low = detail::number_or(j, where, "freq_low", s.freq_low);
        s.freq_high = detail::number_or(j, where, "freq_high", s.freq_high);
        signal.shape = s;
    } else if (variant == "piecewise_linear") {
        detail::reject_unknown_keys(j, where, {"name", "variant", "knots"});
        if (!j.contains("knots") || !j["knots"].is_array()) detail::parse_fail(where, "missing knots array");
        PiecewiseLinearSignal s;
        for (const auto& knot : j["knots"]) {
            if (!knot.is_array() || knot.size() != 2 || !knot[0].is_number() || !knot[1].is_number())
                detail::parse_fail(where, "knots must be [t, value] pairs");
            s.knots.emplace_back(knot[0].get<double>(), knot[1].get<double>());
        }
        signal.shape = s;
    } else {
        detail::parse_fail(where, "unknown variant '" + variant + "'");
    }
    return signal;
}

// ---- piecewise ------------------------------------------------------------

inline json piecewise_to_json(const PiecewiseParams& params) {
    json j;
    if (const auto* a = std::get_if<PiecewiseA>(&params.model)) {
        j["variant"] = "a";
        j["t0"] = a->t0;
        j["t1"] = a->t1;
        j["lambda1"] = a->lambda1;
        j["lambda2"] = a->lambda2;
        j["beta"] = a->beta;
    } else if (const auto* b = std::get_if<PiecewiseB>(&params.model)) {
        j["variant"] = "b";
        j["t1"] = b->t1;
        j["t2"] = b->t2;
        j["alpha"] = b->alpha;
        j["beta"] = b->beta;
        j["gamma"] = b->gamma;
        j["delta"] = b->delta;
    }
    return j;
}

inline PiecewiseParams piecewise_from_json(const json& j, const std::string& capability) {
    const std::string where = "piecewise[" + capability + "]";
    if (!j.is_object()) detail::parse_fail(where, "expected an object");
    const std::string variant = detail::require_string(j, where, "variant");
    PiecewiseParams params;
    if (variant == "a") {
        detail::reject_unknown_keys(j, where, {"variant", "t0", "t1", "lambda1", "lambda2", "beta"});
        PiecewiseA a;
        a.t0 = detail::require_number(j, where, "t0");
        a.t1 = detail::require_number(j, where, "t1");
        a.lambda1 = detail::require_number(j, where, "lambda1");
        a.lambda2 = detail::require_number(j, where, "lambda2");
        a.beta = detail::require_number(j, where, "beta");
        params.model = a;
    } else if (variant == "b") {
        detail::reject_unknown_keys(j, where, {"variant", "t1", "t2", "alpha", "beta", "gamma", "delta"});
        PiecewiseB b;
        b.t1 = detail::require_number(j, where, "t1");
        b.t2 = detail::require_number(j, where, "t2");
        b.alpha = detail::require_number(j, where, "alpha");
        b.beta = detail::require_number(j, where, "beta");
        b.gamma = detail::require_number(j, where, "gamma");
        b.delta = detail::require_number(j, where, "delta");
        params.model = b;
    } else {
        detail::parse_fail(where, "unknown variant '" + variant + "' (expected 'a' or 'b')");
    }
    return params;
}

// ---- scenario -------------------------------------------------------------

inline json scenario_to_json(const Scenario& scenario) {
    json j;
    j["graph"] = graph_to_json(scenario.graph);
    j["horizon"] = scenario.horizon;
    j["step"] = scenario.step;
    j["events"] = json::array();
    for (const auto& event : scenario.events) {
        json e;
        e["resource_id"] = event.resource_id;
        e["onset"] = event.onset;
        e["severity"] = event.severity;
        e["ramp"] = event.ramp;
        j["events"].push_back(std::move(e));
    }
    j["signals"] = json::array();
    for (const auto& signal : scenario.signals) j["signals"].push_back(signal_to_json(signal));
    json dynamics = json::object();
    auto put_map = [](json& parent, const char* key, const std::map<std::string, double>& m) {
        if (m.empty()) return;
        json obj = json::object();
        for (const auto& [k, v] : m) obj[k] = v;
        parent[key] = std::move(obj);
    };
    auto put_nested = [](json& parent, const char* key, const std::map<std::string, std::map<std::string, double>>& m) {
        if (m.empty()) return;
        json obj = json::object();
        for (const auto& [outer, inner] : m) {
            json row = json::object();
            for (const auto& [k, v] : inner) row[k] = v;
            obj[outer] = std::move(row);
        }
        parent[key] = std::move(obj);
    };
    put_map(dynamics, "gamma", scenario.dynamics.gamma);
    put_map(dynamics, "c0", scenario.dynamics.c0);
    put_nested(dynamics, "theta", scenario.dynamics.theta);
    put_map(dynamics, "tau", scenario.dynamics.tau);
    put_nested(dynamics, "k", scenario.dynamics.k);
    put_nested(dynamics, "lambda", scenario.dynamics.lambda);
    j["dynamics"] = std::move(dynamics);
    j["model"] = to_string(scenario.model);
    if (!scenario.piecewise.empty()) {
        json pw = json::object();
        for (const auto& [cap, params] : scenario.piecewise) pw[cap] = piecewise_to_json(params);
        j["piecewise"] = std::move(pw);
    }
    j["seed"] = scenario.seed;
    return j;
}

inline Scenario scenario_from_json(const json& j) {
    if (!j.is_object()) detail::parse_fail("scenario", "top level must be an object");
    detail::reject_unknown_keys(
        j, "scenario", {"graph", "horizon", "step", "events", "signals", "dynamics", "model", "piecewise", "seed"});

    Scenario scenario;
    if (!j.contains("graph")) detail::parse_fail("scenario", "missing key 'graph'");
    scenario.graph = graph_from_json(j["graph"]);
    scenario.horizon = detail::require_number(j, "scenario", "horizon");
    scenario.step = detail::require_number(j, "scenario", "step");

    if (j.contains("events")) {
        if (!j["events"].is_array()) detail::parse_fail("events", "expected an array");
        for (const auto& entry : j["events"]) {
            if (!entry.is_object()) detail::parse_fail("events", "event entries must be objects");
            DisruptionEvent event;
            event.resource_id = detail::require_string(entry, "events", "resource_id");
            const std::string where = "events[" + event.resource_id + "]";
            detail::reject_unknown_keys(entry, where, {"resource_id", "onset", "severity", "ramp"});
            event.onset = detail::number_or(entry, where, "onset", 0.0);
            event.severity = detail::require_number(entry, where, "severity");
            event.ramp = detail::number_or(entry, where, "ramp", 0.0);
            scenario.events.push_back(std::move(event));
        }
    }
    if (j.contains("signals")) {
        if (!j["signals"].is_array()) detail::parse_fail("signals", "expected an array");
        for (const auto& entry : j["signals"]) scenario.signals.push_back(signal_from_json(entry));
    }
    if (j.contains("dynamics")) {
        const json& d = j["dynamics"];
        if (!d.is_object()) detail::parse_fail("dynamics", "expected an object");
        detail::reject_unknown_keys(d, "dynamics", {"gamma", "c0", "theta", "tau", "k", "lambda"});
        if (d.contains("gamma")) scenario.dynamics.gamma = detail::parse_string_double_map(d["gamma"], "dynamics.gamma");
        if (d.contains("c0")) scenario.dynamics.c0 = detail::parse_string_double_map(d["c0"], "dynamics.c0");
        if (d.contains("theta")) scenario.dynamics.theta = detail::parse_nested_map(d["theta"], "dynamics.theta");
        if (d.contains("tau")) scenario.dynamics.tau = detail::parse_string_double_map(d["tau"], "dynamics.tau");
        if (d.contains("k")) scenario.dynamics.k = detail::parse_nested_map(d["k"], "dynamics.k");
        if (d.contains("lambda")) scenario.dynamics.lambda = detail::parse_nested_map(d["lambda"], "dynamics.lambda");
    }
    if (j.contains("model")) {
        const std::string name = detail::require_string(j, "scenario", "model");
        auto model = model_from_string(name);
        if (!model) detail::parse_fail("scenario", "unknown model '" + name + "'");
        scenario.model = *model;
    }
    if (j.contains("piecewise")) {
        const json& pw = j["piecewise"];
        if (!pw.is_object()) detail::parse_fail("piecewise", "expected an object");
        for (const auto& [cap, entry] : pw.items()) scenario.piecewise[cap] = piecewise_from_json(entry, cap);
    }
    if (j.contains("seed")) {
        if (!j["seed"].is_number_integer()) detail::parse_fail("scenario", "seed must be an integer");
        scenario.seed = j["seed"].get<std::int64_t>();
    }
    return scenario;
}

// ---- files ----------------------------------------------------------------

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorCode::IoError, "cannot open '" + path + "' for reading");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

inline void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(ErrorCode::IoError, "cannot open '" + path + "' for writing");
    out << content;
    if (!out) fail(ErrorCode::IoError, "write to '" + path + "' failed");
}

namespace detail {

inline std::pair<std::size_t, std::size_t> line_column(const std::string& text, std::size_t byte) {
    std::size_t line = 1, column = 1;
    for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            column = 1;
        } else {
            ++column;
        }
    }
    return {line, column};
}

}  // namespace detail

/// Parses a scenario document without validating it.
inline Scenario parse_scenario_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        auto [line, column] = detail::line_column(text, e.byte > 0 ? e.byte - 1 : 0);
        fail(ErrorCode::ParseError,
             "invalid JSON at line " + std::to_string(line) + ", column " + std::to_string(column));
    }
    return scenario_from_json(j);
}

/// Loads, parses and validates; throws ValidationFailed with the aggregated
/// report text when any validation error is present.
inline Scenario load_scenario(const std::string& path) {
    Scenario scenario = parse_scenario_text(read_file(path));
    ValidationReport report = validate_scenario(scenario);
    if (!report.ok()) fail(ErrorCode::ValidationFailed, "'" + path + "'\n" + report.to_string());
    return scenario;
}

inline void save_scenario(const Scenario& scenario, const std::string& path) {
    write_file(path, scenario_to_json(scenario).dump(2) + "\n");
}

}  // namespace regcap
