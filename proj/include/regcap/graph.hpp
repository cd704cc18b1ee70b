#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <queue>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "regcap/errors.hpp"
#include "regcap/validation.hpp"

namespace regcap {

// ---------------------------------------------------------------------------
// Layered dependency graph: Resource -> Equipment -> Generation -> Capability.
// Edges always point to a strictly higher layer; forward layer skips (e.g.
// equipment feeding a capability directly) are allowed.
// ---------------------------------------------------------------------------

enum class LayerKind { Resource, Equipment, Generation, Capability };

inline int layer_rank(LayerKind layer) { return static_cast<int>(layer); }

inline const char* to_string(LayerKind layer) {
    switch (layer) {
        case LayerKind::Resource: return "resource";
        case LayerKind::Equipment: return "equipment";
        case LayerKind::Generation: return "generation";
        case LayerKind::Capability: return "capability";
    }
    return "?";
}

inline std::optional<LayerKind> layer_from_string(const std::string& name) {
    if (name == "resource") return LayerKind::Resource;
    if (name == "equipment") return LayerKind::Equipment;
    if (name == "generation") return LayerKind::Generation;
    if (name == "capability") return LayerKind::Capability;
    return std::nullopt;
}

/// Platform attributes carried by Equipment nodes: resource embedding
/// intensity, technical non-substitutability, substitution delay index.
struct EquipmentAttrs {
    double rei = 0.5;
    double tns = 0.5;
    double sdi = 0.5;

    bool operator==(const EquipmentAttrs&) const = default;
};

/// Capability-node attributes: collapse/reversibility thresholds on the level
/// scale, cluster weight, and strategic value of the node.
struct CapabilityAttrs {
    double theta_col = 0.4;
    double theta_rev = 0.9;
    double w_cl = 1.0;
    double v_strategic = 0.5;

    bool operator==(const CapabilityAttrs&) const = default;
};

struct RegCapNode {
    std::string id;
    LayerKind layer = LayerKind::Resource;
    std::string label;
    std::optional<EquipmentAttrs> equipment;    // present iff layer == Equipment
    std::optional<CapabilityAttrs> capability;  // present iff layer == Capability

    bool operator==(const RegCapNode&) const = default;
};

/// Directed edge. `weight` is the dependency strength (omega on R->E, delta on
/// edges into Capability, 1.0 by default elsewhere); `delay_years` is the
/// substitution delay (E->G only); `sigma_sub` the substitution elasticity
/// attenuating that delay.
struct RegCapEdge {
    std::string src;
    std::string dst;
    double weight = 1.0;
    double delay_years = 0.0;
    double sigma_sub = 0.0;

    bool operator==(const RegCapEdge&) const = default;
};

struct RegCapGraph {
    std::vector<RegCapNode> nodes;
    std::vector<RegCapEdge> edges;

    RegCapGraph& add_node(RegCapNode node) {
        if (node.label.empty()) node.label = node.id;
        nodes.push_back(std::move(node));
        return *this;
    }
    RegCapGraph& add_resource(const std::string& id, const std::string& label = "") {
        return add_node({id, LayerKind::Resource, label, std::nullopt, std::nullopt});
    }
    RegCapGraph& add_equipment(const std::string& id, EquipmentAttrs attrs = {}, const std::string& label = "") {
        return add_node({id, LayerKind::Equipment, label, attrs, std::nullopt});
    }
    RegCapGraph& add_generation(const std::string& id, const std::string& label = "") {
        return add_node({id, LayerKind::Generation, label, std::nullopt, std::nullopt});
    }
    RegCapGraph& add_capability(const std::string& id, CapabilityAttrs attrs = {}, const std::string& label = "") {
        return add_node({id, LayerKind::Capability, label, std::nullopt, attrs});
    }
    RegCapGraph& add_edge(RegCapEdge edge) {
        edges.push_back(std::move(edge));
        return *this;
    }

    const RegCapNode* find(const std::string& id) const {
        for (const auto& n : nodes)
            if (n.id == id) return &n;
        return nullptr;
    }
    bool contains(const std::string& id) const { return find(id) != nullptr; }

    const RegCapNode& at(const std::string& id) const {
        const RegCapNode* node = find(id);
        if (node == nullptr) fail(ErrorCode::UnknownNodeId, "no node '" + id + "'");
        return *node;
    }

    /// Sorted ids of all nodes in one layer.
    std::vector<std::string> ids_of(LayerKind layer) const {
        std::vector<std::string> out;
        for (const auto& n : nodes)
            if (n.layer == layer) out.push_back(n.id);
        std::sort(out.begin(), out.end());
        return out;
    }

    bool operator==(const RegCapGraph&) const = default;
};

/// A simple layer-increasing path from a Resource node to a Capability node.
struct Channel {
    std::vector<std::string> path;

    bool operator==(const Channel&) const = default;
    bool operator<(const Channel& other) const { return path < other.path; }
};

/// The edges traversed by a channel, in path order.
inline std::vector<const RegCapEdge*> channel_edges(const RegCapGraph& graph, const Channel& channel) {
    std::vector<const RegCapEdge*> out;
    for (std::size_t i = 1; i < channel.path.size(); ++i) {
        const RegCapEdge* found = nullptr;
        for (const auto& edge : graph.edges)
            if (edge.src == channel.path[i - 1] && edge.dst == channel.path[i]) found = &edge;
        if (found == nullptr)
            fail(ErrorCode::UnknownNodeId,
                 "channel hop " + channel.path[i - 1] + " -> " + channel.path[i] + " is not an edge");
        out.push_back(found);
    }
    return out;
}

struct DependencyMatrix {
    std::vector<std::string> resources;  // row ids, sorted
    std::vector<std::string> equipment;  // column ids, sorted
    std::vector<std::vector<double>> omega;
};

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

inline ValidationReport validate_graph(const RegCapGraph& graph) {
    ValidationReport report;

    std::set<std::string> ids;
    for (const auto& node : graph.nodes) {
        if (!ids.insert(node.id).second)
            report.error(IssueCode::DuplicateNodeId, "node id '" + node.id + "' appears more than once");

        const bool is_equipment = node.layer == LayerKind::Equipment;
        const bool is_capability = node.layer == LayerKind::Capability;
        if (is_equipment && !node.equipment)
            report.error(IssueCode::AttrMissing, "equipment node '" + node.id + "' has no equipment attrs");
        if (!is_equipment && node.equipment)
            report.error(IssueCode::AttrUnexpected, "non-equipment node '" + node.id + "' carries equipment attrs");
        if (is_capability && !node.capability)
            report.error(IssueCode::AttrMissing, "capability node '" + node.id + "' has no capability attrs");
        if (!is_capability && node.capability)
            report.error(IssueCode::AttrUnexpected, "non-capability node '" + node.id + "' carries capability attrs");

        auto in_unit = [](double v) { return v >= 0.0 && v <= 1.0; };
        if (node.equipment) {
            const auto& a = *node.equipment;
            if (!in_unit(a.rei) || !in_unit(a.tns) || !in_unit(a.sdi))
                report.error(IssueCode::AttrOutOfRange, "node '" + node.id + "': rei/tns/sdi must lie in [0,1]");
        }
        if (node.capability) {
            const auto& a = *node.capability;
            if (!in_unit(a.theta_col) || !in_unit(a.theta_rev) || !in_unit(a.v_strategic))
                report.error(IssueCode::AttrOutOfRange, "node '" + node.id + "': thresholds must lie in [0,1]");
            if (!(a.w_cl >= 0.0))
                report.error(IssueCode::AttrOutOfRange, "node '" + node.id + "': w_cl must be >= 0");
            if (!(a.theta_col < a.theta_rev))
                report.error(IssueCode::ThresholdOrder,
                             "node '" + node.id + "': theta_col must be strictly below theta_rev");
        }
    }

    std::set<std::pair<std::string, std::string>> seen_edges;
    for (const auto& edge : graph.edges) {
        const RegCapNode* src = graph.find(edge.src);
        const RegCapNode* dst = graph.find(edge.dst);
        if (src == nullptr) report.error(IssueCode::UnknownNodeId, "edge source '" + edge.src + "' not in graph");
        if (dst == nullptr) report.error(IssueCode::UnknownNodeId, "edge target '" + edge.dst + "' not in graph");
        if (edge.src == edge.dst) {
            report.error(IssueCode::SelfLoop, "self loop on '" + edge.src + "'");
            continue;
        }
        if (src && dst && layer_rank(src->layer) >= layer_rank(dst->layer))
            report.error(IssueCode::LayerOrderViolation,
                         "edge " + edge.src + " -> " + edge.dst + " does not increase layer");
        if (!seen_edges.insert({edge.src, edge.dst}).second)
            report.error(IssueCode::DuplicateEdge, "duplicate edge " + edge.src + " -> " + edge.dst);
        if (!(edge.weight >= 0.0))
            report.error(IssueCode::AttrOutOfRange, "edge " + edge.src + " -> " + edge.dst + ": weight must be >= 0");
        if (!(edge.delay_years >= 0.0))
            report.error(IssueCode::AttrOutOfRange,
                         "edge " + edge.src + " -> " + edge.dst + ": delay_years must be >= 0");
        if (!(edge.sigma_sub >= 0.0 && edge.sigma_sub <= 1.0))
            report.error(IssueCode::AttrOutOfRange,
                         "edge " + edge.src + " -> " + edge.dst + ": sigma_sub must lie in [0,1]");
        if (src && dst) {
            const bool e_to_g = src->layer == LayerKind::Equipment && dst->layer == LayerKind::Generation;
            if (!e_to_g && edge.sigma_sub != 0.0)
                report.warn(IssueCode::AttrUnexpected,
                            "edge " + edge.src + " -> " + edge.dst + ": sigma_sub is only consumed on E->G edges");
            if (!e_to_g && edge.delay_years != 0.0)
                report.warn(IssueCode::AttrUnexpected,
                            "edge " + edge.src + " -> " + edge.dst + ": delay_years is only consumed on E->G edges");
        }
    }

    // Reachability from the resource layer.
    std::set<std::string> reached;
    std::queue<std::string> frontier;
    for (const auto& node : graph.nodes)
        if (node.layer == LayerKind::Resource) {
            reached.insert(node.id);
            frontier.push(node.id);
        }
    while (!frontier.empty()) {
        std::string cur = std::move(frontier.front());
        frontier.pop();
        for (const auto& edge : graph.edges)
            if (edge.src == cur && reached.insert(edge.dst).second) frontier.push(edge.dst);
    }
    for (const auto& node : graph.nodes) {
        if (node.layer == LayerKind::Capability && reached.count(node.id) == 0)
            report.warn(IssueCode::UnreachableCapability,
                        "capability '" + node.id + "' is not reachable from any resource");
        if (node.layer == LayerKind::Equipment) {
            double total = 0.0;
            bool any = false;
            for (const auto& edge : graph.edges) {
                if (edge.dst != node.id) continue;
                const RegCapNode* src = graph.find(edge.src);
                if (src && src->layer == LayerKind::Resource) {
                    any = true;
                    total += edge.weight;
                }
            }
            if (!any)
                report.warn(IssueCode::EquipmentWithoutResource,
                            "equipment '" + node.id + "' has no inbound resource edge");
            else if (total == 0.0)
                report.warn(IssueCode::ZeroWeightSum,
                            "equipment '" + node.id + "': inbound resource weights sum to zero");
        }
    }

    return report;
}

// ---------------------------------------------------------------------------
// Channels
// ---------------------------------------------------------------------------

namespace detail {

inline void channel_dfs(const RegCapGraph& graph, const std::string& node_id, std::vector<std::string>& path,
                        const std::optional<std::string>& to, std::vector<Channel>& out) {
    const RegCapNode& node = graph.at(node_id);
    if (node.layer == LayerKind::Capability) {
        if (!to || *to == node_id) out.push_back(Channel{path});
        return;
    }
    for (const auto& edge : graph.edges) {
        if (edge.src != node_id) continue;
        path.push_back(edge.dst);
        channel_dfs(graph, edge.dst, path, to, out);
        path.pop_back();
    }
}

}  // namespace detail

/// Enumerates every simple layer-increasing Resource->...->Capability path,
/// optionally restricted to one origin resource and/or one terminal
/// capability. Output is sorted lexicographically by node-id sequence.
inline std::vector<Channel> enumerate_channels(const RegCapGraph& graph,
                                               const std::optional<std::string>& from = std::nullopt,
                                               const std::optional<std::string>& to = std::nullopt) {
    if (from && !graph.contains(*from)) fail(ErrorCode::UnknownNodeId, "channel origin '" + *from + "' not in graph");
    if (to && !graph.contains(*to)) fail(ErrorCode::UnknownNodeId, "channel terminal '" + *to + "' not in graph");

    std::vector<Channel> out;
    for (const auto& node : graph.nodes) {
        if (node.layer != LayerKind::Resource) continue;
        if (from && *from != node.id) continue;
        std::vector<std::string> path{node.id};
        detail::channel_dfs(graph, node.id, path, to, out);
    }
    std::sort(out.begin(), out.end());
    return out;
}

// ---------------------------------------------------------------------------
// Static matrices and indices
// ---------------------------------------------------------------------------

/// Resource x equipment matrix of omega weights; 0 where no edge exists.
inline DependencyMatrix dependency_matrix(const RegCapGraph& graph) {
    DependencyMatrix m;
    m.resources = graph.ids_of(LayerKind::Resource);
    m.equipment = graph.ids_of(LayerKind::Equipment);
    m.omega.assign(m.resources.size(), std::vector<double>(m.equipment.size(), 0.0));
    for (const auto& edge : graph.edges) {
        auto r = std::find(m.resources.begin(), m.resources.end(), edge.src);
        auto e = std::find(m.equipment.begin(), m.equipment.end(), edge.dst);
        if (r == m.resources.end() || e == m.equipment.end()) continue;
        m.omega[static_cast<std::size_t>(r - m.resources.begin())][static_cast<std::size_t>(e - m.equipment.begin())] =
            edge.weight;
    }
    return m;
}

/// Saturating risk index rho_e = sum(omega)/(sum(omega)+1) * tns(e); bounded
/// in [0,1], monotone in total inbound dependency and in TNS.
inline double equipment_risk(const RegCapGraph& graph, const std::string& equipment_id) {
    const RegCapNode& node = graph.at(equipment_id);
    if (node.layer != LayerKind::Equipment)
        fail(ErrorCode::WrongLayer, "'" + equipment_id + "' is not an equipment node");
    double total = 0.0;
    for (const auto& edge : graph.edges) {
        if (edge.dst != equipment_id) continue;
        const RegCapNode* src = graph.find(edge.src);
        if (src && src->layer == LayerKind::Resource) total += edge.weight;
    }
    const double tns = node.equipment ? node.equipment->tns : 0.0;
    return total / (total + 1.0) * tns;
}

// ---------------------------------------------------------------------------
// Synthetic power-law graphs
// ---------------------------------------------------------------------------

namespace detail {

/// mt19937_64-backed helpers; raw draws only, so generated graphs are
/// identical for identical seeds regardless of the standard library.
class GraphRng {
public:
    explicit GraphRng(std::uint64_t seed) : engine_(seed) {}

    double unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    std::size_t below(std::size_t n) { return static_cast<std::size_t>(engine_() % n); }

    std::vector<std::size_t> permutation(std::size_t n) {
        std::vector<std::size_t> p(n);
        for (std::size_t i = 0; i < n; ++i) p[i] = i;
        for (std::size_t i = n; i > 1; --i) std::swap(p[i - 1], p[below(i)]);
        return p;
    }

private:
    std::mt19937_64 engine_;
};

inline std::string padded_id(const char* prefix, std::size_t index, std::size_t count) {
    std::size_t width = 1;
    for (std::size_t rest = count > 0 ? count - 1 : 0; rest >= 10; rest /= 10) ++width;
    std::string digits = std::to_string(index);
    if (digits.size() < width) digits.insert(0, width - digits.size(), '0');
    return prefix + digits;
}

}  // namespace detail

/// Synthetic four-layer graph whose R->E weights follow a Zipf law: for each
/// equipment the resources are ranked by a seeded shuffle and weighted
/// proportionally to rank^-exponent, then normalized to sum to one. Adjacent
/// layers are wired so that every node is reachable from the resource layer.
inline RegCapGraph generate_power_law_graph(std::size_t n_resources, std::size_t n_equipment,
                                            std::size_t n_generations, std::size_t n_capabilities, double exponent,
                                            std::uint64_t seed) {
    if (n_resources == 0 || n_equipment == 0 || n_generations == 0 || n_capabilities == 0)
        fail(ErrorCode::InvalidParameter, "all layer counts must be >= 1");
    if (!(exponent > 1.0)) fail(ErrorCode::InvalidParameter, "power-law exponent must be > 1");

    detail::GraphRng rng(seed);
    RegCapGraph graph;

    std::vector<std::string> resources, equipment, generations, capabilities;
    for (std::size_t i = 0; i < n_resources; ++i) {
        resources.push_back(detail::padded_id("R", i, n_resources));
        graph.add_resource(resources.back());
    }
    for (std::size_t i = 0; i < n_equipment; ++i) {
        equipment.push_back(detail::padded_id("E", i, n_equipment));
        graph.add_equipment(equipment.back(), EquipmentAttrs{rng.unit(), rng.unit(), rng.unit()});
    }
    for (std::size_t i = 0; i < n_generations; ++i) {
        generations.push_back(detail::padded_id("G", i, n_generations));
        graph.add_generation(generations.back());
    }
    for (std::size_t i = 0; i < n_capabilities; ++i) {
        capabilities.push_back(detail::padded_id("C", i, n_capabilities));
        CapabilityAttrs attrs;
        attrs.theta_col = 0.3 + 0.2 * rng.unit();
        attrs.theta_rev = attrs.theta_col + 0.2 + 0.3 * rng.unit();
        attrs.w_cl = 0.5 + rng.unit();
        attrs.v_strategic = rng.unit();
        graph.add_capability(capabilities.back(), attrs);
    }

    // R->E: every resource feeds every equipment; Zipf-law weight by rank.
    for (std::size_t e = 0; e < n_equipment; ++e) {
        auto ranks = rng.permutation(n_resources);
        std::vector<double> raw(n_resources);
        double total = 0.0;
        for (std::size_t r = 0; r < n_resources; ++r) {
            raw[r] = std::pow(static_cast<double>(ranks[r] + 1), -exponent);
            total += raw[r];
        }
        for (std::size_t r = 0; r < n_resources; ++r)
            graph.add_edge({resources[r], equipment[e], raw[r] / total, 0.0, 0.0});
    }

    std::set<std::pair<std::string, std::string>> wired;
    auto wire = [&](const std::string& src, const std::string& dst, double weight, double delay, double sigma) {
        if (wired.insert({src, dst}).second) graph.add_edge({src, dst, weight, delay, sigma});
    };

    // E->G with substitution delays; modulo pattern guarantees coverage.
    for (std::size_t e = 0; e < n_equipment; ++e) {
        wire(equipment[e], generations[e % n_generations], 1.0, 0.25 + 2.25 * rng.unit(), 0.6 * rng.unit());
        if (n_generations > 1 && rng.unit() < 0.5)
            wire(equipment[e], generations[rng.below(n_generations)], 1.0, 0.25 + 2.25 * rng.unit(),
                 0.6 * rng.unit());
    }
    for (std::size_t g = 0; g < n_generations; ++g)
        wire(equipment[g % n_equipment], generations[g], 1.0, 0.25 + 2.25 * rng.unit(), 0.6 * rng.unit());

    // G->C impact weights.
    for (std::size_t g = 0; g < n_generations; ++g) {
        wire(generations[g], capabilities[g % n_capabilities], 0.3 + 0.7 * rng.unit(), 0.0, 0.0);
        if (n_capabilities > 1 && rng.unit() < 0.5)
            wire(generations[g], capabilities[rng.below(n_capabilities)], 0.3 + 0.7 * rng.unit(), 0.0, 0.0);
    }
    for (std::size_t c = 0; c < n_capabilities; ++c)
        wire(generations[c % n_generations], capabilities[c], 0.3 + 0.7 * rng.unit(), 0.0, 0.0);

    return graph;
}

}  // namespace regcap
