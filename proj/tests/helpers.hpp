#pragma once

// Shared test utilities. The path oracle here enumerates simple paths
// directly and must stay independent of the router implementation.

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "aoifleet/aoifleet.hpp"

namespace test_helpers {

using namespace aoifleet;

inline std::string scenario_dir() { return AOIFLEET_SCENARIO_DIR; }

inline std::string scenario_path(const std::string& name) {
    return scenario_dir() + "/" + name;
}

struct OraclePath {
    bool reachable = false;
    double cost = 0.0;
    std::vector<NodeId> nodes;
};

// Exhaustive minimum over all simple paths, cost accumulated left to right,
// ties resolved toward the lexicographically smallest node sequence.
inline OraclePath brute_force_best_path(const RoadGraph& graph, const WeightMatrix& weights,
                                        NodeId from, NodeId to) {
    OraclePath best;
    std::vector<NodeId> current{from};
    std::vector<char> used(graph.node_count(), 0);
    used[from] = 1;

    auto consider = [&](double cost) {
        if (!best.reachable || cost < best.cost ||
            (cost == best.cost && current < best.nodes)) {
            best.reachable = true;
            best.cost = cost;
            best.nodes = current;
        }
    };

    std::function<void(NodeId, double)> dfs = [&](NodeId u, double cost) {
        if (u == to) {
            consider(cost);
            return;
        }
        for (EdgeId eid : graph.outgoing(u)) {
            const NodeId v = graph.edge(eid).to;
            if (used[v]) continue;
            used[v] = 1;
            current.push_back(v);
            dfs(v, cost + weights.at(u, v));
            current.pop_back();
            used[v] = 0;
        }
    };
    dfs(from, 0.0);
    return best;
}

struct RandomGraph {
    RoadGraph graph;
    WeightMatrix weights;
};

// Random directed graph with <= max_nodes nodes and positive edge weights.
inline RandomGraph random_weighted_graph(RngStream& rng, std::uint32_t max_nodes = 8) {
    const std::uint32_t n = 2 + rng.uniform_below(max_nodes - 1);
    std::vector<Node> nodes;
    for (std::uint32_t i = 0; i < n; ++i)
        nodes.push_back({i, {static_cast<double>(i), 0.0}});
    std::vector<Edge> edges;
    for (std::uint32_t i = 0; i < n; ++i)
        for (std::uint32_t j = 0; j < n; ++j) {
            if (i == j) continue;
            if (rng.uniform01() < 0.45) edges.push_back({i, j, 1.0, 1, 1.0});
        }
    RandomGraph out{RoadGraph::build(nodes, edges), WeightMatrix(n, 0.0)};
    for (const Edge& e : out.graph.edges())
        out.weights.at(e.from, e.to) = 0.1 + 9.9 * rng.uniform01();
    return out;
}

// Minimal scenario JSON for hand-built graphs in tests.
inline std::string two_node_scenario() {
    return R"({
      "nodes": [{"id": 0, "x": 0, "y": 0}, {"id": 1, "x": 100, "y": 0}],
      "edges": [{"from": 0, "to": 1, "length_m": 100.0, "lanes": 1, "v_free_mps": 10.0}]
    })";
}

inline std::uint64_t fnv1a64_bytes(const std::string& data) {
    return aoifleet::fnv1a64(data);
}

}  // namespace test_helpers
