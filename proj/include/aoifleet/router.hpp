#pragma once

#include <limits>
#include <queue>
#include <stdexcept>
#include <string>
#include <vector>

#include "aoifleet/freshness_ledger.hpp"
#include "aoifleet/road_graph.hpp"
#include "aoifleet/traffic_model.hpp"

namespace aoifleet {

enum class Phase { Idle, ToPickup, Transporting };

inline const char* to_string(Phase p) {
    switch (p) {
        case Phase::Idle: return "idle";
        case Phase::ToPickup: return "to_pickup";
        case Phase::Transporting: return "transporting";
    }
    return "?";
}

struct RoutePlan {
    std::vector<NodeId> nodes;   // simple path, first = current position, last = target
    double total_cost = 0.0;     // sum of snapshot weights along the path
    double planned_at = 0.0;
    Phase phase = Phase::Idle;

    friend bool operator==(const RoutePlan&, const RoutePlan&) = default;
};

class RouteError : public std::runtime_error {
public:
    enum class Kind { UnknownNode, Unreachable };

    RouteError(Kind kind, const std::string& what) : std::runtime_error(what), kind(kind) {}

    Kind kind;
};

namespace detail {

// Lexicographic order of (prefix + [tail]) vs. full, where both describe
// simple paths ending at the same node. No simple path ending at a node is a
// proper prefix of another one ending there, so the comparison always
// resolves before running off either sequence.
inline bool lex_less_with_tail(const std::vector<NodeId>& prefix, NodeId tail,
                               const std::vector<NodeId>& full) {
    const std::size_t n = std::min(prefix.size(), full.size());
    for (std::size_t i = 0; i < n; ++i) {
        if (prefix[i] != full[i]) return prefix[i] < full[i];
    }
    if (prefix.size() < full.size()) return tail < full[prefix.size()];
    return false;
}

// Dijkstra over a weight snapshot. Positive weights make minimum paths
// simple, so the no-revisit constraint needs no explicit enforcement. Ties
// are broken toward the lexicographically smallest node sequence.
inline RoutePlan shortest_path(const RoadGraph& graph, const WeightMatrix& weights,
                               NodeId from, NodeId to) {
    if (from >= graph.node_count())
        throw RouteError(RouteError::Kind::UnknownNode, "unknown node " + std::to_string(from));
    if (to >= graph.node_count())
        throw RouteError(RouteError::Kind::UnknownNode, "unknown node " + std::to_string(to));

    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> dist(graph.node_count(), inf);
    std::vector<std::vector<NodeId>> path(graph.node_count());
    std::vector<char> settled(graph.node_count(), 0);

    using QueueItem = std::pair<double, NodeId>;
    std::priority_queue<QueueItem, std::vector<QueueItem>, std::greater<>> queue;

    dist[from] = 0.0;
    path[from] = {from};
    queue.emplace(0.0, from);

    while (!queue.empty()) {
        const auto [d, u] = queue.top();
        queue.pop();
        if (settled[u]) continue;
        settled[u] = 1;
        if (u == to) break;
        for (EdgeId eid : graph.outgoing(u)) {
            const NodeId v = graph.edge(eid).to;
            if (settled[v]) continue;
            const double alt = dist[u] + weights.at(u, v);
            if (alt < dist[v]) {
                dist[v] = alt;
                path[v] = path[u];
                path[v].push_back(v);
                queue.emplace(alt, v);
            } else if (alt == dist[v] && lex_less_with_tail(path[u], v, path[v])) {
                path[v] = path[u];
                path[v].push_back(v);
            }
        }
    }

    if (dist[to] == inf)
        throw RouteError(RouteError::Kind::Unreachable,
                         "node " + std::to_string(to) + " unreachable from " +
                             std::to_string(from));

    RoutePlan plan;
    plan.nodes = std::move(path[to]);
    plan.total_cost = dist[to];
    plan.planned_at = weights.evaluated_at();
    return plan;
}

}  // namespace detail

// Pickup-leg route: minimum total weight under the freshness-decayed
// snapshot, which biases empty vehicles toward stale regions.
inline RoutePlan plan_exploration_route(const RoadGraph& graph, const WeightMatrix& weights,
                                        NodeId position, NodeId pickup) {
    RoutePlan plan = detail::shortest_path(graph, weights, position, pickup);
    plan.phase = Phase::ToPickup;
    return plan;
}

// Transport-leg route: fastest path on the raw dynamic snapshot (decay off).
inline RoutePlan plan_transport_route(const RoadGraph& graph, const TwinLedger& ledger,
                                      double t, NodeId pickup, NodeId dropoff,
                                      const ModelParams& params) {
    ModelParams trusting = params;
    trusting.beta_per_s = 0.0;
    const WeightMatrix weights = build_weight_matrix(graph, ledger, t, trusting);
    RoutePlan plan = detail::shortest_path(graph, weights, pickup, dropoff);
    plan.phase = Phase::Transporting;
    return plan;
}

struct ReplanPolicy {
    enum class Kind { EveryNode, Interval };

    Kind kind = Kind::EveryNode;
    double interval_s = 30.0;

    friend bool operator==(const ReplanPolicy&, const ReplanPolicy&) = default;
};

// Replanning happens only while standing exactly on a node.
inline bool should_replan(bool at_node, double plan_age_s, const ReplanPolicy& policy) {
    if (!at_node) return false;
    if (policy.kind == ReplanPolicy::Kind::EveryNode) return true;
    return plan_age_s >= policy.interval_s;
}

}  // namespace aoifleet
