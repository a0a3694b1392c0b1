#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace aoifleet {

using NodeId = std::uint32_t;
using EdgeId = std::uint32_t;

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    friend bool operator==(const Vec2&, const Vec2&) = default;
};

inline double distance(const Vec2& a, const Vec2& b) {
    const double dx = a.x - b.x;
    const double dy = a.y - b.y;
    return std::sqrt(dx * dx + dy * dy);
}

struct Node {
    NodeId id = 0;
    Vec2 pos;

    friend bool operator==(const Node&, const Node&) = default;
};

// Directed road segment. length_m > 0, v_free_mps > 0, no self loops, and at
// most one edge per ordered (from, to) pair.
struct Edge {
    NodeId from = 0;
    NodeId to = 0;
    double length_m = 0.0;
    int lanes = 1;
    double v_free_mps = 0.0;

    friend bool operator==(const Edge&, const Edge&) = default;
};

// Traversal time at free-flow speed.
inline double free_flow_time(const Edge& e) { return e.length_m / e.v_free_mps; }

// Immutable directed road network. Adjacency lists are ordered by target node
// id; that ordering is the global tie-break order for everything downstream.
class RoadGraph {
public:
    RoadGraph() = default;

    static RoadGraph build(std::vector<Node> nodes, std::vector<Edge> edges) {
        RoadGraph g;
        g.nodes_ = std::move(nodes);
        g.edges_ = std::move(edges);
        for (std::size_t i = 0; i < g.nodes_.size(); ++i) {
            if (g.nodes_[i].id != static_cast<NodeId>(i))
                throw std::invalid_argument("node ids must be dense 0..|V|-1 and in order");
        }
        for (const Edge& e : g.edges_) {
            if (e.from == e.to) throw std::invalid_argument("self-loop edge");
            if (e.from >= g.nodes_.size() || e.to >= g.nodes_.size())
                throw std::invalid_argument("edge endpoint out of range");
            if (!(e.length_m > 0.0)) throw std::invalid_argument("edge length must be > 0");
            if (!(e.v_free_mps > 0.0)) throw std::invalid_argument("edge v_free must be > 0");
            if (e.lanes < 1) throw std::invalid_argument("edge lanes must be >= 1");
        }
        g.adjacency_.assign(g.nodes_.size(), {});
        for (EdgeId i = 0; i < g.edges_.size(); ++i) {
            const Edge& e = g.edges_[i];
            auto [it, inserted] = g.lookup_.emplace(std::make_pair(e.from, e.to), i);
            if (!inserted) throw std::invalid_argument("duplicate edge for ordered node pair");
            g.adjacency_[e.from].push_back(i);
        }
        for (auto& out : g.adjacency_) {
            std::sort(out.begin(), out.end(), [&](EdgeId a, EdgeId b) {
                return g.edges_[a].to < g.edges_[b].to;
            });
        }
        return g;
    }

    std::size_t node_count() const { return nodes_.size(); }
    std::size_t edge_count() const { return edges_.size(); }

    const Node& node(NodeId id) const {
        if (id >= nodes_.size()) throw std::out_of_range("unknown node " + std::to_string(id));
        return nodes_[id];
    }

    const Edge& edge(EdgeId id) const {
        if (id >= edges_.size()) throw std::out_of_range("unknown edge " + std::to_string(id));
        return edges_[id];
    }

    const std::vector<Node>& nodes() const { return nodes_; }
    const std::vector<Edge>& edges() const { return edges_; }

    // Outgoing edges of a node, ordered by target id ascending.
    std::span<const EdgeId> outgoing(NodeId node) const {
        if (node >= nodes_.size())
            throw std::out_of_range("unknown node " + std::to_string(node));
        return adjacency_[node];
    }

    std::optional<EdgeId> find_edge(NodeId from, NodeId to) const {
        auto it = lookup_.find(std::make_pair(from, to));
        if (it == lookup_.end()) return std::nullopt;
        return it->second;
    }

    friend bool operator==(const RoadGraph& a, const RoadGraph& b) {
        return a.nodes_ == b.nodes_ && a.edges_ == b.edges_;
    }

private:
    std::vector<Node> nodes_;
    std::vector<Edge> edges_;
    std::vector<std::vector<EdgeId>> adjacency_;
    std::map<std::pair<NodeId, NodeId>, EdgeId> lookup_;
};

}  // namespace aoifleet
