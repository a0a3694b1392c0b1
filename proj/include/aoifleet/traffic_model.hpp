#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "aoifleet/freshness_ledger.hpp"
#include "aoifleet/road_graph.hpp"

namespace aoifleet {

struct ModelParams {
    double beta_per_s = 0.05;      // freshness decay rate; 0 = trust stored data fully
    double k_max = 0.15;           // jam density, veh per meter per lane
    double epsilon_v_mps = 0.1;    // speed floor; keeps travel times finite at jam density

    friend bool operator==(const ModelParams&, const ModelParams&) = default;
};

// Linear density-speed law, floored so jammed edges stay traversable.
inline double fd_speed(double k, double v_free, double k_max, double epsilon_v) {
    if (!(k >= 0.0) || k > k_max) throw std::invalid_argument("density out of [0, k_max]");
    return std::max(v_free * (1.0 - k / k_max), epsilon_v);
}

// Traversal time implied by the last observed density.
inline double dynamic_travel_time(const Edge& e, double k, const ModelParams& p) {
    return e.length_m / fd_speed(k, e.v_free_mps, p.k_max, p.epsilon_v_mps);
}

// Freshness-decayed travel time: blends the dynamic estimate toward the
// free-flow baseline as the underlying observation ages.
//   T = (T_dyn - T_free) * exp(-beta * delta) + T_free
inline double effective_travel_time_for_age(const Edge& e, double k, double delta_s,
                                            const ModelParams& p) {
    const double t_dyn = dynamic_travel_time(e, k, p);
    if (p.beta_per_s == 0.0) return t_dyn;
    const double t_free = free_flow_time(e);
    if (std::isinf(delta_s)) return t_free;
    if (!(delta_s >= 0.0)) throw std::invalid_argument("age must be >= 0");
    return (t_dyn - t_free) * std::exp(-p.beta_per_s * delta_s) + t_free;
}

inline double effective_travel_time(const Edge& e, const EdgeTwinState& twin, double t,
                                    const ModelParams& p) {
    if (!twin.last_update) {
        // Never observed: the stored default density is free flow and the
        // stale limit of the blend is T_free, so both routes agree exactly.
        if (p.beta_per_s == 0.0) return dynamic_travel_time(e, twin.density, p);
        return free_flow_time(e);
    }
    return effective_travel_time_for_age(e, twin.density, t - *twin.last_update, p);
}

// Dense |V| x |V| snapshot of effective travel times at one instant.
// Finite entries exist exactly where an edge exists.
class WeightMatrix {
public:
    WeightMatrix() = default;

    WeightMatrix(std::size_t n, double evaluated_at)
        : n_(n),
          evaluated_at_(evaluated_at),
          w_(n * n, std::numeric_limits<double>::infinity()) {}

    std::size_t size() const { return n_; }
    double evaluated_at() const { return evaluated_at_; }

    double at(NodeId i, NodeId j) const { return w_[i * n_ + j]; }
    double& at(NodeId i, NodeId j) { return w_[i * n_ + j]; }

private:
    std::size_t n_ = 0;
    double evaluated_at_ = 0.0;
    std::vector<double> w_;
};

inline WeightMatrix build_weight_matrix(const RoadGraph& graph, const TwinLedger& ledger,
                                        double t, const ModelParams& p) {
    if (ledger.size() != graph.edge_count())
        throw std::invalid_argument("ledger size does not match graph edge count");
    WeightMatrix m(graph.node_count(), t);
    for (EdgeId e = 0; e < graph.edge_count(); ++e) {
        const Edge& edge = graph.edge(e);
        m.at(edge.from, edge.to) = effective_travel_time(edge, ledger.state(e), t, p);
    }
    return m;
}

}  // namespace aoifleet
