#pragma once

#include <algorithm>
#include <utility>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "aoifleet/road_graph.hpp"

namespace aoifleet {

// Digital-twin view of one edge: last observed density and when it was seen.
struct EdgeTwinState {
    double density = 0.0;                     // veh per meter per lane
    std::optional<double> last_update;        // simulation seconds; empty = never observed

    friend bool operator==(const EdgeTwinState&, const EdgeTwinState&) = default;
};

// Per-edge freshness ledger. Age of an edge is the time since its last
// observation; never-observed edges report the configured initial age
// (default: the cap used when averaging, so the metric is finite at t=0).
class TwinLedger {
public:
    TwinLedger() = default;

    TwinLedger(std::size_t edge_count, double k_max, double aoi_cap_s = 300.0,
               std::optional<double> initial_age_s = std::nullopt)
        : states_(edge_count),
          k_max_(k_max),
          aoi_cap_s_(aoi_cap_s),
          initial_age_s_(initial_age_s.value_or(aoi_cap_s)) {
        if (!(k_max_ > 0.0)) throw std::invalid_argument("k_max must be > 0");
        if (!(aoi_cap_s_ > 0.0)) throw std::invalid_argument("aoi_cap must be > 0");
    }

    std::size_t size() const { return states_.size(); }
    double clock() const { return clock_; }
    double aoi_cap() const { return aoi_cap_s_; }
    double k_max() const { return k_max_; }

    const EdgeTwinState& state(EdgeId edge) const { return checked(edge); }

    void record_observation(EdgeId edge, double t, double k_observed) {
        EdgeTwinState& s = checked(edge);
        if (!(k_observed >= 0.0) || k_observed > k_max_)
            throw std::invalid_argument("observed density out of [0, k_max]");
        if (s.last_update && t < *s.last_update)
            throw std::invalid_argument("observation time regression on edge " +
                                        std::to_string(edge));
        s.density = k_observed;
        s.last_update = t;
        clock_ = std::max(clock_, t);
    }

    double age(EdgeId edge, double t) const {
        const EdgeTwinState& s = checked(edge);
        if (!s.last_update) return initial_age_s_;
        if (t < *s.last_update)
            throw std::invalid_argument("age queried before last observation");
        return t - *s.last_update;
    }

    // Spatially averaged age across all edges; each contribution is clipped
    // at the cap so the metric stays finite.
    double spatial_average_aoi(double t) const {
        if (states_.empty()) throw std::logic_error("spatial_average_aoi on empty ledger");
        double sum = 0.0;
        for (EdgeId e = 0; e < states_.size(); ++e)
            sum += std::min(age(e, t), aoi_cap_s_);
        return sum / static_cast<double>(states_.size());
    }

private:
    const EdgeTwinState& checked(EdgeId edge) const {
        if (edge >= states_.size())
            throw std::out_of_range("unknown edge " + std::to_string(edge));
        return states_[edge];
    }

    EdgeTwinState& checked(EdgeId edge) {
        return const_cast<EdgeTwinState&>(std::as_const(*this).checked(edge));
    }

    std::vector<EdgeTwinState> states_;
    double k_max_ = 1.0;
    double aoi_cap_s_ = 300.0;
    double initial_age_s_ = 300.0;
    double clock_ = 0.0;
};

// An edge is inside a sensor's footprint when both of its endpoints lie
// within radius_m of the sensor position.
inline void apply_sensing_footprint(TwinLedger& ledger, const RoadGraph& graph,
                                    const Vec2& sensor_pos, double radius_m, double t,
                                    std::span<const double> ground_truth_k) {
    if (!(radius_m > 0.0)) throw std::invalid_argument("sensing radius must be > 0");
    for (EdgeId e = 0; e < graph.edge_count(); ++e) {
        const Edge& edge = graph.edge(e);
        if (distance(graph.node(edge.from).pos, sensor_pos) <= radius_m &&
            distance(graph.node(edge.to).pos, sensor_pos) <= radius_m) {
            ledger.record_observation(e, t, ground_truth_k[e]);
        }
    }
}

// RSU path: fixed coverage list, applied every tick, no geometry involved.
inline void apply_rsu_coverage(TwinLedger& ledger, std::span<const EdgeId> coverage, double t,
                               std::span<const double> ground_truth_k) {
    for (EdgeId e : coverage) ledger.record_observation(e, t, ground_truth_k[e]);
}

}  // namespace aoifleet
