#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "aoifleet/events.hpp"
#include "aoifleet/fleet.hpp"
#include "aoifleet/freshness_ledger.hpp"
#include "aoifleet/rng.hpp"
#include "aoifleet/road_graph.hpp"
#include "aoifleet/router.hpp"
#include "aoifleet/scenario.hpp"
#include "aoifleet/traffic_model.hpp"

namespace aoifleet {

enum class Method { Proposal, Conventional };

inline const char* to_string(Method m) {
    return m == Method::Proposal ? "proposal" : "conventional";
}

inline Method method_from_string(const std::string& s) {
    if (s == "proposal") return Method::Proposal;
    if (s == "conventional") return Method::Conventional;
    throw std::invalid_argument("unknown method '" + s + "'");
}

struct TimeWindow {
    std::string label;
    double start_s = 0.0;
    double end_s = 0.0;

    friend bool operator==(const TimeWindow&, const TimeWindow&) = default;
};

// Normal / congestion / post-congestion partition of [0, horizon], derived
// from the congestion schedule. Without a schedule the whole horizon is one
// "normal" window. A sample at t belongs to [start, end); the last window
// also owns t == horizon.
inline std::vector<TimeWindow> derive_windows(const ScenarioConfig& cfg) {
    const double horizon = cfg.params.horizon_s;
    std::vector<TimeWindow> out;
    if (cfg.congestion.empty()) {
        out.push_back({"normal", 0.0, horizon});
        return out;
    }
    double start = cfg.congestion.front().start_s;
    double end = cfg.congestion.front().end_s;
    for (const CongestionConfig& c : cfg.congestion) {
        start = std::min(start, c.start_s);
        end = std::max(end, c.end_s);
    }
    start = std::clamp(start, 0.0, horizon);
    end = std::clamp(end, 0.0, horizon);
    if (start > 0.0) out.push_back({"normal", 0.0, start});
    if (end > start) out.push_back({"congestion", start, end});
    if (horizon > end) out.push_back({"post", end, horizon});
    return out;
}

struct BackgroundVehicle {
    EdgeId edge = 0;
    double fraction = 0.0;
    RngStream rng;
    std::uint64_t turns = 0;
};

struct CongestionEvent {
    std::vector<EdgeId> edges;
    double start_s = 0.0;
    double end_s = 0.0;
    double density_fraction = 0.0;

    bool active_at(double t) const { return start_s <= t && t < end_s; }
};

// Ground truth the twin is trying to track: true per-edge densities derived
// from agent counts, plus any active congestion override.
struct GroundTruthTraffic {
    std::vector<double> k_true;   // after overrides
    std::vector<int> counts;      // background + CAV agents per edge
    std::vector<BackgroundVehicle> background;

    void recount(const RoadGraph& graph, const FleetState& fleet, double k_max) {
        counts.assign(graph.edge_count(), 0);
        for (const BackgroundVehicle& b : background) ++counts[b.edge];
        for (const VehicleAgent& v : fleet.vehicles)
            if (v.pos.edge) ++counts[*v.pos.edge];
        k_true.resize(graph.edge_count());
        for (EdgeId e = 0; e < graph.edge_count(); ++e) {
            const Edge& edge = graph.edge(e);
            const double k = counts[e] / (edge.length_m * edge.lanes);
            k_true[e] = std::clamp(k, 0.0, k_max);
        }
    }
};

// Overlapping overrides on one edge resolve to the maximum fraction.
inline void apply_congestion(GroundTruthTraffic& truth,
                             const std::vector<CongestionEvent>& events, double t,
                             double k_max) {
    for (const CongestionEvent& ev : events) {
        if (!ev.active_at(t)) continue;
        for (EdgeId e : ev.edges)
            truth.k_true[e] = std::max(truth.k_true[e], ev.density_fraction * k_max);
    }
}

struct LedgerTraceRow {
    double t = 0.0;
    EdgeId edge = 0;
    double k = 0.0;
    double age_s = 0.0;
};

struct SimulationResult {
    std::string method;
    std::uint64_t seed = 0;
    std::string scenario_id;
    double dt_s = 0.0;
    double horizon_s = 0.0;
    std::vector<double> aoi_series;   // sampled at t = 0, dt, ..., horizon
    std::vector<DeliveryTask> tasks;
    std::vector<Event> events;
    std::vector<TimeWindow> windows;
    std::vector<LedgerTraceRow> ledger_trace;   // only when tracing is enabled
};

inline std::string scenario_fingerprint(const ScenarioConfig& cfg) {
    const std::uint64_t h = fnv1a64(cfg.to_json().dump());
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

// One simulation instance. Owns all mutable state; never shared across runs.
class World {
public:
    World(const RoadGraph& graph, const ScenarioConfig& cfg, std::uint64_t seed, Method method,
          bool trace_ledger = false)
        : graph_(&graph),
          cfg_(cfg),
          method_(method),
          seed_(seed),
          trace_ledger_(trace_ledger),
          ledger_(graph.edge_count(), cfg.params.model.k_max, cfg.params.aoi_cap_s) {
        plan_params_ = cfg_.params.model;
        if (method_ == Method::Conventional) plan_params_.beta_per_s = 0.0;

        for (const RsuConfig& r : cfg_.rsus) {
            std::vector<EdgeId> cov;
            for (auto [f, t] : r.coverage) cov.push_back(*graph_->find_edge(f, t));
            rsu_coverage_.push_back(std::move(cov));
        }
        for (const CongestionConfig& c : cfg_.congestion) {
            CongestionEvent ev;
            for (auto [f, t] : c.edges) ev.edges.push_back(*graph_->find_edge(f, t));
            ev.start_s = c.start_s;
            ev.end_s = c.end_s;
            ev.density_fraction = c.density_fraction;
            congestion_.push_back(std::move(ev));
        }
        congestion_active_.assign(congestion_.size(), false);

        std::vector<VehicleConfig> vehicles = cfg_.vehicles;
        std::sort(vehicles.begin(), vehicles.end(),
                  [](const VehicleConfig& a, const VehicleConfig& b) { return a.id < b.id; });
        for (const VehicleConfig& vc : vehicles) {
            VehicleAgent v;
            v.id = vc.id;
            v.pos.node = vc.start;
            v.sensing_radius_m = cfg_.params.sensing_radius_m;
            fleet_.vehicles.push_back(v);
        }

        RngStream task_stream = make_stream(seed_, "tasks");
        fleet_.tasks = generate_tasks(cfg_, task_stream);

        const std::uint64_t bg_seed = cfg_.background.seed_policy == BackgroundConfig::SeedPolicy::Fixed
                                          ? cfg_.background.fixed_seed
                                          : seed_;
        for (int i = 0; i < cfg_.background.count; ++i) {
            BackgroundVehicle b;
            b.rng = make_stream(bg_seed, "background", static_cast<std::uint64_t>(i));
            b.edge = b.rng.uniform_below(static_cast<std::uint32_t>(graph_->edge_count()));
            b.fraction = b.rng.uniform01();
            truth_.background.push_back(std::move(b));
        }

        events_.push_back(Event{0.0, "run_start", -1,
                                {{"seed", seed_},
                                 {"method", to_string(method_)},
                                 {"scenario", scenario_fingerprint(cfg_)}}});

        // Sensors are already on at t = 0: refresh, then take the first sample.
        truth_.recount(*graph_, fleet_, k_max());
        apply_congestion(truth_, congestion_, 0.0, k_max());
        observe_all(0.0);
        aoi_series_.push_back(ledger_.spatial_average_aoi(0.0));
        record_trace(0.0);
    }

    double clock() const { return static_cast<double>(tick_index_) * cfg_.params.dt_s; }
    const TwinLedger& ledger() const { return ledger_; }
    const GroundTruthTraffic& truth() const { return truth_; }
    const FleetState& fleet() const { return fleet_; }
    FleetState& fleet() { return fleet_; }
    const std::vector<Event>& events() const { return events_; }
    const std::vector<double>& aoi_series() const { return aoi_series_; }
    const ScenarioConfig& config() const { return cfg_; }
    std::int64_t tick_index() const { return tick_index_; }

    // One time step. Substep order is fixed; reordering changes results.
    void tick() {
        const double dt = cfg_.params.dt_s;
        ++tick_index_;
        const double now = clock();

        background_traffic_step(dt);
        truth_.recount(*graph_, fleet_, k_max());
        apply_congestion(truth_, congestion_, now, k_max());
        note_congestion_transitions(now);

        enqueue_arrivals(now);

        for (std::size_t i = 0; i < rsu_coverage_.size(); ++i)
            apply_rsu_coverage(ledger_, rsu_coverage_[i], now, truth_.k_true);

        AdvanceContext ctx;
        ctx.graph = graph_;
        ctx.k_true = truth_.k_true;
        ctx.params = cfg_.params.model;
        ctx.replan = cfg_.params.replan;
        ctx.planner = [this, now](const VehicleAgent& v, Phase target) {
            return plan_for(v, target, now);
        };

        for (VehicleAgent& v : fleet_.vehicles) {
            apply_sensing_footprint(ledger_, *graph_, v.pos.world_pos(*graph_),
                                    v.sensing_radius_m, now, truth_.k_true);
            if (v.phase != Phase::Idle && !v.plan) {
                // a previous planning attempt failed; retry at the tick boundary
                if (auto plan = plan_for(v, v.phase, now)) {
                    v.plan = std::move(*plan);
                    v.leg = 0;
                }
            }
            auto evs = advance_vehicle(v, dt, ctx, fleet_, now);
            events_.insert(events_.end(), evs.begin(), evs.end());
        }
        truth_.recount(*graph_, fleet_, k_max());
        apply_congestion(truth_, congestion_, now, k_max());

        assignment_pass(now);

        aoi_series_.push_back(ledger_.spatial_average_aoi(now));
        record_trace(now);
    }

    SimulationResult result() const {
        SimulationResult r;
        r.method = to_string(method_);
        r.seed = seed_;
        r.scenario_id = scenario_fingerprint(cfg_);
        r.dt_s = cfg_.params.dt_s;
        r.horizon_s = cfg_.params.horizon_s;
        r.aoi_series = aoi_series_;
        r.tasks = fleet_.tasks;
        r.events = events_;
        r.windows = derive_windows(cfg_);
        r.ledger_trace = trace_rows_;
        return r;
    }

private:
    double k_max() const { return cfg_.params.model.k_max; }

    void observe_all(double t) {
        for (const auto& cov : rsu_coverage_) apply_rsu_coverage(ledger_, cov, t, truth_.k_true);
        for (const VehicleAgent& v : fleet_.vehicles)
            apply_sensing_footprint(ledger_, *graph_, v.pos.world_pos(*graph_),
                                    v.sensing_radius_m, t, truth_.k_true);
    }

    // Background agents drive the current densities and pick a uniformly
    // random outgoing edge at each node, each from its own stream.
    void background_traffic_step(double dt) {
        const double now = clock();
        for (std::size_t i = 0; i < truth_.background.size(); ++i) {
            BackgroundVehicle& b = truth_.background[i];
            double budget = dt;
            while (budget > 1e-12) {
                const Edge& e = graph_->edge(b.edge);
                const double k =
                    b.edge < truth_.k_true.size() ? truth_.k_true[b.edge] : 0.0;
                const double speed =
                    fd_speed(std::clamp(k, 0.0, k_max()), e.v_free_mps, k_max(),
                             cfg_.params.model.epsilon_v_mps);
                const double need = (1.0 - b.fraction) * e.length_m / speed;
                if (need > budget) {
                    b.fraction += speed * budget / e.length_m;
                    break;
                }
                budget -= need;
                const NodeId node = e.to;
                auto out = graph_->outgoing(node);
                if (out.empty()) {
                    b.fraction = 1.0;  // dead end; parked
                    break;
                }
                const std::uint32_t pick =
                    b.rng.uniform_below(static_cast<std::uint32_t>(out.size()));
                b.edge = out[pick];
                b.fraction = 0.0;
                events_.push_back(Event{now, "bg_turn", static_cast<std::int64_t>(i),
                                        {{"ordinal", b.turns},
                                         {"node", node},
                                         {"to", graph_->edge(b.edge).to}}});
                ++b.turns;
            }
        }
    }

    void note_congestion_transitions(double now) {
        for (std::size_t i = 0; i < congestion_.size(); ++i) {
            const bool active = congestion_[i].active_at(now);
            if (active && !congestion_active_[i])
                events_.push_back(Event{now, "congestion_start", static_cast<std::int64_t>(i),
                                        {{"edges", congestion_[i].edges.size()}}});
            if (!active && congestion_active_[i])
                events_.push_back(Event{now, "congestion_end", static_cast<std::int64_t>(i), {}});
            congestion_active_[i] = active;
        }
    }

    void enqueue_arrivals(double now) {
        while (next_task_ < fleet_.tasks.size() &&
               fleet_.tasks[next_task_].arrival_s <= now) {
            const DeliveryTask& t = fleet_.tasks[next_task_];
            fleet_.pending.push_back(t.id);
            events_.push_back(Event{now, "task_arrival", static_cast<std::int64_t>(t.id),
                                    {{"arrival_s", t.arrival_s},
                                     {"pickup", t.pickup},
                                     {"dropoff", t.dropoff}}});
            ++next_task_;
        }
    }

    void record_trace(double t) {
        if (!trace_ledger_) return;
        for (EdgeId e = 0; e < graph_->edge_count(); ++e)
            trace_rows_.push_back({t, e, ledger_.state(e).density, ledger_.age(e, t)});
    }

    std::optional<RoutePlan> plan_for(const VehicleAgent& v, Phase target, double now) {
        if (!v.task_id) return std::nullopt;
        const DeliveryTask& task = fleet_.tasks[*v.task_id];
        try {
            if (target == Phase::Transporting) {
                RoutePlan p = plan_transport_route(*graph_, ledger_, now, v.pos.node,
                                                   task.dropoff, plan_params_);
                return p;
            }
            const WeightMatrix w = build_weight_matrix(*graph_, ledger_, now, plan_params_);
            return plan_exploration_route(*graph_, w, v.pos.node, task.pickup);
        } catch (const RouteError&) {
            return std::nullopt;
        }
    }

    // Strict FIFO: the head task takes the cheapest idle vehicle; when the
    // head cannot be served the whole queue waits.
    void assignment_pass(double now) {
        while (!fleet_.pending.empty()) {
            DeliveryTask& task = fleet_.tasks[fleet_.pending.front()];
            const WeightMatrix w = build_weight_matrix(*graph_, ledger_, now, plan_params_);
            auto vehicle = assign_task(fleet_, task, *graph_, w, now);
            if (!vehicle) break;
            events_.push_back(Event{now, "task_assigned", static_cast<std::int64_t>(task.id),
                                    {{"vehicle", *vehicle},
                                     {"cost", fleet_.vehicle_by_id(*vehicle).plan->total_cost}}});
            fleet_.pending.pop_front();
        }
    }

    const RoadGraph* graph_;
    ScenarioConfig cfg_;
    Method method_;
    std::uint64_t seed_;
    bool trace_ledger_ = false;
    ModelParams plan_params_;

    TwinLedger ledger_;
    GroundTruthTraffic truth_;
    FleetState fleet_;
    std::vector<std::vector<EdgeId>> rsu_coverage_;
    std::vector<CongestionEvent> congestion_;
    std::vector<bool> congestion_active_;
    std::size_t next_task_ = 0;
    std::int64_t tick_index_ = 0;

    std::vector<Event> events_;
    std::vector<double> aoi_series_;
    std::vector<LedgerTraceRow> trace_rows_;
};

// Full run: ticks from 0 to the horizon and packages the outputs.
inline SimulationResult run(const RoadGraph& graph, const ScenarioConfig& cfg,
                            std::uint64_t seed, Method method, bool trace_ledger = false) {
    World world(graph, cfg, seed, method, trace_ledger);
    const auto ticks =
        static_cast<std::int64_t>(std::llround(cfg.params.horizon_s / cfg.params.dt_s));
    for (std::int64_t i = 0; i < ticks; ++i) world.tick();
    return world.result();
}

}  // namespace aoifleet
