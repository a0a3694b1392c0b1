#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "aoifleet/events.hpp"
#include "aoifleet/rng.hpp"
#include "aoifleet/road_graph.hpp"
#include "aoifleet/router.hpp"
#include "aoifleet/scenario.hpp"
#include "aoifleet/traffic_model.hpp"

namespace aoifleet {

struct DeliveryTask {
    std::uint32_t id = 0;
    NodeId pickup = 0;
    NodeId dropoff = 0;
    double arrival_s = 0.0;
    std::optional<double> assigned_t;
    std::optional<double> pickup_t;
    std::optional<double> complete_t;
    std::optional<std::uint32_t> vehicle;

    friend bool operator==(const DeliveryTask&, const DeliveryTask&) = default;
};

// Either standing exactly on a node, or part-way along a directed edge.
struct VehiclePosition {
    NodeId node = 0;                  // meaningful when not on an edge
    std::optional<EdgeId> edge;
    double fraction = 0.0;            // in [0, 1], fraction of edge length traveled

    bool at_node() const { return !edge.has_value(); }

    Vec2 world_pos(const RoadGraph& g) const {
        if (!edge) return g.node(node).pos;
        const Edge& e = g.edge(*edge);
        const Vec2 a = g.node(e.from).pos;
        const Vec2 b = g.node(e.to).pos;
        return {a.x + (b.x - a.x) * fraction, a.y + (b.y - a.y) * fraction};
    }

    friend bool operator==(const VehiclePosition&, const VehiclePosition&) = default;
};

struct VehicleAgent {
    std::uint32_t id = 0;
    VehiclePosition pos;
    Phase phase = Phase::Idle;
    std::optional<RoutePlan> plan;
    std::size_t leg = 0;              // index into plan.nodes of the node last reached
    double sensing_radius_m = 50.0;
    std::optional<std::uint32_t> task_id;
};

struct FleetState {
    std::vector<VehicleAgent> vehicles;
    std::vector<DeliveryTask> tasks;        // indexed by task id
    std::deque<std::uint32_t> pending;      // FIFO of unassigned task ids
    std::vector<std::uint32_t> completed;   // in completion order

    VehicleAgent& vehicle_by_id(std::uint32_t id) {
        for (VehicleAgent& v : vehicles)
            if (v.id == id) return v;
        throw std::out_of_range("unknown vehicle " + std::to_string(id));
    }
};

inline bool maybe_replan(const VehicleAgent& v, double now, const ReplanPolicy& policy) {
    if (!v.plan) return false;
    return should_replan(v.pos.at_node(), now - v.plan->planned_at, policy);
}

// ---------------------------------------------------------------------------
// task generation

// Explicit lists pass through unchanged. A process draws Poisson arrivals
// with pickup/dropoff uniform over all nodes (dropoff never equals pickup).
inline std::vector<DeliveryTask> generate_tasks(const ScenarioConfig& cfg, RngStream& rng) {
    std::vector<DeliveryTask> out;
    if (const auto* list = std::get_if<std::vector<TaskSpec>>(&cfg.tasks)) {
        for (const TaskSpec& spec : *list) {
            DeliveryTask t;
            t.id = static_cast<std::uint32_t>(out.size());
            t.arrival_s = spec.arrival_s;
            t.pickup = spec.pickup;
            t.dropoff = spec.dropoff;
            out.push_back(t);
        }
        return out;
    }
    const auto& proc = std::get<TaskProcess>(cfg.tasks);
    if (!(proc.rate_per_min > 0.0)) throw std::invalid_argument("task rate must be > 0");
    const auto pool = static_cast<std::uint32_t>(cfg.nodes.size());
    if (pool < 2) throw std::invalid_argument("task pool needs at least two nodes");
    const double rate_per_s = proc.rate_per_min / 60.0;
    double t = 0.0;
    while (true) {
        t += rng.exponential(rate_per_s);
        if (t >= proc.horizon_s) break;
        DeliveryTask task;
        task.id = static_cast<std::uint32_t>(out.size());
        task.arrival_s = t;
        task.pickup = rng.uniform_below(pool);
        NodeId drop = rng.uniform_below(pool - 1);
        if (drop >= task.pickup) ++drop;
        task.dropoff = drop;
        out.push_back(task);
    }
    return out;
}

// ---------------------------------------------------------------------------
// assignment

// Cheapest idle vehicle wins, cost measured by the exploration planner from
// the vehicle's node to the pickup; ties go to the lowest vehicle id.
// Returns the chosen vehicle id, or nothing when no idle vehicle can serve.
inline std::optional<std::uint32_t> assign_task(FleetState& fleet, DeliveryTask& task,
                                                const RoadGraph& graph,
                                                const WeightMatrix& weights, double t) {
    VehicleAgent* best = nullptr;
    RoutePlan best_plan;
    for (VehicleAgent& v : fleet.vehicles) {
        if (v.phase != Phase::Idle) continue;
        RoutePlan plan;
        try {
            plan = plan_exploration_route(graph, weights, v.pos.node, task.pickup);
        } catch (const RouteError&) {
            continue;  // cannot reach this pickup; skip
        }
        if (!best || plan.total_cost < best_plan.total_cost ||
            (plan.total_cost == best_plan.total_cost && v.id < best->id)) {
            best = &v;
            best_plan = std::move(plan);
        }
    }
    if (!best) return std::nullopt;
    best->phase = Phase::ToPickup;
    best->plan = std::move(best_plan);
    best->leg = 0;
    best->task_id = task.id;
    task.assigned_t = t;
    task.vehicle = best->id;
    return best->id;
}

// ---------------------------------------------------------------------------
// movement

// Planner callback supplied by the simulation loop: builds a fresh plan for
// the vehicle's current phase, or nothing when planning fails.
using PlannerHook = std::function<std::optional<RoutePlan>(const VehicleAgent&, Phase target)>;

struct AdvanceContext {
    const RoadGraph* graph = nullptr;
    std::span<const double> k_true;   // ground-truth density per edge
    ModelParams params;               // k_max and speed floor for kinematics
    ReplanPolicy replan;
    PlannerHook planner;
};

namespace detail {

inline double ground_speed(const Edge& e, double k, const ModelParams& p) {
    return fd_speed(std::min(std::max(k, 0.0), p.k_max), e.v_free_mps, p.k_max, p.epsilon_v_mps);
}

}  // namespace detail

// Advances one vehicle by dt of simulated time, carrying unused time across
// node boundaries so multi-edge traversals lose nothing to tick quantization.
// Phase transitions happen at the node where they physically occur; the
// planner hook serves both the post-pickup transport plan and mid-route
// replans. All emitted timestamps use the tick clock `now`.
inline std::vector<Event> advance_vehicle(VehicleAgent& v, double dt, const AdvanceContext& ctx,
                                          FleetState& fleet, double now) {
    std::vector<Event> events;
    if (!(dt > 0.0)) throw std::invalid_argument("dt must be > 0");
    if (v.phase == Phase::Idle || !v.plan) return events;

    const RoadGraph& graph = *ctx.graph;
    double budget = dt;

    auto emit = [&](const char* kind, nlohmann::json payload) {
        events.push_back(Event{now, kind, static_cast<std::int64_t>(v.id), std::move(payload)});
    };

    auto replan_to = [&](Phase target) -> bool {
        if (!ctx.planner) return false;
        auto plan = ctx.planner(v, target);
        if (!plan) return false;
        v.plan = std::move(*plan);
        v.leg = 0;
        emit("replan", {{"target", v.plan->nodes.back()},
                        {"cost", v.plan->total_cost},
                        {"phase", to_string(target)}});
        return true;
    };

    // Handles standing on a node: pickup/dropoff transitions and replanning.
    // Returns false when the vehicle is done moving this tick.
    auto handle_at_node = [&]() -> bool {
        const NodeId here = v.pos.node;
        if (v.phase == Phase::ToPickup && v.task_id &&
            here == fleet.tasks[*v.task_id].pickup) {
            DeliveryTask& task = fleet.tasks[*v.task_id];
            task.pickup_t = now;
            v.phase = Phase::Transporting;
            emit("pickup", {{"task", task.id}, {"node", here}});
            if (!replan_to(Phase::Transporting)) {
                v.plan.reset();
                return false;  // wait for the loop to provide a plan
            }
            return true;
        }
        if (v.phase == Phase::Transporting && v.task_id &&
            here == fleet.tasks[*v.task_id].dropoff) {
            DeliveryTask& task = fleet.tasks[*v.task_id];
            task.complete_t = now;
            fleet.completed.push_back(task.id);
            emit("task_complete", {{"task", task.id}, {"node", here}});
            v.phase = Phase::Idle;
            v.plan.reset();
            v.task_id.reset();
            v.leg = 0;
            return false;
        }
        if (!v.plan || v.leg + 1 >= v.plan->nodes.size()) {
            // plan exhausted without a matching target; stand still
            return false;
        }
        if (should_replan(true, now - v.plan->planned_at, ctx.replan)) replan_to(v.phase);
        return v.plan && v.leg + 1 < v.plan->nodes.size();
    };

    // Entry: if standing on a node, resolve transitions before moving.
    if (v.pos.at_node()) {
        if (!handle_at_node()) return events;
    }

    while (budget > 1e-12) {
        if (v.pos.at_node()) {
            const NodeId here = v.pos.node;
            const NodeId next = v.plan->nodes[v.leg + 1];
            const auto eid = graph.find_edge(here, next);
            if (!eid) throw std::logic_error("plan uses a non-existent edge");
            v.pos.edge = *eid;
            v.pos.fraction = 0.0;
        }
        const Edge& e = graph.edge(*v.pos.edge);
        const double speed = detail::ground_speed(e, ctx.k_true[*v.pos.edge], ctx.params);
        const double remaining_m = (1.0 - v.pos.fraction) * e.length_m;
        const double need_s = remaining_m / speed;
        if (need_s > budget) {
            v.pos.fraction += speed * budget / e.length_m;
            break;
        }
        budget -= need_s;
        v.pos.edge.reset();
        v.pos.fraction = 0.0;
        v.pos.node = e.to;
        ++v.leg;
        emit("node_arrival", {{"node", e.to}});
        if (!handle_at_node()) break;
    }
    return events;
}

}  // namespace aoifleet
