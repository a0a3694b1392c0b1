#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <map>
#include <set>

#include "helpers.hpp"

using namespace aoifleet;
using test_helpers::scenario_path;

namespace {

// plus-shaped graph: center 0 with three spokes, edges both ways
std::string star_scenario(int bg_count) {
    nlohmann::ordered_json j;
    j["nodes"] = {{{"id", 0}, {"x", 0.0}, {"y", 0.0}},
                  {{"id", 1}, {"x", 10.0}, {"y", 0.0}},
                  {{"id", 2}, {"x", 0.0}, {"y", 10.0}},
                  {{"id", 3}, {"x", -10.0}, {"y", 0.0}}};
    auto edge = [](int f, int t) {
        return nlohmann::ordered_json{
            {"from", f}, {"to", t}, {"length_m", 10.0}, {"lanes", 1}, {"v_free_mps", 10.0}};
    };
    j["edges"] = {edge(0, 1), edge(1, 0), edge(0, 2), edge(2, 0), edge(0, 3), edge(3, 0)};
    j["background_traffic"] = {{"count", bg_count}, {"seed_policy", "master"}};
    // high jam density so the test fleet never slows itself down
    j["params"] = {{"dt_s", 0.5}, {"horizon_s", 100.0}, {"k_max_veh_per_m_per_lane", 1000.0}};
    return j.dump();
}

std::vector<Event> filter_events(const std::vector<Event>& events, const std::string& kind) {
    std::vector<Event> out;
    for (const auto& e : events)
        if (e.kind == kind) out.push_back(e);
    return out;
}

}  // namespace

TEST_CASE("out-degree one forces the only edge") {
    const std::string doc = R"({
      "nodes": [{"id": 0, "x": 0, "y": 0}, {"id": 1, "x": 10, "y": 0}],
      "edges": [{"from": 0, "to": 1, "length_m": 10.0, "lanes": 1, "v_free_mps": 10.0},
                {"from": 1, "to": 0, "length_m": 10.0, "lanes": 1, "v_free_mps": 10.0}],
      "background_traffic": {"count": 1, "seed_policy": "master"},
      "params": {"dt_s": 0.5, "horizon_s": 20.0}
    })";
    auto loaded = load_scenario(doc);
    const auto result = run(loaded.graph, loaded.config, 3, Method::Proposal);
    const auto turns = filter_events(result.events, "bg_turn");
    REQUIRE(turns.size() > 5);
    for (const auto& e : turns) {
        const NodeId node = e.payload.at("node").get<NodeId>();
        const NodeId to = e.payload.at("to").get<NodeId>();
        REQUIRE(to == (node == 0 ? 1 : 0));
    }
}

TEST_CASE("turn choices are uniform over outgoing edges") {
    auto loaded = load_scenario(star_scenario(200));
    World world(loaded.graph, loaded.config, 12, Method::Proposal);
    // 10 m at 10 m/s = 1 s per edge, so each vehicle reaches the center
    // every other second; 400 ticks x 200 vehicles gives ~20k center turns
    for (int i = 0; i < 700; ++i) world.tick();
    std::map<NodeId, int> counts;
    int center_arrivals = 0;
    for (const auto& e : filter_events(world.events(), "bg_turn")) {
        if (e.payload.at("node").get<NodeId>() != 0) continue;
        ++center_arrivals;
        counts[e.payload.at("to").get<NodeId>()] += 1;
    }
    REQUIRE(center_arrivals >= 30000);
    for (const auto& [node, c] : counts) {
        const double freq = static_cast<double>(c) / center_arrivals;
        REQUIRE(freq == Catch::Approx(1.0 / 3.0).epsilon(0.02));
    }
}

TEST_CASE("same seed reproduces identical background trajectories") {
    auto loaded = load_scenario(star_scenario(5));
    const auto a = run(loaded.graph, loaded.config, 9, Method::Proposal);
    const auto b = run(loaded.graph, loaded.config, 9, Method::Proposal);
    REQUIRE(serialize_events(a.events) == serialize_events(b.events));
    REQUIRE(a.aoi_series == b.aoi_series);
}

TEST_CASE("congestion override rules") {
    auto loaded = load_scenario(test_helpers::two_node_scenario());
    FleetState fleet;
    GroundTruthTraffic truth;
    truth.recount(loaded.graph, fleet, 0.15);
    REQUIRE(truth.k_true[0] == 0.0);

    std::vector<CongestionEvent> events;
    events.push_back({{0}, 10.0, 20.0, 0.9});
    events.push_back({{0}, 12.0, 18.0, 0.5});

    apply_congestion(truth, events, 5.0, 0.15);
    REQUIRE(truth.k_true[0] == 0.0);  // before the window

    apply_congestion(truth, events, 10.0, 0.15);
    REQUIRE(truth.k_true[0] == Catch::Approx(0.9 * 0.15));

    truth.recount(loaded.graph, fleet, 0.15);
    apply_congestion(truth, events, 15.0, 0.15);  // overlapping: max wins
    REQUIRE(truth.k_true[0] == Catch::Approx(0.9 * 0.15));

    truth.recount(loaded.graph, fleet, 0.15);
    apply_congestion(truth, events, 20.0, 0.15);  // end is exclusive
    REQUIRE(truth.k_true[0] == 0.0);
}

TEST_CASE("empty world ages uniformly until the cap") {
    const std::string doc = R"({
      "nodes": [{"id": 0, "x": 0, "y": 0}, {"id": 1, "x": 10, "y": 0}],
      "edges": [{"from": 0, "to": 1, "length_m": 10.0, "lanes": 1, "v_free_mps": 10.0},
                {"from": 1, "to": 0, "length_m": 10.0, "lanes": 1, "v_free_mps": 10.0}],
      "params": {"dt_s": 0.5, "horizon_s": 50.0, "aoi_cap_s": 300.0}
    })";
    auto loaded = load_scenario(doc);
    const auto result = run(loaded.graph, loaded.config, 1, Method::Proposal);
    REQUIRE(result.aoi_series.size() == 101);
    // nothing ever observed: every sample sits at the cap
    for (double v : result.aoi_series) REQUIRE(v == 300.0);
}

TEST_CASE("a freshly observed world ages by dt per tick") {
    // one vehicle whose footprint covers both edges at t=0, then never again
    const std::string doc = R"({
      "nodes": [{"id": 0, "x": 0, "y": 0}, {"id": 1, "x": 10, "y": 0}],
      "edges": [{"from": 0, "to": 1, "length_m": 10.0, "lanes": 1, "v_free_mps": 10.0},
                {"from": 1, "to": 0, "length_m": 10.0, "lanes": 1, "v_free_mps": 10.0}],
      "vehicles": [{"id": 0, "start": 0}],
      "params": {"dt_s": 0.5, "horizon_s": 20.0, "aoi_cap_s": 300.0, "sensing_radius_m": 15.0}
    })";
    auto loaded = load_scenario(doc);
    const auto result = run(loaded.graph, loaded.config, 1, Method::Proposal);
    // idle vehicle keeps refreshing both edges every tick: average stays 0
    for (double v : result.aoi_series) REQUIRE(v == 0.0);
}

TEST_CASE("an RSU covering all edges pins the average age at zero") {
    const std::string doc = R"({
      "nodes": [{"id": 0, "x": 0, "y": 0}, {"id": 1, "x": 10, "y": 0}],
      "edges": [{"from": 0, "to": 1, "length_m": 10.0, "lanes": 1, "v_free_mps": 10.0},
                {"from": 1, "to": 0, "length_m": 10.0, "lanes": 1, "v_free_mps": 10.0}],
      "rsus": [{"node": 0, "coverage": [[0, 1], [1, 0]]}],
      "params": {"dt_s": 0.5, "horizon_s": 20.0}
    })";
    auto loaded = load_scenario(doc);
    const auto result = run(loaded.graph, loaded.config, 1, Method::Proposal);
    for (double v : result.aoi_series) REQUIRE(v <= loaded.config.params.dt_s);
}

TEST_CASE("horizon zero leaves only the t=0 sample") {
    auto loaded = load_scenario(test_helpers::two_node_scenario());
    loaded.config.params.horizon_s = 0.0;
    const auto result = run(loaded.graph, loaded.config, 1, Method::Proposal);
    REQUIRE(result.aoi_series.size() == 1);
}

TEST_CASE("campus ten-tick event log is stable") {
    auto loaded = load_scenario_file(scenario_path("campus.json"));
    World a(loaded.graph, loaded.config, 7, Method::Proposal);
    World b(loaded.graph, loaded.config, 7, Method::Proposal);
    for (int i = 0; i < 10; ++i) {
        a.tick();
        b.tick();
    }
    const std::string log_a = serialize_events(a.events());
    REQUIRE(log_a == serialize_events(b.events()));
    // golden hash, recorded once; any behavior or format change must be deliberate
    // (value frozen from the first verified run of this suite)
    REQUIRE(test_helpers::fnv1a64_bytes(log_a) == 0x0f8d843a7d5d0535ull);
}

TEST_CASE("method isolation: backgrounds and task streams match across methods") {
    auto loaded = load_scenario_file(scenario_path("campus.json"));
    loaded.config.params.horizon_s = 120.0;  // keep it quick
    const auto p = run(loaded.graph, loaded.config, 4, Method::Proposal);
    const auto c = run(loaded.graph, loaded.config, 4, Method::Conventional);

    // task arrivals identical, including times
    const auto tp = filter_events(p.events, "task_arrival");
    const auto tc = filter_events(c.events, "task_arrival");
    REQUIRE(serialize_events(tp) == serialize_events(tc));

    // per-vehicle background turn sequences identical (timing may differ)
    auto turn_seq = [](const std::vector<Event>& events) {
        std::map<std::int64_t, std::vector<NodeId>> seq;
        for (const auto& e : events)
            if (e.kind == "bg_turn") seq[e.subject].push_back(e.payload.at("to").get<NodeId>());
        return seq;
    };
    auto sp = turn_seq(p.events);
    auto sc = turn_seq(c.events);
    REQUIRE(sp.size() == sc.size());
    for (auto& [veh, seq] : sp) {
        auto& other = sc[veh];
        const std::size_t n = std::min(seq.size(), other.size());
        for (std::size_t i = 0; i < n; ++i) REQUIRE(seq[i] == other[i]);
    }
}

TEST_CASE("density recount matches agents on edges and CAVs count") {
    auto loaded = load_scenario(star_scenario(20));
    World world(loaded.graph, loaded.config, 5, Method::Proposal);
    for (int i = 0; i < 50; ++i) {
        world.tick();
        const auto& truth = world.truth();
        std::vector<int> recount(loaded.graph.edge_count(), 0);
        for (const auto& b : truth.background) ++recount[b.edge];
        for (const auto& v : world.fleet().vehicles)
            if (v.pos.edge) ++recount[*v.pos.edge];
        for (EdgeId e = 0; e < loaded.graph.edge_count(); ++e) {
            REQUIRE(recount[e] == truth.counts[e]);
            const Edge& edge = loaded.graph.edge(e);
            const double expect = std::clamp(
                recount[e] / (edge.length_m * edge.lanes), 0.0,
                loaded.config.params.model.k_max);
            REQUIRE(truth.k_true[e] == Catch::Approx(expect));
        }
    }
}

TEST_CASE("task conservation holds every tick") {
    auto loaded = load_scenario_file(scenario_path("campus.json"));
    loaded.config.params.horizon_s = 200.0;
    World world(loaded.graph, loaded.config, 8, Method::Proposal);
    for (int i = 0; i < 400; ++i) {
        world.tick();
        const auto& fleet = world.fleet();
        std::size_t arrived = 0;
        for (const auto& t : fleet.tasks)
            if (t.arrival_s <= world.clock()) ++arrived;
        std::size_t assigned = 0;
        for (const auto& v : fleet.vehicles)
            if (v.task_id) ++assigned;
        REQUIRE(fleet.pending.size() + assigned + fleet.completed.size() == arrived);
        // no task held twice
        std::set<std::uint32_t> seen;
        for (const auto& v : fleet.vehicles)
            if (v.task_id) REQUIRE(seen.insert(*v.task_id).second);
        for (auto id : fleet.pending) REQUIRE(seen.insert(id).second);
        for (auto id : fleet.completed) REQUIRE(seen.insert(id).second);
    }
}
