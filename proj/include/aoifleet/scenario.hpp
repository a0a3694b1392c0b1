#pragma once

#include <cmath>
#include <cstdint>
#include <deque>
#include <filesystem>
#include <limits>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "aoifleet/road_graph.hpp"
#include "aoifleet/router.hpp"
#include "aoifleet/traffic_model.hpp"

namespace aoifleet {

struct RsuConfig {
    NodeId node = 0;
    std::vector<std::pair<NodeId, NodeId>> coverage;  // explicit (from, to) edge list

    friend bool operator==(const RsuConfig&, const RsuConfig&) = default;
};

struct VehicleConfig {
    std::uint32_t id = 0;
    NodeId start = 0;

    friend bool operator==(const VehicleConfig&, const VehicleConfig&) = default;
};

struct TaskSpec {
    double arrival_s = 0.0;
    NodeId pickup = 0;
    NodeId dropoff = 0;

    friend bool operator==(const TaskSpec&, const TaskSpec&) = default;
};

struct TaskProcess {
    double rate_per_min = 0.0;
    double horizon_s = 0.0;

    friend bool operator==(const TaskProcess&, const TaskProcess&) = default;
};

using TasksConfig = std::variant<std::vector<TaskSpec>, TaskProcess>;

struct BackgroundConfig {
    enum class SeedPolicy { Master, Fixed };

    int count = 0;
    SeedPolicy seed_policy = SeedPolicy::Master;
    std::uint64_t fixed_seed = 0;  // used only under the Fixed policy

    friend bool operator==(const BackgroundConfig&, const BackgroundConfig&) = default;
};

struct CongestionConfig {
    std::vector<std::pair<NodeId, NodeId>> edges;
    double start_s = 0.0;
    double end_s = 0.0;
    double density_fraction = 0.0;  // fraction of k_max imposed while active

    friend bool operator==(const CongestionConfig&, const CongestionConfig&) = default;
};

struct SimParams {
    ModelParams model;
    double sensing_radius_m = 50.0;
    double dt_s = 0.5;
    double aoi_cap_s = 300.0;
    double horizon_s = 1500.0;
    ReplanPolicy replan;

    friend bool operator==(const SimParams&, const SimParams&) = default;
};

struct ScenarioConfig {
    std::vector<Node> nodes;
    std::vector<Edge> edges;
    std::vector<RsuConfig> rsus;
    std::vector<VehicleConfig> vehicles;
    TasksConfig tasks = std::vector<TaskSpec>{};
    BackgroundConfig background;
    std::vector<CongestionConfig> congestion;
    SimParams params;

    friend bool operator==(const ScenarioConfig&, const ScenarioConfig&) = default;

    nlohmann::ordered_json to_json() const;
    std::string dump(int indent = 2) const { return to_json().dump(indent); }
};

class ScenarioError : public std::runtime_error {
public:
    enum class Kind { Parse, Validation };

    ScenarioError(Kind kind, std::string message, std::vector<std::string> issues = {})
        : std::runtime_error(std::move(message)), kind(kind), issues(std::move(issues)) {}

    Kind kind;
    std::vector<std::string> issues;
};

struct LoadedScenario {
    RoadGraph graph;
    ScenarioConfig config;
};

// ---------------------------------------------------------------------------
// serialization

inline nlohmann::ordered_json ScenarioConfig::to_json() const {
    using json = nlohmann::ordered_json;
    json j;
    j["nodes"] = json::array();
    for (const Node& n : nodes) j["nodes"].push_back({{"id", n.id}, {"x", n.pos.x}, {"y", n.pos.y}});
    j["edges"] = json::array();
    for (const Edge& e : edges)
        j["edges"].push_back({{"from", e.from},
                              {"to", e.to},
                              {"length_m", e.length_m},
                              {"lanes", e.lanes},
                              {"v_free_mps", e.v_free_mps}});
    j["rsus"] = json::array();
    for (const RsuConfig& r : rsus) {
        json cov = json::array();
        for (auto [f, t] : r.coverage) cov.push_back({f, t});
        j["rsus"].push_back({{"node", r.node}, {"coverage", cov}});
    }
    j["vehicles"] = json::array();
    for (const VehicleConfig& v : vehicles) j["vehicles"].push_back({{"id", v.id}, {"start", v.start}});
    if (const auto* list = std::get_if<std::vector<TaskSpec>>(&tasks)) {
        json arr = json::array();
        for (const TaskSpec& t : *list)
            arr.push_back({{"arrival_s", t.arrival_s}, {"pickup", t.pickup}, {"dropoff", t.dropoff}});
        j["tasks"] = {{"list", arr}};
    } else {
        const auto& p = std::get<TaskProcess>(tasks);
        j["tasks"] = {{"rate_per_min", p.rate_per_min}, {"horizon_s", p.horizon_s}};
    }
    j["background_traffic"] = {{"count", background.count},
                               {"seed_policy", background.seed_policy == BackgroundConfig::SeedPolicy::Master
                                                   ? "master"
                                                   : "fixed"}};
    if (background.seed_policy == BackgroundConfig::SeedPolicy::Fixed)
        j["background_traffic"]["fixed_seed"] = background.fixed_seed;
    j["congestion"] = json::array();
    for (const CongestionConfig& c : congestion) {
        json ed = json::array();
        for (auto [f, t] : c.edges) ed.push_back({f, t});
        j["congestion"].push_back({{"edges", ed},
                                   {"start_s", c.start_s},
                                   {"end_s", c.end_s},
                                   {"density_fraction", c.density_fraction}});
    }
    j["params"] = {{"beta_per_s", params.model.beta_per_s},
                   {"k_max_veh_per_m_per_lane", params.model.k_max},
                   {"epsilon_v_mps", params.model.epsilon_v_mps},
                   {"sensing_radius_m", params.sensing_radius_m},
                   {"dt_s", params.dt_s},
                   {"aoi_cap_s", params.aoi_cap_s},
                   {"horizon_s", params.horizon_s},
                   {"replan_policy", params.replan.kind == ReplanPolicy::Kind::EveryNode
                                         ? "every_node"
                                         : "interval"}};
    if (params.replan.kind == ReplanPolicy::Kind::Interval)
        j["params"]["replan_interval_s"] = params.replan.interval_s;
    return j;
}

// ---------------------------------------------------------------------------
// parsing

namespace detail {

using njson = nlohmann::json;

[[noreturn]] inline void parse_fail(const std::string& path, const std::string& what) {
    throw ScenarioError(ScenarioError::Kind::Parse, "scenario parse error at " + path + ": " + what);
}

inline void expect_object(const njson& j, const std::string& path) {
    if (!j.is_object()) parse_fail(path, "expected an object");
}

inline void expect_array(const njson& j, const std::string& path) {
    if (!j.is_array()) parse_fail(path, "expected an array");
}

inline const njson& member(const njson& obj, const char* key, const std::string& path) {
    auto it = obj.find(key);
    if (it == obj.end()) parse_fail(path, std::string("missing field '") + key + "'");
    return *it;
}

inline double get_number(const njson& obj, const char* key, const std::string& path) {
    const njson& v = member(obj, key, path);
    if (!v.is_number()) parse_fail(path + "." + key, "expected a number");
    return v.get<double>();
}

inline std::int64_t get_integer(const njson& obj, const char* key, const std::string& path) {
    const njson& v = member(obj, key, path);
    if (!v.is_number_integer() && !v.is_number_unsigned())
        parse_fail(path + "." + key, "expected an integer");
    return v.get<std::int64_t>();
}

inline std::uint32_t get_id(const njson& obj, const char* key, const std::string& path) {
    const std::int64_t v = get_integer(obj, key, path);
    if (v < 0 || v > 0xffffffffll) parse_fail(path + "." + key, "id out of range");
    return static_cast<std::uint32_t>(v);
}

inline std::string get_string(const njson& obj, const char* key, const std::string& path) {
    const njson& v = member(obj, key, path);
    if (!v.is_string()) parse_fail(path + "." + key, "expected a string");
    return v.get<std::string>();
}

inline void reject_unknown(const njson& obj, const std::string& path,
                           std::initializer_list<const char*> allowed,
                           std::vector<std::string>& issues) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool ok = false;
        for (const char* k : allowed)
            if (it.key() == k) { ok = true; break; }
        if (!ok) issues.push_back("unknown field '" + path + "." + it.key() + "'");
    }
}

inline std::vector<std::pair<NodeId, NodeId>> parse_edge_refs(const njson& arr,
                                                              const std::string& path) {
    expect_array(arr, path);
    std::vector<std::pair<NodeId, NodeId>> out;
    for (std::size_t i = 0; i < arr.size(); ++i) {
        const njson& pair = arr[i];
        const std::string p = path + "[" + std::to_string(i) + "]";
        if (!pair.is_array() || pair.size() != 2 || !pair[0].is_number_integer() ||
            !pair[1].is_number_integer())
            parse_fail(p, "expected a [from, to] node pair");
        out.emplace_back(pair[0].get<NodeId>(), pair[1].get<NodeId>());
    }
    return out;
}

inline std::size_t line_of_offset(const std::string& text, std::size_t byte) {
    std::size_t line = 1;
    for (std::size_t i = 0; i < byte && i < text.size(); ++i)
        if (text[i] == '\n') ++line;
    return line;
}

}  // namespace detail

inline LoadedScenario load_scenario(const std::string& text) {
    using detail::njson;
    njson root;
    try {
        root = njson::parse(text);
    } catch (const njson::parse_error& e) {
        throw ScenarioError(ScenarioError::Kind::Parse,
                            "scenario parse error at line " +
                                std::to_string(detail::line_of_offset(text, e.byte)) + ": " +
                                e.what());
    }
    detail::expect_object(root, "$");

    std::vector<std::string> issues;
    detail::reject_unknown(root, "$",
                           {"nodes", "edges", "rsus", "vehicles", "tasks", "background_traffic",
                            "congestion", "params"},
                           issues);

    ScenarioConfig cfg;

    // nodes
    const njson& jnodes = detail::member(root, "nodes", "$");
    detail::expect_array(jnodes, "$.nodes");
    for (std::size_t i = 0; i < jnodes.size(); ++i) {
        const std::string path = "$.nodes[" + std::to_string(i) + "]";
        detail::expect_object(jnodes[i], path);
        detail::reject_unknown(jnodes[i], path, {"id", "x", "y"}, issues);
        Node n;
        n.id = detail::get_id(jnodes[i], "id", path);
        n.pos.x = detail::get_number(jnodes[i], "x", path);
        n.pos.y = detail::get_number(jnodes[i], "y", path);
        cfg.nodes.push_back(n);
    }

    // edges
    const njson& jedges = detail::member(root, "edges", "$");
    detail::expect_array(jedges, "$.edges");
    for (std::size_t i = 0; i < jedges.size(); ++i) {
        const std::string path = "$.edges[" + std::to_string(i) + "]";
        detail::expect_object(jedges[i], path);
        detail::reject_unknown(jedges[i], path, {"from", "to", "length_m", "lanes", "v_free_mps"},
                               issues);
        Edge e;
        e.from = detail::get_id(jedges[i], "from", path);
        e.to = detail::get_id(jedges[i], "to", path);
        e.length_m = detail::get_number(jedges[i], "length_m", path);
        e.lanes = static_cast<int>(detail::get_integer(jedges[i], "lanes", path));
        e.v_free_mps = detail::get_number(jedges[i], "v_free_mps", path);
        cfg.edges.push_back(e);
    }

    // rsus
    if (root.contains("rsus")) {
        const njson& jrsus = root["rsus"];
        detail::expect_array(jrsus, "$.rsus");
        for (std::size_t i = 0; i < jrsus.size(); ++i) {
            const std::string path = "$.rsus[" + std::to_string(i) + "]";
            detail::expect_object(jrsus[i], path);
            detail::reject_unknown(jrsus[i], path, {"node", "coverage"}, issues);
            RsuConfig r;
            r.node = detail::get_id(jrsus[i], "node", path);
            r.coverage =
                detail::parse_edge_refs(detail::member(jrsus[i], "coverage", path), path + ".coverage");
            cfg.rsus.push_back(r);
        }
    }

    // vehicles
    if (root.contains("vehicles")) {
        const njson& jveh = root["vehicles"];
        detail::expect_array(jveh, "$.vehicles");
        for (std::size_t i = 0; i < jveh.size(); ++i) {
            const std::string path = "$.vehicles[" + std::to_string(i) + "]";
            detail::expect_object(jveh[i], path);
            detail::reject_unknown(jveh[i], path, {"id", "start"}, issues);
            VehicleConfig v;
            v.id = detail::get_id(jveh[i], "id", path);
            v.start = detail::get_id(jveh[i], "start", path);
            cfg.vehicles.push_back(v);
        }
    }

    // tasks: either an explicit list or a Poisson process
    if (root.contains("tasks")) {
        const njson& jt = root["tasks"];
        detail::expect_object(jt, "$.tasks");
        if (jt.contains("list")) {
            detail::reject_unknown(jt, "$.tasks", {"list"}, issues);
            const njson& arr = jt["list"];
            detail::expect_array(arr, "$.tasks.list");
            std::vector<TaskSpec> list;
            for (std::size_t i = 0; i < arr.size(); ++i) {
                const std::string path = "$.tasks.list[" + std::to_string(i) + "]";
                detail::expect_object(arr[i], path);
                detail::reject_unknown(arr[i], path, {"arrival_s", "pickup", "dropoff"}, issues);
                TaskSpec t;
                t.arrival_s = detail::get_number(arr[i], "arrival_s", path);
                t.pickup = detail::get_id(arr[i], "pickup", path);
                t.dropoff = detail::get_id(arr[i], "dropoff", path);
                list.push_back(t);
            }
            cfg.tasks = std::move(list);
        } else {
            detail::reject_unknown(jt, "$.tasks", {"rate_per_min", "horizon_s"}, issues);
            TaskProcess p;
            p.rate_per_min = detail::get_number(jt, "rate_per_min", "$.tasks");
            p.horizon_s = detail::get_number(jt, "horizon_s", "$.tasks");
            cfg.tasks = p;
        }
    }

    // background_traffic
    if (root.contains("background_traffic")) {
        const njson& jb = root["background_traffic"];
        detail::expect_object(jb, "$.background_traffic");
        detail::reject_unknown(jb, "$.background_traffic", {"count", "seed_policy", "fixed_seed"},
                               issues);
        cfg.background.count = static_cast<int>(detail::get_integer(jb, "count", "$.background_traffic"));
        const std::string policy = jb.contains("seed_policy")
                                       ? detail::get_string(jb, "seed_policy", "$.background_traffic")
                                       : "master";
        if (policy == "master") {
            cfg.background.seed_policy = BackgroundConfig::SeedPolicy::Master;
        } else if (policy == "fixed") {
            cfg.background.seed_policy = BackgroundConfig::SeedPolicy::Fixed;
            cfg.background.fixed_seed = static_cast<std::uint64_t>(
                detail::get_integer(jb, "fixed_seed", "$.background_traffic"));
        } else {
            detail::parse_fail("$.background_traffic.seed_policy", "expected 'master' or 'fixed'");
        }
    }

    // congestion
    if (root.contains("congestion")) {
        const njson& jc = root["congestion"];
        detail::expect_array(jc, "$.congestion");
        for (std::size_t i = 0; i < jc.size(); ++i) {
            const std::string path = "$.congestion[" + std::to_string(i) + "]";
            detail::expect_object(jc[i], path);
            detail::reject_unknown(jc[i], path, {"edges", "start_s", "end_s", "density_fraction"},
                                   issues);
            CongestionConfig c;
            c.edges = detail::parse_edge_refs(detail::member(jc[i], "edges", path), path + ".edges");
            c.start_s = detail::get_number(jc[i], "start_s", path);
            c.end_s = detail::get_number(jc[i], "end_s", path);
            c.density_fraction = detail::get_number(jc[i], "density_fraction", path);
            cfg.congestion.push_back(c);
        }
    }

    // params
    if (root.contains("params")) {
        const njson& jp = root["params"];
        detail::expect_object(jp, "$.params");
        detail::reject_unknown(jp, "$.params",
                               {"beta_per_s", "k_max_veh_per_m_per_lane", "epsilon_v_mps",
                                "sensing_radius_m", "dt_s", "aoi_cap_s", "horizon_s",
                                "replan_policy", "replan_interval_s"},
                               issues);
        if (jp.contains("beta_per_s"))
            cfg.params.model.beta_per_s = detail::get_number(jp, "beta_per_s", "$.params");
        if (jp.contains("k_max_veh_per_m_per_lane"))
            cfg.params.model.k_max = detail::get_number(jp, "k_max_veh_per_m_per_lane", "$.params");
        if (jp.contains("epsilon_v_mps"))
            cfg.params.model.epsilon_v_mps = detail::get_number(jp, "epsilon_v_mps", "$.params");
        if (jp.contains("sensing_radius_m"))
            cfg.params.sensing_radius_m = detail::get_number(jp, "sensing_radius_m", "$.params");
        if (jp.contains("dt_s")) cfg.params.dt_s = detail::get_number(jp, "dt_s", "$.params");
        if (jp.contains("aoi_cap_s"))
            cfg.params.aoi_cap_s = detail::get_number(jp, "aoi_cap_s", "$.params");
        if (jp.contains("horizon_s"))
            cfg.params.horizon_s = detail::get_number(jp, "horizon_s", "$.params");
        if (jp.contains("replan_policy")) {
            const std::string rp = detail::get_string(jp, "replan_policy", "$.params");
            if (rp == "every_node") {
                cfg.params.replan.kind = ReplanPolicy::Kind::EveryNode;
            } else if (rp == "interval") {
                cfg.params.replan.kind = ReplanPolicy::Kind::Interval;
                cfg.params.replan.interval_s =
                    detail::get_number(jp, "replan_interval_s", "$.params");
            } else {
                detail::parse_fail("$.params.replan_policy", "expected 'every_node' or 'interval'");
            }
        }
    }

    // -----------------------------------------------------------------------
    // validation: collect every violated invariant before reporting

    const std::size_t n_nodes = cfg.nodes.size();
    if (cfg.nodes.empty()) issues.push_back("scenario declares no nodes");
    if (cfg.edges.empty()) issues.push_back("scenario declares no edges");
    bool nodes_dense = !cfg.nodes.empty();
    {
        std::set<NodeId> seen;
        for (std::size_t i = 0; i < cfg.nodes.size(); ++i) {
            const Node& n = cfg.nodes[i];
            if (!seen.insert(n.id).second) {
                issues.push_back("duplicate node id " + std::to_string(n.id));
                nodes_dense = false;
            }
            if (n.id >= n_nodes) {
                issues.push_back("node id " + std::to_string(n.id) + " breaks dense 0..N-1 indexing");
                nodes_dense = false;
            }
            if (!std::isfinite(n.pos.x) || !std::isfinite(n.pos.y))
                issues.push_back("node " + std::to_string(n.id) + " has non-finite position");
        }
    }
    // node list may arrive in any order; canonical order is by id
    if (nodes_dense)
        std::sort(cfg.nodes.begin(), cfg.nodes.end(),
                  [](const Node& a, const Node& b) { return a.id < b.id; });

    auto node_exists = [&](NodeId id) { return id < n_nodes; };
    auto check_node_ref = [&](NodeId id, const std::string& where) {
        if (!node_exists(id))
            issues.push_back(where + " references undeclared node " + std::to_string(id));
    };

    std::set<std::pair<NodeId, NodeId>> edge_pairs;
    for (std::size_t i = 0; i < cfg.edges.size(); ++i) {
        const Edge& e = cfg.edges[i];
        const std::string where = "edge[" + std::to_string(i) + "]";
        check_node_ref(e.from, where);
        check_node_ref(e.to, where);
        if (e.from == e.to) issues.push_back(where + " is a self-loop");
        if (!(e.length_m > 0.0) || !std::isfinite(e.length_m))
            issues.push_back(where + " has nonpositive length");
        if (!(e.v_free_mps > 0.0) || !std::isfinite(e.v_free_mps))
            issues.push_back(where + " has nonpositive v_free");
        if (e.lanes < 1) issues.push_back(where + " has lanes < 1");
        if (!edge_pairs.emplace(e.from, e.to).second)
            issues.push_back(where + " duplicates ordered pair (" + std::to_string(e.from) + "," +
                             std::to_string(e.to) + ")");
    }

    auto edge_exists = [&](NodeId f, NodeId t) { return edge_pairs.count({f, t}) > 0; };
    auto check_edge_ref = [&](std::pair<NodeId, NodeId> p, const std::string& where) {
        if (!edge_exists(p.first, p.second))
            issues.push_back(where + " references unknown edge (" + std::to_string(p.first) + "," +
                             std::to_string(p.second) + ")");
    };

    for (std::size_t i = 0; i < cfg.rsus.size(); ++i) {
        const RsuConfig& r = cfg.rsus[i];
        const std::string where = "rsu[" + std::to_string(i) + "]";
        check_node_ref(r.node, where);
        for (auto p : r.coverage) check_edge_ref(p, where + ".coverage");
    }

    {
        std::set<std::uint32_t> ids;
        for (std::size_t i = 0; i < cfg.vehicles.size(); ++i) {
            const VehicleConfig& v = cfg.vehicles[i];
            const std::string where = "vehicle[" + std::to_string(i) + "]";
            if (!ids.insert(v.id).second)
                issues.push_back(where + " duplicates vehicle id " + std::to_string(v.id));
            check_node_ref(v.start, where);
        }
    }

    for (std::size_t i = 0; i < cfg.congestion.size(); ++i) {
        const CongestionConfig& c = cfg.congestion[i];
        const std::string where = "congestion[" + std::to_string(i) + "]";
        if (c.edges.empty()) issues.push_back(where + " has an empty edge set");
        for (auto p : c.edges) check_edge_ref(p, where);
        if (!(c.start_s < c.end_s)) issues.push_back(where + " needs start_s < end_s");
        if (!(c.density_fraction > 0.0 && c.density_fraction <= 1.0))
            issues.push_back(where + " density_fraction must be in (0, 1]");
    }

    if (cfg.background.count < 0) issues.push_back("background_traffic.count must be >= 0");

    const SimParams& sp = cfg.params;
    if (!(sp.model.beta_per_s >= 0.0)) issues.push_back("params.beta_per_s must be >= 0");
    if (!(sp.model.k_max > 0.0)) issues.push_back("params.k_max_veh_per_m_per_lane must be > 0");
    if (!(sp.model.epsilon_v_mps > 0.0)) issues.push_back("params.epsilon_v_mps must be > 0");
    if (!(sp.sensing_radius_m > 0.0)) issues.push_back("params.sensing_radius_m must be > 0");
    if (!(sp.dt_s > 0.0)) issues.push_back("params.dt_s must be > 0");
    if (!(sp.aoi_cap_s > 0.0)) issues.push_back("params.aoi_cap_s must be > 0");
    if (!(sp.horizon_s >= 0.0)) issues.push_back("params.horizon_s must be >= 0");
    if (sp.dt_s > 0.0 && sp.horizon_s >= 0.0) {
        const double ticks = sp.horizon_s / sp.dt_s;
        if (std::abs(ticks - std::round(ticks)) > 1e-9)
            issues.push_back("params.horizon_s must be an integer multiple of dt_s");
    }
    if (sp.replan.kind == ReplanPolicy::Kind::Interval && !(sp.replan.interval_s > 0.0))
        issues.push_back("params.replan_interval_s must be > 0");
    for (const Edge& e : cfg.edges) {
        if (e.v_free_mps > 0.0 && sp.model.epsilon_v_mps >= e.v_free_mps) {
            issues.push_back("params.epsilon_v_mps must be below the minimum edge v_free");
            break;
        }
    }

    // graph-level checks only make sense once the structure is sound
    const bool structure_ok = issues.empty() && nodes_dense;
    std::vector<std::vector<NodeId>> fwd(n_nodes), undirected(n_nodes);
    if (structure_ok) {
        for (const Edge& e : cfg.edges) {
            fwd[e.from].push_back(e.to);
            undirected[e.from].push_back(e.to);
            undirected[e.to].push_back(e.from);
        }
        auto bfs = [&](NodeId start, const std::vector<std::vector<NodeId>>& adj) {
            std::vector<char> seen(n_nodes, 0);
            std::deque<NodeId> q{start};
            seen[start] = 1;
            std::size_t count = 0;
            while (!q.empty()) {
                NodeId u = q.front();
                q.pop_front();
                ++count;
                for (NodeId v : adj[u])
                    if (!seen[v]) {
                        seen[v] = 1;
                        q.push_back(v);
                    }
            }
            return std::make_pair(count, seen);
        };

        if (n_nodes > 0 && bfs(0, undirected).first != n_nodes)
            issues.push_back("graph is not weakly connected");

        auto reachable_from = [&](NodeId s) { return bfs(s, fwd).second; };

        if (const auto* list = std::get_if<std::vector<TaskSpec>>(&cfg.tasks)) {
            double prev_arrival = -std::numeric_limits<double>::infinity();
            for (std::size_t i = 0; i < list->size(); ++i) {
                const TaskSpec& t = (*list)[i];
                const std::string where = "task[" + std::to_string(i) + "]";
                check_node_ref(t.pickup, where);
                check_node_ref(t.dropoff, where);
                if (t.arrival_s < 0.0) issues.push_back(where + " has negative arrival_s");
                if (t.arrival_s < prev_arrival)
                    issues.push_back(where + " breaks non-decreasing arrival order");
                prev_arrival = t.arrival_s;
                if (t.pickup == t.dropoff) {
                    issues.push_back(where + " has pickup == dropoff");
                } else if (node_exists(t.pickup) && node_exists(t.dropoff)) {
                    if (!reachable_from(t.pickup)[t.dropoff])
                        issues.push_back(where + " dropoff unreachable from pickup");
                    if (!cfg.vehicles.empty()) {
                        bool ok = false;
                        for (const VehicleConfig& v : cfg.vehicles)
                            if (reachable_from(v.start)[t.pickup]) { ok = true; break; }
                        if (!ok) issues.push_back(where + " has unreachable pickup node " +
                                                  std::to_string(t.pickup));
                    }
                }
            }
        } else {
            const auto& p = std::get<TaskProcess>(cfg.tasks);
            if (!(p.rate_per_min > 0.0)) issues.push_back("tasks.rate_per_min must be > 0");
            if (!(p.horizon_s >= 0.0)) issues.push_back("tasks.horizon_s must be >= 0");
            if (n_nodes < 2) issues.push_back("task process needs at least two nodes");
            // drawn endpoints may pair any two nodes, so demand strong connectivity
            bool strong = true;
            for (NodeId s = 0; s < n_nodes && strong; ++s)
                if (bfs(s, fwd).first != n_nodes) strong = false;
            if (!strong) issues.push_back("task process requires a strongly connected graph");
        }
    }

    if (!issues.empty()) {
        std::string msg = "scenario validation failed:";
        for (const std::string& s : issues) msg += "\n  - " + s;
        throw ScenarioError(ScenarioError::Kind::Validation, msg, issues);
    }

    LoadedScenario out{RoadGraph::build(cfg.nodes, cfg.edges), std::move(cfg)};
    return out;
}

inline LoadedScenario load_scenario_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ScenarioError(ScenarioError::Kind::Parse,
                                 "cannot open scenario file: " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return load_scenario(ss.str());
}

}  // namespace aoifleet
