#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "helpers.hpp"

using namespace aoifleet;
using test_helpers::scenario_path;

namespace {

SimulationResult make_result(std::vector<double> completions, double horizon = 1500.0,
                             std::vector<TimeWindow> windows = {}) {
    SimulationResult r;
    r.method = "proposal";
    r.seed = 1;
    r.scenario_id = "test";
    r.dt_s = 0.5;
    r.horizon_s = horizon;
    r.aoi_series.assign(static_cast<std::size_t>(horizon / r.dt_s) + 1, 0.0);
    if (windows.empty()) windows = {{"normal", 0.0, horizon}};
    r.windows = std::move(windows);
    std::uint32_t id = 0;
    for (double c : completions) {
        DeliveryTask t;
        t.id = id++;
        t.pickup = 0;
        t.dropoff = 1;
        t.arrival_s = 0.0;
        t.assigned_t = 0.0;
        t.pickup_t = c / 2;
        t.complete_t = c;
        r.tasks.push_back(t);
    }
    return r;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::filesystem::path temp_dir(const std::string& tag) {
    auto dir = std::filesystem::temp_directory_path() / ("aoifleet_test_" + tag);
    std::filesystem::remove_all(dir);
    return dir;
}

}  // namespace

TEST_CASE("throughput windows") {
    const std::vector<TimeWindow> windows{
        {"normal", 0.0, 300.0}, {"congestion", 300.0, 900.0}, {"post", 900.0, 1500.0}};

    SECTION("zero completions") {
        auto r = make_result({}, 1500.0, windows);
        const auto wt = throughput_windows(r, windows);
        for (const auto& w : wt) {
            REQUIRE(w.completed == 0);
            REQUIRE(w.tasks_per_min == 0.0);
        }
    }

    SECTION("four completions in a ten-minute window") {
        auto r = make_result({310.0, 400.0, 500.0, 899.0}, 1500.0, windows);
        const auto wt = throughput_windows(r, windows);
        REQUIRE(wt[1].completed == 4);
        REQUIRE(wt[1].tasks_per_min == Catch::Approx(0.4));
    }

    SECTION("window counts sum to the total, exactly") {
        auto r = make_result({10.0, 299.9, 300.0, 600.0, 900.0, 1200.0, 1500.0}, 1500.0, windows);
        const auto wt = throughput_windows(r, windows);
        std::int64_t sum = 0;
        for (const auto& w : wt) sum += w.completed;
        std::int64_t total = 0;
        for (const auto& t : r.tasks)
            if (t.complete_t) ++total;
        REQUIRE(sum == total);
    }

    SECTION("non-partitioning windows are rejected") {
        auto r = make_result({});
        const std::vector<TimeWindow> bad{{"a", 0.0, 100.0}, {"b", 200.0, 1500.0}};
        REQUIRE_THROWS_AS(throughput_windows(r, bad), std::invalid_argument);
    }
}

TEST_CASE("peak spatial-average AoI per window") {
    const std::vector<TimeWindow> windows{{"a", 0.0, 1.0}, {"b", 1.0, 2.0}};
    SimulationResult r;
    r.dt_s = 0.5;
    r.horizon_s = 2.0;
    r.aoi_series = {7.0, 7.0, 7.0, 7.0, 7.0};
    r.windows = windows;
    auto peaks = peak_average_aoi(r, windows);
    REQUIRE(peaks == std::vector<double>{7.0, 7.0});

    r.aoi_series = {1.0, 5.0, 3.0, 2.0, 4.0};
    peaks = peak_average_aoi(r, windows);
    REQUIRE(peaks[0] == 5.0);  // samples at 0, 0.5 in [0,1)
    REQUIRE(peaks[1] == 4.0);  // samples at 1.0, 1.5, 2.0

    SimulationResult empty;
    empty.dt_s = 0.5;
    REQUIRE_THROWS_AS(peak_average_aoi(empty, windows), std::invalid_argument);

    const std::vector<TimeWindow> beyond{{"z", 10.0, 20.0}};
    REQUIRE_THROWS_AS(peak_average_aoi(r, beyond), std::invalid_argument);
}

TEST_CASE("aggregate over seeds") {
    SECTION("single run degenerates to itself") {
        auto r = make_result({100.0, 200.0});
        const auto agg = aggregate_seeds(std::vector<SimulationResult>{r});
        REQUIRE(agg.aoi.n_seeds == 1);
        REQUIRE(agg.aoi.mean == r.aoi_series);
        REQUIRE(agg.aoi.lower == agg.aoi.mean);
        REQUIRE(agg.aoi.upper == agg.aoi.mean);
        REQUIRE(agg.total_completed_mean == 2.0);
    }

    SECTION("pointwise mean of constant series") {
        auto a = make_result({});
        auto b = make_result({});
        std::fill(a.aoi_series.begin(), a.aoi_series.end(), 2.0);
        std::fill(b.aoi_series.begin(), b.aoi_series.end(), 4.0);
        b.seed = 2;
        const auto agg = aggregate_seeds(std::vector<SimulationResult>{a, b});
        for (double m : agg.aoi.mean) REQUIRE(m == 3.0);
        for (std::size_t i = 0; i < agg.aoi.mean.size(); ++i) {
            REQUIRE(agg.aoi.lower[i] <= agg.aoi.mean[i]);
            REQUIRE(agg.aoi.upper[i] >= agg.aoi.mean[i]);
        }
    }

    SECTION("identical runs aggregate to themselves") {
        auto a = make_result({50.0});
        auto b = a;
        b.seed = 2;
        const auto agg = aggregate_seeds(std::vector<SimulationResult>{a, b});
        REQUIRE(agg.aoi.mean == a.aoi_series);
        REQUIRE(agg.aoi.lower == a.aoi_series);  // zero spread
        REQUIRE(agg.aoi.upper == a.aoi_series);
    }

    SECTION("mixed scenarios are rejected") {
        auto a = make_result({});
        auto b = make_result({});
        b.scenario_id = "other";
        REQUIRE_THROWS_AS(aggregate_seeds(std::vector<SimulationResult>{a, b}),
                          std::invalid_argument);
    }
}

TEST_CASE("improvement formatting") {
    REQUIRE(format_pct(improvement_pct(38.0, 34.0)) == "+11.8%");
    REQUIRE(format_pct(improvement_pct(34.0, 38.0)) == "-10.5%");
    // antisymmetric in sign
    RngStream rng(6);
    for (int i = 0; i < 200; ++i) {
        const double a = 1.0 + 100.0 * rng.uniform01();
        const double b = 1.0 + 100.0 * rng.uniform01();
        const double fwd = improvement_pct(a, b);
        const double back = improvement_pct(b, a);
        if (a == b) {
            REQUIRE(fwd == 0.0);
            REQUIRE(back == 0.0);
        } else {
            REQUIRE(std::signbit(fwd) != std::signbit(back));
        }
    }
    REQUIRE(format_pct(improvement_pct(1.0, 0.0)) == "n/a");
    // reduction formatting mirrors the reported style
    REQUIRE(format_pct(reduction_pct(49.4, 64.2)) == "+23.1%");
}

TEST_CASE("rates format to two decimals and round-trip") {
    for (const char* s : {"0.53", "0.33", "0.48", "0.30", "0.32"}) {
        const double parsed = std::strtod(s, nullptr);
        REQUIRE(format_rate(parsed) == s);
    }
}

TEST_CASE("export writes headers for an empty result set") {
    const auto dir = temp_dir("empty");
    export_results(std::vector<SimulationResult>{}, dir);
    REQUIRE(slurp(dir / "aoi_timeseries.csv") == "t,seed,method,avg_aoi\n");
    REQUIRE(slurp(dir / "tasks.csv") ==
            "task,seed,method,arrival_s,pickup,dropoff,assigned_s,vehicle,pickup_s,complete_s\n");
    REQUIRE(slurp(dir / "events.log").empty());
    const auto summary = nlohmann::json::parse(slurp(dir / "summary.json"));
    REQUIRE(summary.contains("methods"));
    std::filesystem::remove_all(dir);
}

TEST_CASE("summary carries exactly the documented keys and re-export is stable") {
    auto loaded = load_scenario_file(scenario_path("campus.json"));
    loaded.config.params.horizon_s = 60.0;
    std::vector<SimulationResult> results;
    results.push_back(run(loaded.graph, loaded.config, 1, Method::Proposal));
    results.push_back(run(loaded.graph, loaded.config, 1, Method::Conventional));

    const auto dir1 = temp_dir("export1");
    const auto dir2 = temp_dir("export2");
    export_results(results, dir1);
    export_results(results, dir2);

    const auto summary = nlohmann::json::parse(slurp(dir1 / "summary.json"));
    std::vector<std::string> keys;
    for (auto it = summary.begin(); it != summary.end(); ++it) keys.push_back(it.key());
    std::sort(keys.begin(), keys.end());
    REQUIRE(keys == std::vector<std::string>{"improvements", "methods", "seeds", "totals",
                                             "windows"});

    for (const char* name : {"aoi_timeseries.csv", "tasks.csv", "events.log", "summary.json"})
        REQUIRE(slurp(dir1 / name) == slurp(dir2 / name));
    std::filesystem::remove_all(dir1);
    std::filesystem::remove_all(dir2);
}

TEST_CASE("confidence band matches a hand-computed t interval") {
    // two seeds, constant series 2 and 4: mean 3, sd sqrt(2), stderr 1,
    // t(1 dof, 95%) = 12.706 -> band 3 +/- 12.706
    auto a = make_result({});
    auto b = make_result({});
    std::fill(a.aoi_series.begin(), a.aoi_series.end(), 2.0);
    std::fill(b.aoi_series.begin(), b.aoi_series.end(), 4.0);
    b.seed = 2;
    const auto agg = aggregate_seeds(std::vector<SimulationResult>{a, b});
    REQUIRE(agg.aoi.lower[0] == Catch::Approx(3.0 - 12.706).margin(1e-9));
    REQUIRE(agg.aoi.upper[0] == Catch::Approx(3.0 + 12.706).margin(1e-9));
}

TEST_CASE("window partition is derived from the congestion schedule") {
    auto loaded = load_scenario(test_helpers::two_node_scenario());
    loaded.config.params.horizon_s = 1000.0;

    SECTION("no congestion: one normal window") {
        const auto w = derive_windows(loaded.config);
        REQUIRE(w.size() == 1);
        REQUIRE(w[0].label == "normal");
        REQUIRE(w[0].start_s == 0.0);
        REQUIRE(w[0].end_s == 1000.0);
    }

    SECTION("interior congestion: three windows spanning the union") {
        loaded.config.congestion.push_back({{{0, 1}}, 200.0, 400.0, 0.5});
        loaded.config.congestion.push_back({{{0, 1}}, 300.0, 600.0, 0.9});
        const auto w = derive_windows(loaded.config);
        REQUIRE(w.size() == 3);
        REQUIRE(w[0] == TimeWindow{"normal", 0.0, 200.0});
        REQUIRE(w[1] == TimeWindow{"congestion", 200.0, 600.0});
        REQUIRE(w[2] == TimeWindow{"post", 600.0, 1000.0});
    }

    SECTION("congestion flush with the run boundaries") {
        loaded.config.congestion.push_back({{{0, 1}}, 0.0, 1000.0, 0.9});
        const auto w = derive_windows(loaded.config);
        REQUIRE(w.size() == 1);
        REQUIRE(w[0].label == "congestion");
    }
}
