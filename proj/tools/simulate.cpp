// Experiment runner: executes (seed, method) simulation runs for a scenario,
// in parallel, and writes the CSV/JSON report to the output directory.

#include <atomic>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <iostream>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "aoifleet/aoifleet.hpp"

namespace {

// "--seeds 5" means seeds 1..5; "--seeds 3,7,9" means exactly those seeds.
std::vector<std::uint64_t> parse_seeds(const std::string& spec) {
    std::vector<std::uint64_t> seeds;
    if (spec.find(',') == std::string::npos) {
        const long long n = std::stoll(spec);
        if (n < 1) throw std::invalid_argument("seed count must be >= 1");
        for (long long i = 1; i <= n; ++i) seeds.push_back(static_cast<std::uint64_t>(i));
        return seeds;
    }
    std::size_t pos = 0;
    while (pos < spec.size()) {
        const std::size_t comma = spec.find(',', pos);
        const std::string part = spec.substr(pos, comma == std::string::npos ? comma : comma - pos);
        if (!part.empty()) seeds.push_back(std::stoull(part));
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    if (seeds.empty()) throw std::invalid_argument("no seeds given");
    return seeds;
}

unsigned worker_count(std::size_t jobs) {
    unsigned n = std::thread::hardware_concurrency();
    if (n == 0) n = 1;
    if (const char* env = std::getenv("AOI_FLEET_THREADS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v >= 1) n = static_cast<unsigned>(v);
    }
    return std::min<std::size_t>(n, jobs) > 0 ? static_cast<unsigned>(std::min<std::size_t>(n, jobs)) : 1u;
}

void dump_weights_csv(const aoifleet::RoadGraph& graph, const aoifleet::ScenarioConfig& cfg,
                      std::uint64_t seed, aoifleet::Method method,
                      const std::filesystem::path& path) {
    using namespace aoifleet;
    World world(graph, cfg, seed, method);
    ModelParams params = cfg.params.model;
    if (method == Method::Conventional) params.beta_per_s = 0.0;
    const WeightMatrix w = build_weight_matrix(graph, world.ledger(), 0.0, params);
    std::string csv = "t,i,j,weight\n";
    for (NodeId i = 0; i < graph.node_count(); ++i)
        for (NodeId j = 0; j < graph.node_count(); ++j)
            if (std::isfinite(w.at(i, j)))
                csv += "0," + std::to_string(i) + "," + std::to_string(j) + "," +
                       aoifleet::detail::fmt_double(w.at(i, j)) + "\n";
    std::ofstream out(path, std::ios::binary);
    out << csv;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"AoI-aware fleet routing simulator"};

    std::string scenario_path;
    std::string seeds_spec = "5";
    std::string method_spec = "both";
    std::string out_dir;
    double dt_override = -1.0;
    double beta_override = -1.0;
    double horizon_override = -1.0;
    bool emit_weights = false;
    bool quiet = false;

    app.add_option("--scenario", scenario_path, "scenario file (JSON)")->required();
    app.add_option("--seeds", seeds_spec, "seed count n (runs 1..n) or comma list, e.g. 3,7,9");
    app.add_option("--method", method_spec, "proposal | conventional | both")
        ->check(CLI::IsMember({"proposal", "conventional", "both"}));
    app.add_option("--out", out_dir, "output directory")->required();
    app.add_option("--dt", dt_override, "override params.dt_s");
    app.add_option("--beta", beta_override, "override params.beta_per_s");
    app.add_option("--horizon", horizon_override, "override params.horizon_s");
    app.add_flag("--emit-weights", emit_weights,
                 "also write the t=0 weight matrix and the per-tick ledger snapshot");
    app.add_flag("--quiet", quiet, "suppress progress output");

    CLI11_PARSE(app, argc, argv);

    using namespace aoifleet;

    LoadedScenario scenario;
    try {
        scenario = load_scenario_file(scenario_path);
        ScenarioConfig& cfg = scenario.config;
        if (dt_override > 0.0) cfg.params.dt_s = dt_override;
        if (beta_override >= 0.0) cfg.params.model.beta_per_s = beta_override;
        if (horizon_override >= 0.0) cfg.params.horizon_s = horizon_override;
        // overrides must preserve the tick-grid invariant
        const double ticks = cfg.params.horizon_s / cfg.params.dt_s;
        if (std::abs(ticks - std::round(ticks)) > 1e-9)
            throw ScenarioError(ScenarioError::Kind::Validation,
                                "horizon_s must be an integer multiple of dt_s");
    } catch (const ScenarioError& e) {
        std::cerr << e.what() << "\n";
        return 2;
    }

    try {
        std::vector<std::uint64_t> seeds = parse_seeds(seeds_spec);
        std::vector<Method> methods;
        if (method_spec == "both") {
            methods = {Method::Proposal, Method::Conventional};
        } else {
            methods = {method_from_string(method_spec)};
        }

        struct Job {
            Method method;
            std::uint64_t seed;
        };
        std::vector<Job> jobs;
        for (Method m : methods)
            for (std::uint64_t s : seeds) jobs.push_back({m, s});

        std::vector<SimulationResult> results(jobs.size());
        std::atomic<std::size_t> cursor{0};
        std::mutex io_mutex;
        std::exception_ptr failure;
        std::mutex failure_mutex;

        auto worker = [&] {
            while (true) {
                const std::size_t i = cursor.fetch_add(1);
                if (i >= jobs.size()) return;
                try {
                    results[i] = run(scenario.graph, scenario.config, jobs[i].seed,
                                     jobs[i].method, emit_weights);
                    if (!quiet) {
                        std::lock_guard lock(io_mutex);
                        std::size_t done = 0;
                        for (const DeliveryTask& t : results[i].tasks)
                            if (t.complete_t) ++done;
                        std::cout << "run method=" << results[i].method
                                  << " seed=" << results[i].seed << " completed=" << done << "\n";
                    }
                } catch (...) {
                    std::lock_guard lock(failure_mutex);
                    if (!failure) failure = std::current_exception();
                    return;
                }
            }
        };

        const unsigned n_workers = worker_count(jobs.size());
        std::vector<std::thread> pool;
        for (unsigned i = 0; i < n_workers; ++i) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
        if (failure) std::rethrow_exception(failure);

        export_results(results, out_dir);
        if (emit_weights) {
            for (const Job& j : jobs) {
                const std::string name = std::string("weights_") + to_string(j.method) + "_seed" +
                                         std::to_string(j.seed) + ".csv";
                dump_weights_csv(scenario.graph, scenario.config, j.seed, j.method,
                                 std::filesystem::path(out_dir) / name);
            }
            std::string ledger_csv = "t,seed,method,edge,k,age_s\n";
            for (const SimulationResult& r : results)
                for (const LedgerTraceRow& row : r.ledger_trace)
                    ledger_csv += aoifleet::detail::fmt_double(row.t) + "," +
                                  std::to_string(r.seed) + "," + r.method + "," +
                                  std::to_string(row.edge) + "," +
                                  aoifleet::detail::fmt_double(row.k) + "," +
                                  aoifleet::detail::fmt_double(row.age_s) + "\n";
            std::ofstream out(std::filesystem::path(out_dir) / "ledger.csv", std::ios::binary);
            out << ledger_csv;
        }

        if (!quiet) {
            std::map<std::string, std::vector<SimulationResult>> by_method;
            for (auto& r : results) by_method[r.method].push_back(r);
            std::map<std::string, MethodAggregate> aggs;
            for (auto& [name, rs] : by_method) aggs.emplace(name, aggregate_seeds(rs));
            for (const auto& [name, agg] : aggs) {
                std::cout << name << ": total completed (mean over " << agg.seeds.size()
                          << " seeds) = " << format_rate(agg.total_completed_mean) << "\n";
                for (std::size_t w = 0; w < agg.windows.size(); ++w)
                    std::cout << "  " << agg.windows[w].label << " ["
                              << agg.windows[w].start_s << ", " << agg.windows[w].end_s
                              << "): " << format_rate(agg.window_rate_mean[w])
                              << " tasks/min, peak avg AoI "
                              << format_rate(agg.window_peak_aoi_mean[w]) << " s\n";
            }
            if (aggs.count("proposal") && aggs.count("conventional")) {
                const auto& p = aggs.at("proposal");
                const auto& c = aggs.at("conventional");
                std::cout << "total tasks improvement: "
                          << format_pct(improvement_pct(p.total_completed_mean,
                                                        c.total_completed_mean))
                          << "\n";
            }
            std::cout << "report written to " << out_dir << "\n";
        }
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
