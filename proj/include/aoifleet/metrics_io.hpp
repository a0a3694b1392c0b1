#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "aoifleet/sim_engine.hpp"

namespace aoifleet {

struct WindowedThroughput {
    TimeWindow window;
    std::int64_t completed = 0;
    double tasks_per_min = 0.0;
};

// Sample/timestamp membership: [start, end), with the final window also
// owning its right endpoint.
inline bool in_window(double t, const TimeWindow& w, bool is_last) {
    if (t < w.start_s) return false;
    if (t < w.end_s) return true;
    return is_last && t == w.end_s;
}

inline void check_partition(std::span<const TimeWindow> windows, double horizon) {
    if (windows.empty()) throw std::invalid_argument("windows must not be empty");
    double cursor = 0.0;
    for (const TimeWindow& w : windows) {
        if (w.start_s != cursor || !(w.end_s > w.start_s))
            throw std::invalid_argument("windows must partition [0, horizon)");
        cursor = w.end_s;
    }
    if (cursor != horizon) throw std::invalid_argument("windows must partition [0, horizon)");
}

// Completed-task rate per window; tasks are attributed by completion time.
inline std::vector<WindowedThroughput> throughput_windows(const SimulationResult& result,
                                                          std::span<const TimeWindow> windows) {
    check_partition(windows, result.horizon_s);
    std::vector<WindowedThroughput> out;
    for (std::size_t i = 0; i < windows.size(); ++i) {
        WindowedThroughput wt;
        wt.window = windows[i];
        for (const DeliveryTask& t : result.tasks)
            if (t.complete_t && in_window(*t.complete_t, windows[i], i + 1 == windows.size()))
                ++wt.completed;
        wt.tasks_per_min =
            static_cast<double>(wt.completed) / ((windows[i].end_s - windows[i].start_s) / 60.0);
        out.push_back(wt);
    }
    return out;
}

// Maximum of the spatial-average-AoI series within each window.
inline std::vector<double> peak_average_aoi(const SimulationResult& result,
                                            std::span<const TimeWindow> windows) {
    if (result.aoi_series.empty()) throw std::invalid_argument("empty AoI series");
    std::vector<double> out;
    for (std::size_t i = 0; i < windows.size(); ++i) {
        double peak = -1.0;
        bool any = false;
        for (std::size_t s = 0; s < result.aoi_series.size(); ++s) {
            const double t = static_cast<double>(s) * result.dt_s;
            if (in_window(t, windows[i], i + 1 == windows.size())) {
                peak = std::max(peak, result.aoi_series[s]);
                any = true;
            }
        }
        if (!any)
            throw std::invalid_argument("window '" + windows[i].label + "' contains no samples");
        out.push_back(peak);
    }
    return out;
}

struct AggregateSeries {
    std::vector<double> t;
    std::vector<double> mean;
    std::vector<double> lower;   // 95% confidence band, t-distribution over seeds
    std::vector<double> upper;
    int n_seeds = 0;
};

namespace detail {

// Two-sided 95% Student-t critical values by degrees of freedom.
inline double t_critical_95(int dof) {
    static constexpr double table[] = {
        12.706, 4.303, 3.182, 2.776, 2.571, 2.447, 2.365, 2.306, 2.262, 2.228,
        2.201,  2.179, 2.160, 2.145, 2.131, 2.120, 2.110, 2.101, 2.093, 2.086,
        2.080,  2.074, 2.069, 2.064, 2.060, 2.056, 2.052, 2.048, 2.045, 2.042};
    if (dof < 1) return 0.0;
    if (dof <= 30) return table[dof - 1];
    return 1.96;
}

inline std::string fmt_double(double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

}  // namespace detail

struct MethodAggregate {
    std::string method;
    std::string scenario_id;
    std::vector<std::uint64_t> seeds;
    std::vector<TimeWindow> windows;
    AggregateSeries aoi;
    double total_completed_mean = 0.0;
    std::vector<double> per_seed_total;
    std::vector<double> window_rate_mean;       // tasks/min per window
    std::vector<double> window_peak_aoi_mean;   // seconds per window
};

// Pointwise mean and 95% CI of the AoI series plus scalar summaries over a
// set of same-scenario, same-method runs.
inline MethodAggregate aggregate_seeds(std::span<const SimulationResult> results) {
    if (results.empty()) throw std::invalid_argument("aggregate_seeds needs at least one run");
    const auto& first = results.front();
    for (const auto& r : results) {
        if (r.scenario_id != first.scenario_id)
            throw std::invalid_argument("aggregate_seeds on mixed scenarios");
        if (r.method != first.method)
            throw std::invalid_argument("aggregate_seeds on mixed methods");
        if (r.aoi_series.size() != first.aoi_series.size() || r.dt_s != first.dt_s)
            throw std::invalid_argument("aggregate_seeds on mismatched time grids");
    }

    MethodAggregate agg;
    agg.method = first.method;
    agg.scenario_id = first.scenario_id;
    agg.windows = first.windows;
    const int n = static_cast<int>(results.size());
    agg.aoi.n_seeds = n;

    const std::size_t len = first.aoi_series.size();
    agg.aoi.t.resize(len);
    agg.aoi.mean.resize(len);
    agg.aoi.lower.resize(len);
    agg.aoi.upper.resize(len);
    for (std::size_t i = 0; i < len; ++i) {
        agg.aoi.t[i] = static_cast<double>(i) * first.dt_s;
        double sum = 0.0;
        for (const auto& r : results) sum += r.aoi_series[i];
        const double mean = sum / n;
        double half = 0.0;
        if (n > 1) {
            double ss = 0.0;
            for (const auto& r : results) {
                const double d = r.aoi_series[i] - mean;
                ss += d * d;
            }
            const double stderr_ = std::sqrt(ss / (n - 1)) / std::sqrt(static_cast<double>(n));
            half = detail::t_critical_95(n - 1) * stderr_;
        }
        agg.aoi.mean[i] = mean;
        agg.aoi.lower[i] = mean - half;
        agg.aoi.upper[i] = mean + half;
    }

    agg.window_rate_mean.assign(agg.windows.size(), 0.0);
    agg.window_peak_aoi_mean.assign(agg.windows.size(), 0.0);
    double total = 0.0;
    for (const auto& r : results) {
        agg.seeds.push_back(r.seed);
        double completed = 0.0;
        for (const DeliveryTask& t : r.tasks)
            if (t.complete_t) completed += 1.0;
        agg.per_seed_total.push_back(completed);
        total += completed;
        const auto wt = throughput_windows(r, agg.windows);
        const auto peaks = peak_average_aoi(r, agg.windows);
        for (std::size_t w = 0; w < agg.windows.size(); ++w) {
            agg.window_rate_mean[w] += wt[w].tasks_per_min / n;
            agg.window_peak_aoi_mean[w] += peaks[w] / n;
        }
    }
    agg.total_completed_mean = total / n;
    return agg;
}

// ---------------------------------------------------------------------------
// report formatting

// Relative change of `value` against `base`, in percent. Positive means the
// value is larger. Swapping arguments flips the sign of the result.
inline double improvement_pct(double value, double base) {
    if (base == 0.0) return std::numeric_limits<double>::quiet_NaN();
    return (value / base - 1.0) * 100.0;
}

// Relative reduction of `value` against `base`, in percent; positive means
// the value is smaller than the baseline.
inline double reduction_pct(double value, double base) {
    if (base == 0.0) return std::numeric_limits<double>::quiet_NaN();
    return (base - value) / base * 100.0;
}

inline std::string format_pct(double pct) {
    if (std::isnan(pct)) return "n/a";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%+.1f%%", pct);
    return buf;
}

// Human-facing rates use two decimals; CSVs keep full precision.
inline std::string format_rate(double rate) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", rate);
    return buf;
}

// ---------------------------------------------------------------------------
// export

namespace detail {

inline void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
    out << content;
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

inline std::string opt_field(const std::optional<double>& v) {
    return v ? fmt_double(*v) : std::string{};
}

}  // namespace detail

// Stable on-disk report. Runs are ordered (method, seed) so re-exporting the
// same results is byte-identical.
inline void export_results(std::span<const SimulationResult> results,
                           const std::filesystem::path& dir) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);

    std::vector<const SimulationResult*> ordered;
    for (const auto& r : results) ordered.push_back(&r);
    std::stable_sort(ordered.begin(), ordered.end(),
                     [](const SimulationResult* a, const SimulationResult* b) {
                         if (a->method != b->method) return a->method > b->method;  // proposal first
                         return a->seed < b->seed;
                     });

    std::string aoi_csv = "t,seed,method,avg_aoi\n";
    for (const auto* r : ordered)
        for (std::size_t i = 0; i < r->aoi_series.size(); ++i)
            aoi_csv += detail::fmt_double(static_cast<double>(i) * r->dt_s) + "," +
                       std::to_string(r->seed) + "," + r->method + "," +
                       detail::fmt_double(r->aoi_series[i]) + "\n";
    detail::write_file(dir / "aoi_timeseries.csv", aoi_csv);

    std::string tasks_csv =
        "task,seed,method,arrival_s,pickup,dropoff,assigned_s,vehicle,pickup_s,complete_s\n";
    for (const auto* r : ordered)
        for (const DeliveryTask& t : r->tasks) {
            tasks_csv += std::to_string(t.id) + "," + std::to_string(r->seed) + "," + r->method +
                         "," + detail::fmt_double(t.arrival_s) + "," + std::to_string(t.pickup) +
                         "," + std::to_string(t.dropoff) + "," + detail::opt_field(t.assigned_t) +
                         "," + (t.vehicle ? std::to_string(*t.vehicle) : std::string{}) + "," +
                         detail::opt_field(t.pickup_t) + "," + detail::opt_field(t.complete_t) +
                         "\n";
        }
    detail::write_file(dir / "tasks.csv", tasks_csv);

    std::string log;
    for (const auto* r : ordered) log += serialize_events(r->events);
    detail::write_file(dir / "events.log", log);

    // summary.json: {methods, windows, totals, improvements, seeds}
    using json = nlohmann::ordered_json;
    json summary;
    std::map<std::string, std::vector<SimulationResult>> by_method;
    for (const auto* r : ordered) by_method[r->method].push_back(*r);

    json methods = json::object();
    std::map<std::string, MethodAggregate> aggs;
    std::vector<std::uint64_t> all_seeds;
    json windows_json = json::array();
    for (auto& [name, runs] : by_method) {
        MethodAggregate agg = aggregate_seeds(runs);
        json per_window = json::array();
        for (std::size_t w = 0; w < agg.windows.size(); ++w) {
            per_window.push_back({{"label", agg.windows[w].label},
                                  {"start_s", agg.windows[w].start_s},
                                  {"end_s", agg.windows[w].end_s},
                                  {"tasks_per_min_mean", agg.window_rate_mean[w]},
                                  {"peak_aoi_s_mean", agg.window_peak_aoi_mean[w]}});
        }
        methods[name] = {{"total_completed_mean", agg.total_completed_mean},
                         {"per_seed_total", agg.per_seed_total},
                         {"per_window", per_window},
                         {"ci", {{"level", 0.95}, {"method", "t-distribution"}}}};
        if (windows_json.empty())
            for (const TimeWindow& w : agg.windows)
                windows_json.push_back(
                    {{"label", w.label}, {"start_s", w.start_s}, {"end_s", w.end_s}});
        if (all_seeds.empty()) all_seeds = agg.seeds;
        aggs.emplace(name, std::move(agg));
    }

    json totals = json::object();
    for (const auto& [name, agg] : aggs) totals[name] = agg.total_completed_mean;

    json improvements = json::object();
    if (aggs.count("proposal") && aggs.count("conventional")) {
        const MethodAggregate& p = aggs.at("proposal");
        const MethodAggregate& c = aggs.at("conventional");
        const double tasks_pct = improvement_pct(p.total_completed_mean, c.total_completed_mean);
        improvements["total_tasks"] = format_pct(tasks_pct);
        improvements["total_tasks_pct"] = tasks_pct;
        json aoi_red = json::object();
        for (std::size_t w = 0; w < p.windows.size(); ++w) {
            const double pct =
                reduction_pct(p.window_peak_aoi_mean[w], c.window_peak_aoi_mean[w]);
            aoi_red[p.windows[w].label] = {{"pct", pct}, {"formatted", format_pct(pct)}};
        }
        improvements["peak_aoi_reduction"] = aoi_red;
    }

    std::sort(all_seeds.begin(), all_seeds.end());
    summary["methods"] = methods;
    summary["windows"] = windows_json;
    summary["totals"] = totals;
    summary["improvements"] = improvements;
    summary["seeds"] = all_seeds;
    detail::write_file(dir / "summary.json", summary.dump(2) + "\n");
}

}  // namespace aoifleet
