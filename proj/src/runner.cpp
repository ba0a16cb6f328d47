#include "mblcoh/runner.hpp"

#include "mblcoh/config.hpp"
#include "mblcoh/errors.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <exception>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <optional>
#include <sstream>
#include <thread>

#ifndef MBLCOH_VERSION
#define MBLCOH_VERSION "dev"
#endif

namespace mblcoh {

namespace {

std::string timestamp() {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    std::ostringstream os;
    os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return os.str();
}

nlohmann::json failure_json(const FailedTask& f) {
    return {{"N", f.point.N}, {"dh", f.point.dh}, {"delta", f.point.delta}, {"realization", f.realization}, {"error", f.message}};
}

std::size_t find_point(const RunResults& r, int N, double dh, double delta) {
    for(std::size_t i = 0; i < r.points.size(); ++i)
        if(r.points[i].N == N && r.points[i].dh == dh && r.points[i].delta == delta) return i;
    throw NotFound("run has no sweep point N=" + std::to_string(N) + ", dh=" + format_real(dh) + ", delta=" + format_real(delta));
}

} // namespace

std::string code_version() { return MBLCOH_VERSION; }

std::string format_real(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

const EnsembleStats& RunResults::ensemble(int N, double dh, double delta) const { return ensembles[find_point(*this, N, dh, delta)]; }

const std::vector<CoherenceSeries>& RunResults::series(int N, double dh, double delta) const {
    return realizations[find_point(*this, N, dh, delta)];
}

void parallel_for(std::size_t count, int workers, const std::function<void(std::size_t)>& task) {
    const std::size_t pool = std::clamp<std::size_t>(static_cast<std::size_t>(std::max(workers, 1)), 1, std::max<std::size_t>(count, 1));
    if(pool == 1) {
        for(std::size_t i = 0; i < count; ++i) task(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> threads;
    threads.reserve(pool);
    for(std::size_t w = 0; w < pool; ++w)
        threads.emplace_back([&] {
            for(std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) task(i);
        });
}

RunResults execute(const ExperimentConfig& config, int workers) {
    config.validate();
    RunResults results;
    results.config = config;
    for(int N : config.N_list)
        for(double dh : config.dh_list)
            for(double delta : config.delta_list) results.points.push_back({N, dh, delta});

    const std::size_t R = static_cast<std::size_t>(config.realizations);
    const std::size_t tasks = results.points.size() * R;
    std::vector<std::optional<CoherenceSeries>> slots(tasks);
    std::vector<std::string> errors(tasks);

    parallel_for(tasks, workers, [&](std::size_t i) {
        const auto& p = results.points[i / R];
        const auto r = static_cast<std::uint64_t>(i % R);
        try {
            slots[i] = run_realization(config, r, p.delta, p.dh, p.N);
        } catch(const std::exception& e) {
            errors[i] = e.what();
        }
    });

    for(std::size_t pi = 0; pi < results.points.size(); ++pi) {
        std::vector<CoherenceSeries> series;
        series.reserve(R);
        bool complete = true;
        for(std::size_t r = 0; r < R; ++r) {
            const std::size_t i = pi * R + r;
            if(slots[i]) {
                series.push_back(std::move(*slots[i]));
            } else {
                complete = false;
                results.failures.push_back({results.points[pi], static_cast<std::uint64_t>(r), errors[i]});
            }
        }
        results.ensembles.push_back(complete ? ensemble_average(series) : EnsembleStats{});
        results.realizations.push_back(std::move(series));
    }
    return results;
}

std::string format_results_csv(const RunResults& results) {
    const auto& c = results.config;
    std::string out = "measure,initial_state,boundary,N,J,delta,dh,n,t,mean,sem,realizations\n";
    const std::string initial(to_string(c.initial));
    const std::string boundary(to_string(c.boundary));
    const std::string J = format_real(c.J);
    for(std::size_t pi = 0; pi < results.points.size(); ++pi) {
        const auto& stats = results.ensembles[pi];
        if(stats.realizations == 0) continue;
        const auto& p = results.points[pi];
        const std::string prefix_tail = "," + initial + "," + boundary + "," + std::to_string(p.N) + "," + J + "," + format_real(p.delta) + "," +
                                        format_real(p.dh) + ",";
        const std::size_t T = stats.times.size();
        for(std::size_t mi = 0; mi < stats.measures.size(); ++mi)
            for(std::size_t ni = 0; ni < stats.n_values.size(); ++ni)
                for(std::size_t j = 0; j < T; ++j) {
                    const std::size_t idx = (mi * stats.n_values.size() + ni) * T + j;
                    out += std::string(to_string(stats.measures[mi]));
                    out += prefix_tail;
                    out += std::to_string(stats.n_values[ni]) + "," + format_real(stats.times[j]) + "," + format_real(stats.mean[idx]) + "," +
                           format_real(stats.sem[idx]) + "," + std::to_string(stats.realizations) + "\n";
                }
    }
    return out;
}

nlohmann::json RunManifest::to_json() const {
    nlohmann::json j;
    j["config"] = config;
    j["master_seed"] = master_seed;
    j["code_version"] = code_version;
    j["log_base"] = log_base;
    j["boundary"] = boundary;
    j["pairing"] = pairing;
    j["grid"] = {{"kind", "log"}, {"t_min", config.at("t_min")}, {"t_max", config.at("t_max")}, {"points", config.at("t_points")},
                 {"include_t0", config.at("include_t0")}};
    j["started"] = started;
    j["finished"] = finished;
    nlohmann::json files = nlohmann::json::array();
    for(const auto& f : this->files) files.push_back(f.string());
    j["files"] = files;
    nlohmann::json failed = nlohmann::json::array();
    for(const auto& f : failures) failed.push_back(failure_json(f));
    j["failed"] = failed;
    return j;
}

RunManifest run(const ExperimentConfig& config, const std::filesystem::path& out_dir, int workers) {
    RunManifest manifest;
    manifest.started = timestamp();
    const RunResults results = execute(config, workers);
    manifest.finished = timestamp();

    std::filesystem::create_directories(out_dir);
    const auto csv_path = out_dir / "results.csv";
    {
        std::ofstream out(csv_path, std::ios::binary);
        if(!out) throw ConfigError("cannot write " + csv_path.string());
        out << format_results_csv(results);
    }
    manifest.config = config_to_json(config);
    manifest.master_seed = config.master_seed;
    manifest.code_version = code_version();
    manifest.log_base = std::string(to_string(config.log_base));
    manifest.boundary = std::string(to_string(config.boundary));
    manifest.files = {csv_path};
    manifest.failures = results.failures;

    const auto meta_path = out_dir / "metadata.json";
    std::ofstream meta(meta_path);
    if(!meta) throw ConfigError("cannot write " + meta_path.string());
    meta << manifest.to_json().dump(2) << "\n";
    return manifest;
}

} // namespace mblcoh
