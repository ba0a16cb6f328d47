#pragma once

#include "mblcoh/experiment.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

namespace mblcoh {

/// One (N, dh, delta) sweep point; realizations are tasks within it.
struct SweepPoint {
    int N = 0;
    double dh = 0.0;
    double delta = 0.0;
};

struct FailedTask {
    SweepPoint point;
    std::uint64_t realization = 0;
    std::string message;
};

struct RunResults {
    ExperimentConfig config;
    std::vector<SweepPoint> points;                         // sweep order: N, then dh, then delta
    std::vector<EnsembleStats> ensembles;                   // one per point; empty R when a task failed
    std::vector<std::vector<CoherenceSeries>> realizations; // per point, ascending r
    std::vector<FailedTask> failures;

    [[nodiscard]] const EnsembleStats& ensemble(int N, double dh, double delta) const;
    [[nodiscard]] const std::vector<CoherenceSeries>& series(int N, double dh, double delta) const;
};

/// Calls task(i) for i in [0, count) on a fixed pool of `workers` threads.
void parallel_for(std::size_t count, int workers, const std::function<void(std::size_t)>& task);

/// Runs every (N, dh, delta, r) task and reduces each sweep point in ascending r.
/// The result is independent of `workers`.
[[nodiscard]] RunResults execute(const ExperimentConfig& config, int workers);

/// Long-form CSV: measure, initial_state, boundary, N, J, delta, dh, n, t, mean, sem, realizations.
[[nodiscard]] std::string format_results_csv(const RunResults& results);

/// Reals with 17 significant digits.
[[nodiscard]] std::string format_real(double v);

struct RunManifest {
    nlohmann::json config;
    std::uint64_t master_seed = 0;
    std::string code_version;
    std::string log_base;
    std::string boundary;
    std::string pairing = "matched";
    std::string started;
    std::string finished;
    std::vector<std::filesystem::path> files;
    std::vector<FailedTask> failures;

    [[nodiscard]] nlohmann::json to_json() const;
};

/// Executes the config and writes results.csv plus metadata.json into out_dir.
RunManifest run(const ExperimentConfig& config, const std::filesystem::path& out_dir, int workers);

[[nodiscard]] std::string code_version();

} // namespace mblcoh
