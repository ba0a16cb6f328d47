#pragma once

#include "mblcoh/coherence.hpp"
#include "mblcoh/hamiltonian.hpp"
#include "mblcoh/propagator.hpp"

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace mblcoh {

enum class InitialStateKind { neel, domain_wall, max_coherent };
enum class Engine { spectral, krylov };

[[nodiscard]] std::string_view to_string(InitialStateKind k) noexcept;
[[nodiscard]] std::string_view to_string(Engine e) noexcept;
[[nodiscard]] InitialStateKind parse_initial_state(std::string_view s);
[[nodiscard]] Engine parse_engine(std::string_view s);

/// neel: |1010...10>; domain_wall: N/2 leading ones; max_coherent: amplitude 2^{-N/2}
/// on every configuration, spread across all sectors.
[[nodiscard]] PureState build_initial_state(InitialStateKind kind, int N);

/// Entry of the subsystem-size list; either a fixed n or "the whole chain".
struct SubsystemSize {
    int n = 0;
    bool whole_system = false;

    [[nodiscard]] int resolve(int N) const noexcept { return whole_system ? N : n; }
    friend bool operator==(const SubsystemSize&, const SubsystemSize&) = default;
};

struct GridSpec {
    double t_min = 0.05;
    double t_max = 1000.0;
    int points = 121;
    bool include_zero = true;

    [[nodiscard]] TimeGrid build() const { return TimeGrid::log_spaced(t_min, t_max, points, include_zero); }
    friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

struct ExperimentConfig {
    std::vector<int> N_list;
    double J = 1.0;
    std::vector<double> delta_list;
    std::vector<double> dh_list;
    Boundary boundary = Boundary::open;
    InitialStateKind initial = InitialStateKind::neel;
    std::vector<SubsystemSize> n_list{{2, false}, {0, true}};
    GridSpec grid;
    int realizations = 1;
    std::uint64_t master_seed = 0;
    std::vector<Measure> measures{Measure::l1};
    LogBase log_base = LogBase::natural;
    Engine engine = Engine::spectral;

    /// Throws ConfigError naming the offending field.
    void validate() const;
    /// n_list resolved for a given chain length, in list order.
    [[nodiscard]] std::vector<int> subsystem_sizes(int N) const;
    [[nodiscard]] ModelParams model(int N, double delta, double dh) const;
};

/// One realization's coherence values; l1 entries are normalized by 2^n - 1,
/// rel_ent entries are raw.
struct CoherenceSeries {
    int N = 0;
    double delta = 0.0;
    double dh = 0.0;
    std::uint64_t realization = 0;
    std::vector<Measure> measures;
    std::vector<int> n_values;
    std::vector<double> times;
    std::vector<double> values; // [measure][n][t]

    [[nodiscard]] double at(std::size_t measure, std::size_t n, std::size_t t) const {
        return values[(measure * n_values.size() + n) * times.size() + t];
    }
    [[nodiscard]] std::size_t measure_index(Measure m) const;
    [[nodiscard]] std::size_t n_index(int n) const;
};

/// Quench of realization r: build blocks, evolve over the grid, evaluate every (measure, n, t).
[[nodiscard]] CoherenceSeries run_realization(const ExperimentConfig& config, std::uint64_t r, double delta, double dh, int N);

/// Mean and standard error of one quantity over time.
struct Series {
    std::vector<double> t;
    std::vector<double> value;
    std::vector<double> sem;
};

struct EnsembleStats {
    int N = 0;
    double delta = 0.0;
    double dh = 0.0;
    int realizations = 0;
    std::vector<Measure> measures;
    std::vector<int> n_values;
    std::vector<double> times;
    std::vector<double> mean; // [measure][n][t]
    std::vector<double> sem;

    [[nodiscard]] Series series(Measure m, int n) const;
};

/// Reduces realizations in the order given (callers pass ascending r).
[[nodiscard]] EnsembleStats ensemble_average(std::span<const CoherenceSeries> series);

} // namespace mblcoh
