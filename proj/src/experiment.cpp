#include "mblcoh/experiment.hpp"

#include "mblcoh/errors.hpp"
#include "mblcoh/fock_basis.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

namespace mblcoh {

std::string_view to_string(InitialStateKind k) noexcept {
    switch(k) {
    case InitialStateKind::neel: return "neel";
    case InitialStateKind::domain_wall: return "domain_wall";
    case InitialStateKind::max_coherent: return "max_coherent";
    }
    return "unknown";
}

std::string_view to_string(Engine e) noexcept { return e == Engine::spectral ? "spectral" : "krylov"; }

InitialStateKind parse_initial_state(std::string_view s) {
    if(s == "neel") return InitialStateKind::neel;
    if(s == "domain_wall") return InitialStateKind::domain_wall;
    if(s == "max_coherent") return InitialStateKind::max_coherent;
    throw ConfigError("initial state must be \"neel\", \"domain_wall\" or \"max_coherent\", got \"" + std::string(s) + "\"");
}

Engine parse_engine(std::string_view s) {
    if(s == "spectral") return Engine::spectral;
    if(s == "krylov") return Engine::krylov;
    throw ConfigError("engine must be \"spectral\" or \"krylov\", got \"" + std::string(s) + "\"");
}

PureState build_initial_state(InitialStateKind kind, int N) {
    if(N < 1 || N > kMaxSites) throw InvalidDimension("initial state needs 1 <= N <= 20");
    PureState psi{N, {}};
    if(kind == InitialStateKind::max_coherent) {
        const double amplitude = std::pow(2.0, -0.5 * N);
        for(int k = 0; k <= N; ++k)
            psi.sectors.emplace(k, Eigen::VectorXcd::Constant(static_cast<Eigen::Index>(binomial(N, k)), Complex(amplitude, 0.0)));
        return psi;
    }
    if(N % 2 != 0)
        throw UnsupportedConfiguration(std::string(to_string(kind)) + " initial state needs even N for half filling, got N=" + std::to_string(N));
    std::uint32_t bits = 0;
    if(kind == InitialStateKind::neel)
        for(int l = 0; l < N; l += 2) bits |= 1U << l;
    else
        bits = (1U << (N / 2)) - 1U;
    const SectorBasis basis(N, N / 2);
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(basis.size()));
    v[static_cast<Eigen::Index>(basis.index_of(OccupationConfig(bits)))] = 1.0;
    psi.sectors.emplace(N / 2, std::move(v));
    return psi;
}

void ExperimentConfig::validate() const {
    if(N_list.empty()) throw ConfigError("N: sweep list is empty");
    if(delta_list.empty()) throw ConfigError("delta: sweep list is empty");
    if(dh_list.empty()) throw ConfigError("dh: sweep list is empty");
    if(n_list.empty()) throw ConfigError("n_list: list is empty");
    if(measures.empty()) throw ConfigError("measures: list is empty");
    if(realizations < 1) throw ConfigError("R: expected a positive integer, got " + std::to_string(realizations));
    if(!std::isfinite(J)) throw ConfigError("J: expected a finite number");
    for(int N : N_list) {
        if(N < 2 || N > kMaxSites) throw ConfigError("N: expected integers in [2, 20], got " + std::to_string(N));
        if(initial != InitialStateKind::max_coherent && N % 2 != 0)
            throw ConfigError("N: initial state " + std::string(to_string(initial)) + " needs even N, got " + std::to_string(N));
    }
    for(double d : delta_list)
        if(!std::isfinite(d)) throw ConfigError("delta: expected finite numbers");
    for(double d : dh_list)
        if(!(d >= 0.0) || !std::isfinite(d)) throw ConfigError("dh: expected finite numbers >= 0");
    const int N_min = *std::min_element(N_list.begin(), N_list.end());
    for(const auto& s : n_list)
        if(!s.whole_system && (s.n < 1 || s.n > N_min))
            throw ConfigError("n_list: subsystem size " + std::to_string(s.n) + " outside [1, " + std::to_string(N_min) + "]");
    for(int N : N_list) {
        const auto sizes = subsystem_sizes(N);
        const std::set<int> unique(sizes.begin(), sizes.end());
        if(unique.size() != sizes.size()) throw ConfigError("n_list: entries resolve to duplicate sizes for N=" + std::to_string(N));
    }
    if(std::set<Measure>(measures.begin(), measures.end()).size() != measures.size()) throw ConfigError("measures: duplicate entries");
    try {
        (void)grid.build();
    } catch(const Error& e) {
        throw ConfigError(std::string("grid: ") + e.what());
    }
}

std::vector<int> ExperimentConfig::subsystem_sizes(int N) const {
    std::vector<int> out;
    out.reserve(n_list.size());
    for(const auto& s : n_list) out.push_back(s.resolve(N));
    return out;
}

ModelParams ExperimentConfig::model(int N, double delta, double dh) const { return ModelParams{N, J, delta, dh, boundary}; }

std::size_t CoherenceSeries::measure_index(Measure m) const {
    const auto it = std::find(measures.begin(), measures.end(), m);
    if(it == measures.end()) throw NotFound("series has no measure " + std::string(to_string(m)));
    return static_cast<std::size_t>(it - measures.begin());
}

std::size_t CoherenceSeries::n_index(int n) const {
    const auto it = std::find(n_values.begin(), n_values.end(), n);
    if(it == n_values.end()) throw NotFound("series has no subsystem size n=" + std::to_string(n));
    return static_cast<std::size_t>(it - n_values.begin());
}

CoherenceSeries run_realization(const ExperimentConfig& config, std::uint64_t r, double delta, double dh, int N) {
    const ModelParams params = config.model(N, delta, dh);
    params.validate();
    const auto disorder = sample_disorder(config.master_seed, r, N, dh);
    const PureState psi0 = build_initial_state(config.initial, N);
    const TimeGrid grid = config.grid.build();

    std::vector<PureState> states;
    if(config.engine == Engine::spectral) {
        const auto sectors = psi0.sector_keys();
        states = evolve_multi_sector(build_blocks(params, disorder, sectors), psi0, grid);
    } else {
        states = evolve_multi_sector_krylov(params, disorder, psi0, grid);
    }

    CoherenceSeries out;
    out.N = N;
    out.delta = delta;
    out.dh = dh;
    out.realization = r;
    out.measures = config.measures;
    out.n_values = config.subsystem_sizes(N);
    out.times = grid.times();
    const std::size_t T = grid.size();
    out.values.assign(out.measures.size() * out.n_values.size() * T, 0.0);

    const LocalCoherenceEvaluator evaluator(N, psi0.sector_keys(), out.n_values, out.measures, config.log_base);
    for(std::size_t j = 0; j < T; ++j) {
        const auto v = evaluator.evaluate(states[j]);
        for(std::size_t mi = 0; mi < out.measures.size(); ++mi)
            for(std::size_t ni = 0; ni < out.n_values.size(); ++ni) {
                double x = v[mi][ni];
                if(out.measures[mi] == Measure::l1) x = normalize_l1(x, out.n_values[ni]);
                out.values[(mi * out.n_values.size() + ni) * T + j] = x;
            }
    }
    return out;
}

Series EnsembleStats::series(Measure m, int n) const {
    const auto mi = std::find(measures.begin(), measures.end(), m);
    const auto ni = std::find(n_values.begin(), n_values.end(), n);
    if(mi == measures.end() || ni == n_values.end())
        throw NotFound("ensemble has no series for measure " + std::string(to_string(m)) + ", n=" + std::to_string(n));
    const std::size_t T = times.size();
    const std::size_t offset = (static_cast<std::size_t>(mi - measures.begin()) * n_values.size() + static_cast<std::size_t>(ni - n_values.begin())) * T;
    Series s;
    s.t = times;
    s.value.assign(mean.begin() + static_cast<std::ptrdiff_t>(offset), mean.begin() + static_cast<std::ptrdiff_t>(offset + T));
    s.sem.assign(sem.begin() + static_cast<std::ptrdiff_t>(offset), sem.begin() + static_cast<std::ptrdiff_t>(offset + T));
    return s;
}

EnsembleStats ensemble_average(std::span<const CoherenceSeries> series) {
    if(series.empty()) throw ConfigError("ensemble_average: empty ensemble");
    const auto& first = series.front();
    for(const auto& s : series)
        if(s.times != first.times || s.n_values != first.n_values || s.measures != first.measures || s.N != first.N)
            throw ConfigError("ensemble_average: series do not share one grid and configuration");

    EnsembleStats stats;
    stats.N = first.N;
    stats.delta = first.delta;
    stats.dh = first.dh;
    stats.realizations = static_cast<int>(series.size());
    stats.measures = first.measures;
    stats.n_values = first.n_values;
    stats.times = first.times;
    const std::size_t size = first.values.size();
    stats.mean.assign(size, 0.0);
    stats.sem.assign(size, 0.0);

    const double R = static_cast<double>(series.size());
    for(const auto& s : series)
        for(std::size_t i = 0; i < size; ++i) stats.mean[i] += s.values[i];
    for(auto& m : stats.mean) m /= R;
    if(series.size() > 1) {
        for(const auto& s : series)
            for(std::size_t i = 0; i < size; ++i) {
                const double d = s.values[i] - stats.mean[i];
                stats.sem[i] += d * d;
            }
        for(auto& v : stats.sem) v = std::sqrt(v / (R - 1.0) / R);
    }
    return stats;
}

} // namespace mblcoh
