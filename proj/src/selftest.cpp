#include "mblcoh/selftest.hpp"

#include "brute_force.hpp"
#include "mblcoh/coherence.hpp"
#include "mblcoh/errors.hpp"
#include "mblcoh/experiment.hpp"
#include "mblcoh/fock_basis.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <functional>
#include <numbers>
#include <sstream>

namespace mblcoh {

namespace {

constexpr double kOracleTolerance = 1e-10;

struct Instance {
    int N;
    double delta;
    double dh;
    InitialStateKind initial;
};

std::vector<Instance> instances() {
    std::vector<Instance> out;
    for(int N : {4, 6})
        for(double delta : {0.0, 1.0})
            for(double dh : {0.0, 10.0})
                for(auto init : {InitialStateKind::neel, InitialStateKind::max_coherent}) out.push_back({N, delta, dh, init});
    out.push_back({6, 1.0, 6.0, InitialStateKind::domain_wall});
    return out;
}

HamiltonianBlocks faulty_blocks(const ModelParams& p, const DisorderRealization& d, const std::vector<int>& sectors, const SelftestFaults& faults) {
    HamiltonianBlocks blocks = build_blocks(p, d, sectors);
    if(faults.flip_hopping_sign)
        for(auto& [k, H] : blocks.blocks)
            for(Eigen::Index i = 0; i < H.rows(); ++i)
                for(Eigen::Index j = i + 1; j < H.cols(); ++j) H(i, j) = -H(i, j);
    return blocks;
}

std::string describe(const Instance& in) {
    std::ostringstream os;
    os << "N=" << in.N << " delta=" << in.delta << " dh=" << in.dh << " initial=" << to_string(in.initial);
    return os.str();
}

PropertyResult check(const std::string& name, const std::function<std::string()>& body) {
    try {
        const std::string failure = body();
        return {name, failure.empty(), failure.empty() ? "ok" : failure};
    } catch(const std::exception& e) {
        return {name, false, std::string("exception: ") + e.what()};
    }
}

} // namespace

bool SelftestReport::passed() const {
    return !properties.empty() && std::all_of(properties.begin(), properties.end(), [](const auto& p) { return p.passed; });
}

SelftestReport selftest(const SelftestFaults& faults) {
    SelftestReport report;
    const std::uint64_t seed = 20240607;

    report.properties.push_back(check("hamiltonian_hermiticity", [&]() -> std::string {
        for(int N : {4, 6})
            for(auto boundary : {Boundary::open, Boundary::periodic}) {
                const ModelParams p{N, 1.0, 1.0, 10.0, boundary};
                std::vector<int> sectors(static_cast<std::size_t>(N) + 1);
                for(int k = 0; k <= N; ++k) sectors[static_cast<std::size_t>(k)] = k;
                const auto blocks = faulty_blocks(p, sample_disorder(seed, 0, N, p.dh), sectors, faults);
                for(const auto& [k, H] : blocks.blocks)
                    if(H != H.transpose()) return "block N=" + std::to_string(N) + " k=" + std::to_string(k) + " is not symmetric";
            }
        return {};
    }));

    report.properties.push_back(check("hamiltonian_vs_fermion_operators", [&]() -> std::string {
        for(int N : {4, 6}) {
            const ModelParams p{N, 1.0, 1.0, 10.0, Boundary::open};
            const auto d = sample_disorder(seed, 1, N, p.dh);
            const Eigen::MatrixXd full = reference::fermion_hamiltonian(N, p.J, p.delta, d.h, false);
            for(int k = 0; k <= N; ++k) {
                const auto blocks = faulty_blocks(p, d, {k}, faults);
                const double err = (blocks.blocks.at(k) - reference::project_to_sector(full, N, k)).cwiseAbs().maxCoeff();
                if(err > 1e-12) return "N=" + std::to_string(N) + " k=" + std::to_string(k) + " differs by " + std::to_string(err);
            }
        }
        return {};
    }));

    report.properties.push_back(check("sector_pipeline_vs_full_exponential", [&]() -> std::string {
        const std::vector<double> times{0.0, 0.3, 1.7, 10.0};
        for(const auto& in : instances()) {
            const ModelParams p{in.N, 1.0, in.delta, in.dh, Boundary::open};
            const auto d = sample_disorder(seed, 2, in.N, in.dh);
            const PureState psi0 = build_initial_state(in.initial, in.N);
            const auto states = evolve_multi_sector(faulty_blocks(p, d, psi0.sector_keys(), faults), psi0, TimeGrid(times));
            const Eigen::MatrixXd full_H = reference::fermion_hamiltonian(in.N, p.J, p.delta, d.h, false);
            const Eigen::VectorXcd full0 = reference::initial_state(to_string(in.initial), in.N);
            for(std::size_t j = 0; j < times.size(); ++j) {
                const Eigen::VectorXcd expect = reference::evolve(full_H, full0, times[j]);
                const double amp_err = (states[j].to_full() - expect).cwiseAbs().maxCoeff();
                if(amp_err > kOracleTolerance) return describe(in) + " t=" + std::to_string(times[j]) + " amplitude error " + std::to_string(amp_err);
                for(int n = 1; n <= in.N; ++n)
                    for(auto m : {Measure::l1, Measure::rel_ent}) {
                        const double got = local_coherence(states[j], n, m);
                        const double want = reference::local_coherence(expect, in.N, n, to_string(m));
                        if(std::abs(got - want) > kOracleTolerance)
                            return describe(in) + " n=" + std::to_string(n) + " " + std::string(to_string(m)) + " got " + std::to_string(got) +
                                   " expected " + std::to_string(want);
                    }
            }
        }
        return {};
    }));

    report.properties.push_back(check("reduced_density_axioms", [&]() -> std::string {
        const int N = 6;
        const ModelParams p{N, 1.0, 1.0, 6.0, Boundary::open};
        const PureState psi0 = build_initial_state(InitialStateKind::max_coherent, N);
        const auto states = evolve_multi_sector(faulty_blocks(p, sample_disorder(seed, 3, N, p.dh), psi0.sector_keys(), faults), psi0,
                                                TimeGrid({0.7, 5.0}));
        for(const auto& psi : states)
            for(int n = 1; n <= N; ++n)
                for(int start = 1; start + n - 1 <= N; ++start) {
                    const Eigen::MatrixXcd rho = reduce(psi, start, n).dense();
                    if(std::abs(rho.trace() - 1.0) > 1e-12) return "trace deviates at n=" + std::to_string(n);
                    if((rho - rho.adjoint()).cwiseAbs().maxCoeff() > 1e-12) return "not Hermitian at n=" + std::to_string(n);
                    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho, Eigen::EigenvaluesOnly);
                    if(es.eigenvalues().minCoeff() < -1e-10) return "negative eigenvalue at n=" + std::to_string(n);
                }
        return {};
    }));

    report.properties.push_back(check("partial_trace_consistency", [&]() -> std::string {
        const int N = 6;
        const ModelParams p{N, 1.0, 1.0, 10.0, Boundary::open};
        const PureState psi0 = build_initial_state(InitialStateKind::neel, N);
        const auto psi = evolve_multi_sector(faulty_blocks(p, sample_disorder(seed, 4, N, p.dh), psi0.sector_keys(), faults), psi0,
                                             TimeGrid({2.5}))[0];
        for(int start = 1; start <= N; ++start)
            for(int n = 2; start + n - 1 <= N; ++n) {
                const Eigen::MatrixXcd traced = trace_out_last_site(reduce(psi, start, n).dense(), n);
                const double err = (traced - reduce(psi, start, n - 1).dense()).cwiseAbs().maxCoeff();
                if(err > 1e-12) return "window (" + std::to_string(start) + "," + std::to_string(n) + ") error " + std::to_string(err);
            }
        return {};
    }));

    report.properties.push_back(check("complement_spectrum", [&]() -> std::string {
        const int N = 6;
        const ModelParams p{N, 1.0, 1.0, 6.0, Boundary::open};
        const PureState psi0 = build_initial_state(InitialStateKind::max_coherent, N);
        const auto psi = evolve_multi_sector(faulty_blocks(p, sample_disorder(seed, 5, N, p.dh), psi0.sector_keys(), faults), psi0,
                                             TimeGrid({3.0}))[0];
        // Left block [1, n] against its complement [n+1, N].
        for(int n = 1; n < N; ++n) {
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> a(reduce(psi, 1, n).dense(), Eigen::EigenvaluesOnly);
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> b(reduce(psi, n + 1, N - n).dense(), Eigen::EigenvaluesOnly);
            Eigen::VectorXd ea = a.eigenvalues(), eb = b.eigenvalues();
            const Eigen::Index r = std::min(ea.size(), eb.size());
            const double err = (ea.tail(r) - eb.tail(r)).cwiseAbs().maxCoeff();
            if(err > 1e-10) return "n=" + std::to_string(n) + " spectra differ by " + std::to_string(err);
        }
        return {};
    }));

    report.properties.push_back(check("measure_axioms", [&]() -> std::string {
        for(int n = 1; n <= 4; ++n) {
            const Eigen::Index d = Eigen::Index{1} << n;
            const Eigen::VectorXcd v = Eigen::VectorXcd::Constant(d, 1.0 / std::sqrt(static_cast<double>(d)));
            const Eigen::MatrixXcd pure = v * v.adjoint();
            if(std::abs(l1_coherence(pure) - static_cast<double>(d - 1)) > 1e-12) return "l1 of maximally coherent state != d-1";
            if(std::abs(rel_ent_coherence(pure) - std::log(static_cast<double>(d))) > 1e-12) return "rel_ent of maximally coherent state != ln d";
            const Eigen::MatrixXcd diag = Eigen::VectorXd::LinSpaced(d, 1.0, 2.0).cast<Complex>().asDiagonal();
            const Eigen::MatrixXcd rho = diag / diag.trace();
            if(l1_coherence(rho) != 0.0 || std::abs(rel_ent_coherence(rho)) > 1e-14) return "incoherent state has nonzero coherence";
        }
        return {};
    }));

    report.properties.push_back(check("normalization_unit_case", [&]() -> std::string {
        for(int n = 1; n <= 12; ++n) {
            const double unit = normalize_l1(std::ldexp(1.0, n) - 1.0, n) * faults.normalization_scale;
            if(std::abs(unit - 1.0) > 1e-15) return "n=" + std::to_string(n) + " maximally coherent state normalizes to " + std::to_string(unit);
        }
        const PureState psi = build_initial_state(InitialStateKind::max_coherent, 6);
        const double total = normalize_l1(l1_coherence_pure(psi), 6) * faults.normalization_scale;
        if(std::abs(total - 1.0) > 1e-12) return "maximally coherent N=6 state normalizes to " + std::to_string(total);
        return {};
    }));

    report.properties.push_back(check("norm_conservation", [&]() -> std::string {
        const int N = 6;
        const ModelParams p{N, 1.0, 1.0, 6.0, Boundary::open};
        const PureState psi0 = build_initial_state(InitialStateKind::max_coherent, N);
        const auto states = evolve_multi_sector(faulty_blocks(p, sample_disorder(seed, 6, N, p.dh), psi0.sector_keys(), faults), psi0,
                                                TimeGrid::log_spaced(0.05, 1000.0, 20));
        for(const auto& s : states)
            for(const auto& [k, v] : s.sectors)
                if(std::abs(v.squaredNorm() - psi0.sectors.at(k).squaredNorm()) > 1e-10) return "sector " + std::to_string(k) + " norm drifts";
        return {};
    }));

    return report;
}

} // namespace mblcoh
