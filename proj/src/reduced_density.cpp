#include "mblcoh/reduced_density.hpp"

#include "mblcoh/errors.hpp"
#include "mblcoh/fock_basis.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <bit>
#include <numeric>
#include <string>

namespace mblcoh {

namespace {

void check_window(int N, int start, int n) {
    if(n < 1 || start < 1 || start + n - 1 > N)
        throw InvalidWindow("window (start=" + std::to_string(start) + ", n=" + std::to_string(n) + ") does not fit in N=" +
                            std::to_string(N));
}

Eigen::Index group_size(int bits, int count) { return static_cast<Eigen::Index>(binomial(bits, count)); }

} // namespace

WindowPlan::WindowPlan(int N, std::vector<int> sectors, int start, int n) : N_(N), start_(start), n_(n), sectors_(std::move(sectors)) {
    if(N < 1 || N > kMaxSites) throw InvalidDimension("site count must be in [1, 20]");
    check_window(N, start, n);
    std::sort(sectors_.begin(), sectors_.end());
    sectors_.erase(std::unique(sectors_.begin(), sectors_.end()), sectors_.end());

    const int shift = start - 1;
    const std::uint32_t window_mask = (1U << n) - 1U;
    const std::uint32_t low_mask = (1U << shift) - 1U;
    for(int k : sectors_) {
        const SectorBasis basis(N, k);
        std::vector<Slot> slots;
        slots.reserve(basis.size());
        for(const auto config : basis.configs()) {
            const std::uint32_t bits = config.bits();
            const std::uint32_t a = (bits >> shift) & window_mask;
            const std::uint32_t e = (bits & low_mask) | ((bits >> (shift + n)) << shift);
            slots.push_back(Slot{std::popcount(a), std::popcount(e), static_cast<std::uint32_t>(colex_rank(a)),
                                 static_cast<std::uint32_t>(colex_rank(e))});
        }
        slots_.emplace(k, std::move(slots));
    }
}

const std::vector<WindowPlan::Slot>& WindowPlan::slots(int sector) const {
    const auto it = slots_.find(sector);
    if(it == slots_.end()) throw ConfigError("window plan has no tables for sector k=" + std::to_string(sector));
    return it->second;
}

WindowAmplitudes::WindowAmplitudes(const PureState& psi, const WindowPlan& plan)
    : start_(plan.start()), n_(plan.size()), env_(plan.sites() - plan.size()) {
    if(psi.N != plan.sites()) throw InvalidDimension("state and window plan disagree on N");
    const std::size_t groups = static_cast<std::size_t>(n_ + 1) * static_cast<std::size_t>(env_ + 1);
    blocks_.resize(groups);
    present_.assign(groups, false);

    for(const auto& [k, amplitudes] : psi.sectors) {
        const auto& slots = plan.slots(k);
        if(static_cast<std::size_t>(amplitudes.size()) != slots.size())
            throw InvalidDimension("sector " + std::to_string(k) + " amplitude count does not match its basis");
        for(int m = std::max(0, k - env_); m <= std::min(n_, k); ++m) {
            const std::size_t idx = index(m, k - m);
            blocks_[idx] = Eigen::MatrixXcd::Zero(group_size(n_, m), group_size(env_, k - m));
            present_[idx] = true;
        }
        for(std::size_t i = 0; i < slots.size(); ++i) {
            const auto& s = slots[i];
            blocks_[index(s.row_group, s.col_group)](s.row, s.col) = amplitudes[static_cast<Eigen::Index>(i)];
        }
    }
}

WindowDensityMatrix::WindowDensityMatrix(int start, int n) : start_(start), n_(n) {
    const std::size_t groups = static_cast<std::size_t>(n + 1) * static_cast<std::size_t>(n + 1);
    blocks_.resize(groups);
    present_.assign(groups, false);
}

void WindowDensityMatrix::set_block(int m, int mp, Eigen::MatrixXcd value) {
    const std::size_t idx = index(m, mp);
    blocks_[idx] = std::move(value);
    present_[idx] = true;
}

bool WindowDensityMatrix::block_diagonal() const {
    for(int m = 0; m <= n_; ++m)
        for(int mp = 0; mp <= n_; ++mp)
            if(m != mp && present(m, mp)) return false;
    return true;
}

Complex WindowDensityMatrix::operator()(std::uint32_t a, std::uint32_t b) const {
    const int m = std::popcount(a);
    const int mp = std::popcount(b);
    if(!present(m, mp)) return {0.0, 0.0};
    return block(m, mp)(static_cast<Eigen::Index>(colex_rank(a)), static_cast<Eigen::Index>(colex_rank(b)));
}

Eigen::MatrixXcd WindowDensityMatrix::dense() const {
    const Eigen::Index d = dimension();
    Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(d, d);
    std::vector<SectorBasis> groups;
    groups.reserve(static_cast<std::size_t>(n_) + 1);
    for(int m = 0; m <= n_; ++m) groups.emplace_back(n_, m);
    for(int m = 0; m <= n_; ++m)
        for(int mp = 0; mp <= n_; ++mp) {
            if(!present(m, mp)) continue;
            const auto& B = block(m, mp);
            const auto& rows = groups[static_cast<std::size_t>(m)];
            const auto& cols = groups[static_cast<std::size_t>(mp)];
            for(Eigen::Index i = 0; i < B.rows(); ++i)
                for(Eigen::Index j = 0; j < B.cols(); ++j)
                    rho(rows[static_cast<std::size_t>(i)].bits(), cols[static_cast<std::size_t>(j)].bits()) = B(i, j);
        }
    return rho;
}

Eigen::VectorXd WindowDensityMatrix::diagonal() const {
    Eigen::VectorXd d = Eigen::VectorXd::Zero(dimension());
    for(int m = 0; m <= n_; ++m) {
        if(!present(m, m)) continue;
        const SectorBasis rows(n_, m);
        const auto& B = block(m, m);
        for(Eigen::Index i = 0; i < B.rows(); ++i) d[rows[static_cast<std::size_t>(i)].bits()] = B(i, i).real();
    }
    return d;
}

WindowDensityMatrix reduce(const WindowAmplitudes& amps) {
    const int n = amps.size();
    const int env = amps.environment_size();
    WindowDensityMatrix rho(amps.start(), n);
    for(int m = 0; m <= n; ++m)
        for(int mp = 0; mp <= n; ++mp) {
            Eigen::MatrixXcd acc;
            bool any = false;
            for(int q = 0; q <= env; ++q) {
                if(!amps.present(m, q) || !amps.present(mp, q)) continue;
                if(!any) {
                    acc = Eigen::MatrixXcd::Zero(amps.block(m, q).rows(), amps.block(mp, q).rows());
                    any = true;
                }
                acc.noalias() += amps.block(m, q) * amps.block(mp, q).adjoint();
            }
            if(any) rho.set_block(m, mp, std::move(acc));
        }
    return rho;
}

WindowDensityMatrix reduce(const PureState& psi, const WindowPlan& plan) { return reduce(WindowAmplitudes(psi, plan)); }

WindowDensityMatrix reduce(const PureState& psi, int start, int n) {
    check_window(psi.N, start, n);
    return reduce(psi, WindowPlan(psi.N, psi.sector_keys(), start, n));
}

Eigen::VectorXd window_spectrum(const WindowAmplitudes& amps) {
    const int n = amps.size();
    const int env = amps.environment_size();

    // Union-find over row groups [0, n] and column groups [n+1, n+1+env]; present
    // blocks are edges. Each connected component is an independent Schmidt problem.
    std::vector<int> parent(static_cast<std::size_t>(n + env + 2));
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int x) {
        while(parent[static_cast<std::size_t>(x)] != x) x = parent[static_cast<std::size_t>(x)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
        return x;
    };
    for(int m = 0; m <= n; ++m)
        for(int q = 0; q <= env; ++q)
            if(amps.present(m, q)) parent[static_cast<std::size_t>(find(m))] = find(n + 1 + q);

    std::vector<double> eigenvalues;
    std::vector<bool> done(parent.size(), false);
    for(int m0 = 0; m0 <= n; ++m0) {
        const int root = find(m0);
        if(done[static_cast<std::size_t>(root)]) continue;
        done[static_cast<std::size_t>(root)] = true;

        std::vector<int> rows, cols;
        Eigen::Index nr = 0, nc = 0;
        for(int m = 0; m <= n; ++m)
            if(find(m) == root) {
                rows.push_back(m);
                nr += group_size(n, m);
            }
        for(int q = 0; q <= env; ++q)
            if(find(n + 1 + q) == root) {
                cols.push_back(q);
                nc += group_size(env, q);
            }
        if(cols.empty()) continue; // row group with no amplitude

        Eigen::MatrixXcd M = Eigen::MatrixXcd::Zero(nr, nc);
        Eigen::Index r0 = 0;
        for(int m : rows) {
            Eigen::Index c0 = 0;
            for(int q : cols) {
                if(amps.present(m, q)) M.block(r0, c0, group_size(n, m), group_size(env, q)) = amps.block(m, q);
                c0 += group_size(env, q);
            }
            r0 += group_size(n, m);
        }
        const Eigen::MatrixXcd G = nr <= nc ? Eigen::MatrixXcd(M * M.adjoint()) : Eigen::MatrixXcd(M.adjoint() * M);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(G, Eigen::EigenvaluesOnly);
        if(solver.info() != Eigen::Success) throw InvalidState("Hermitian eigensolver failed on a window Gram matrix");
        for(Eigen::Index i = 0; i < solver.eigenvalues().size(); ++i) eigenvalues.push_back(solver.eigenvalues()[i]);
    }
    std::sort(eigenvalues.begin(), eigenvalues.end());
    return Eigen::Map<Eigen::VectorXd>(eigenvalues.data(), static_cast<Eigen::Index>(eigenvalues.size()));
}

Eigen::VectorXd window_populations(const WindowAmplitudes& amps) {
    const int n = amps.size();
    const int env = amps.environment_size();
    Eigen::VectorXd p = Eigen::VectorXd::Zero(Eigen::Index{1} << n);
    for(int m = 0; m <= n; ++m) {
        const SectorBasis rows(n, m);
        for(int q = 0; q <= env; ++q) {
            if(!amps.present(m, q)) continue;
            const Eigen::VectorXd w = amps.block(m, q).rowwise().squaredNorm();
            for(Eigen::Index i = 0; i < w.size(); ++i) p[rows[static_cast<std::size_t>(i)].bits()] += w[i];
        }
    }
    return p;
}

Eigen::MatrixXcd trace_out_last_site(const Eigen::MatrixXcd& rho, int n) {
    const Eigen::Index d = Eigen::Index{1} << n;
    if(n < 1 || rho.rows() != d || rho.cols() != d) throw InvalidDimension("trace_out_last_site: matrix is not 2^n x 2^n");
    const Eigen::Index half = d >> 1;
    // Window site n is the top bit; the two halves hold its occupations 0 and 1.
    return rho.topLeftCorner(half, half) + rho.bottomRightCorner(half, half);
}

} // namespace mblcoh
