#include "mblcoh/propagator.hpp"

#include "mblcoh/errors.hpp"
#include "mblcoh/fock_basis.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <string>

namespace mblcoh {

namespace {

void check_time(double t) {
    if(!(t >= 0.0) || !std::isfinite(t)) throw InvalidTime("evolution time must be finite and >= 0, got " + std::to_string(t));
}

} // namespace

TimeGrid::TimeGrid(std::vector<double> times) : times_(std::move(times)) {
    for(std::size_t i = 0; i < times_.size(); ++i) {
        check_time(times_[i]);
        if(i > 0 && !(times_[i] > times_[i - 1])) throw InvalidTime("time grid must be strictly ascending");
    }
}

TimeGrid TimeGrid::log_spaced(double t_min, double t_max, int count, bool include_zero) {
    if(!(t_min > 0.0) || !(t_max >= t_min) || count < 1) throw InvalidTime("log grid needs 0 < t_min <= t_max and count >= 1");
    if(count > 1 && !(t_max > t_min)) throw InvalidTime("log grid with several points needs t_max > t_min");
    std::vector<double> t;
    t.reserve(static_cast<std::size_t>(count) + 1);
    if(include_zero) t.push_back(0.0);
    const double lo = std::log(t_min);
    const double hi = std::log(t_max);
    for(int i = 0; i < count; ++i) {
        const double x = count == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1);
        t.push_back(i == count - 1 ? t_max : (i == 0 ? t_min : std::exp(x)));
    }
    return TimeGrid(std::move(t));
}

TimeGrid TimeGrid::standard() { return log_spaced(0.05, 1000.0, 121, true); }

SpectralDecomposition diagonalize(const Eigen::MatrixXd& block) {
    if(block.rows() == 0 || block.rows() != block.cols())
        throw InvalidDimension("diagonalize needs a non-empty square matrix, got " + std::to_string(block.rows()) + "x" +
                               std::to_string(block.cols()));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(block);
    if(solver.info() != Eigen::Success) throw InvalidState("symmetric eigensolver failed to converge");
    return {solver.eigenvalues(), solver.eigenvectors()};
}

Eigen::VectorXcd evolve_to(const SpectralDecomposition& decomp, const Eigen::VectorXcd& psi0, double t) {
    return evolve(decomp, psi0, TimeGrid(std::vector<double>{t})).front();
}

std::vector<Eigen::VectorXcd> evolve(const SpectralDecomposition& decomp, const Eigen::VectorXcd& psi0, const TimeGrid& grid) {
    const Eigen::Index dim = decomp.vectors.rows();
    if(psi0.size() != dim)
        throw InvalidDimension("state has " + std::to_string(psi0.size()) + " amplitudes, decomposition has dimension " + std::to_string(dim));

    const Eigen::Index T = static_cast<Eigen::Index>(grid.size());
    const Eigen::VectorXd c_re = decomp.vectors.transpose() * psi0.real();
    const Eigen::VectorXd c_im = decomp.vectors.transpose() * psi0.imag();

    // Eigen-basis coefficients for all times at once, then two real products.
    Eigen::MatrixXd a_re(dim, T), a_im(dim, T);
    for(Eigen::Index j = 0; j < T; ++j) {
        const double t = grid[static_cast<std::size_t>(j)];
        for(Eigen::Index n = 0; n < dim; ++n) {
            const double phase = decomp.energies[n] * t;
            const double c = std::cos(phase);
            const double s = std::sin(phase);
            // (c_re + i c_im) * (cos - i sin)
            a_re(n, j) = c_re[n] * c + c_im[n] * s;
            a_im(n, j) = c_im[n] * c - c_re[n] * s;
        }
    }
    const Eigen::MatrixXd out_re = decomp.vectors * a_re;
    const Eigen::MatrixXd out_im = decomp.vectors * a_im;

    std::vector<Eigen::VectorXcd> out(static_cast<std::size_t>(T), Eigen::VectorXcd(dim));
    for(Eigen::Index j = 0; j < T; ++j) {
        auto& v = out[static_cast<std::size_t>(j)];
        if(grid[static_cast<std::size_t>(j)] == 0.0) {
            v = psi0; // exact identity rather than V (V^T psi0)
            continue;
        }
        v.real() = out_re.col(j);
        v.imag() = out_im.col(j);
    }
    return out;
}

Eigen::VectorXcd expmv(const Eigen::SparseMatrix<double>& H, const Eigen::VectorXcd& psi, double t, const KrylovOptions& options) {
    check_time(t);
    if(H.rows() != H.cols() || H.rows() != psi.size()) throw InvalidDimension("expmv: matrix and vector dimensions differ");
    const Eigen::Index dim = psi.size();
    Eigen::VectorXcd current = psi;
    if(t == 0.0 || dim == 0) return current;

    const int m_max = static_cast<int>(std::min<Eigen::Index>(options.max_dimension, dim));
    double remaining = t;
    int substeps = 0;
    double last_residual = 0.0;

    std::vector<Eigen::VectorXcd> basis;
    basis.reserve(static_cast<std::size_t>(m_max) + 1);

    while(remaining > 0.0) {
        if(++substeps > options.max_substeps)
            throw ConvergenceError("Krylov propagation exceeded " + std::to_string(options.max_substeps) +
                                       " substeps; last residual estimate " + std::to_string(last_residual),
                                   last_residual);

        const double beta0 = current.norm();
        basis.clear();
        basis.push_back(current / beta0);
        std::vector<double> alpha;
        std::vector<double> beta; // beta[j] couples basis j and j+1
        bool invariant = false;
        for(int j = 0; j < m_max; ++j) {
            Eigen::VectorXcd w = H * basis[static_cast<std::size_t>(j)];
            alpha.push_back(basis[static_cast<std::size_t>(j)].dot(w).real());
            // Full reorthogonalization; m stays small.
            for(int pass = 0; pass < 2; ++pass)
                for(const auto& q : basis) w -= q * q.dot(w);
            const double b = w.norm();
            beta.push_back(b);
            if(b <= 1e-13 * (1.0 + std::abs(alpha.back()))) {
                invariant = true;
                break;
            }
            if(j + 1 < m_max) basis.push_back(w / b);
        }

        const int m = static_cast<int>(alpha.size());
        Eigen::MatrixXd T = Eigen::MatrixXd::Zero(m, m);
        for(int j = 0; j < m; ++j) {
            T(j, j) = alpha[static_cast<std::size_t>(j)];
            if(j + 1 < m) T(j, j + 1) = T(j + 1, j) = beta[static_cast<std::size_t>(j)];
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> small(T);
        const Eigen::VectorXd& theta = small.eigenvalues();
        const Eigen::MatrixXd& S = small.eigenvectors();
        const double beta_m = invariant ? 0.0 : beta.back();

        auto coefficients = [&](double tau) {
            Eigen::VectorXcd y(m);
            Eigen::VectorXcd z(m);
            for(int i = 0; i < m; ++i) z[i] = S(0, i) * std::exp(Complex(0.0, -theta[i] * tau));
            y = S.cast<Complex>() * z;
            return y;
        };

        double tau = remaining;
        Eigen::VectorXcd y = coefficients(tau);
        double residual = beta_m * std::abs(y[m - 1]);
        while(residual > options.tolerance) {
            tau *= 0.5;
            if(tau < remaining * 0x1.0p-50)
                throw ConvergenceError("Krylov step collapsed; residual estimate " + std::to_string(residual) +
                                           " exceeds tolerance " + std::to_string(options.tolerance),
                                       residual);
            y = coefficients(tau);
            residual = beta_m * std::abs(y[m - 1]);
        }
        last_residual = residual;

        Eigen::VectorXcd next = Eigen::VectorXcd::Zero(dim);
        for(int i = 0; i < m; ++i) next += basis[static_cast<std::size_t>(i)] * y[i];
        current = beta0 * next;
        remaining = tau == remaining ? 0.0 : remaining - tau;
    }
    return current;
}

double PureState::norm_squared() const {
    double s = 0.0;
    for(const auto& [k, v] : sectors) s += v.squaredNorm();
    return s;
}

std::vector<int> PureState::sector_keys() const {
    std::vector<int> keys;
    keys.reserve(sectors.size());
    for(const auto& [k, v] : sectors) keys.push_back(k);
    return keys;
}

Eigen::VectorXcd PureState::to_full() const {
    Eigen::VectorXcd full = Eigen::VectorXcd::Zero(Eigen::Index{1} << N);
    for(const auto& [k, v] : sectors) {
        const SectorBasis basis(N, k);
        for(std::size_t i = 0; i < basis.size(); ++i) full[basis[i].bits()] = v[static_cast<Eigen::Index>(i)];
    }
    return full;
}

SectorDecompositions diagonalize_blocks(const HamiltonianBlocks& blocks) {
    SectorDecompositions out;
    for(const auto& [k, H] : blocks.blocks) out.emplace(k, diagonalize(H));
    return out;
}

std::vector<PureState> evolve_multi_sector(const SectorDecompositions& decomps, const PureState& psi0, const TimeGrid& grid) {
    std::vector<PureState> out(grid.size(), PureState{psi0.N, {}});
    for(const auto& [k, amplitudes] : psi0.sectors) {
        const auto it = decomps.find(k);
        if(it == decomps.end()) throw ConfigError("no Hamiltonian block for sector k=" + std::to_string(k));
        auto evolved = evolve(it->second, amplitudes, grid);
        for(std::size_t j = 0; j < grid.size(); ++j) out[j].sectors.emplace(k, std::move(evolved[j]));
    }
    return out;
}

std::vector<PureState> evolve_multi_sector(const HamiltonianBlocks& blocks, const PureState& psi0, const TimeGrid& grid) {
    SectorDecompositions decomps;
    for(const auto& [k, amplitudes] : psi0.sectors) {
        const auto it = blocks.blocks.find(k);
        if(it == blocks.blocks.end()) throw ConfigError("no Hamiltonian block for sector k=" + std::to_string(k));
        decomps.emplace(k, diagonalize(it->second));
    }
    return evolve_multi_sector(decomps, psi0, grid);
}

std::vector<PureState> evolve_multi_sector_krylov(const ModelParams& params, const DisorderRealization& disorder, const PureState& psi0,
                                                  const TimeGrid& grid, const KrylovOptions& options) {
    std::vector<PureState> out(grid.size(), PureState{psi0.N, {}});
    for(const auto& [k, amplitudes] : psi0.sectors) {
        const auto H = build_hamiltonian_sparse(params, disorder.h, k);
        Eigen::VectorXcd v = amplitudes;
        double previous = 0.0;
        for(std::size_t j = 0; j < grid.size(); ++j) {
            v = expmv(H, v, grid[j] - previous, options);
            previous = grid[j];
            out[j].sectors.emplace(k, v);
        }
    }
    return out;
}

} // namespace mblcoh
