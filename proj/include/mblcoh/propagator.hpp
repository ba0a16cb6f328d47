#pragma once

#include "mblcoh/hamiltonian.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <complex>
#include <map>
#include <vector>

namespace mblcoh {

using Complex = std::complex<double>;

/// Ascending sample times (hbar = 1).
class TimeGrid {
  public:
    TimeGrid() = default;
    explicit TimeGrid(std::vector<double> times);

    /// t = 0 (optional) followed by `count` points log-spaced over [t_min, t_max].
    static TimeGrid log_spaced(double t_min, double t_max, int count, bool include_zero = true);
    /// t = 0 plus 121 log-spaced points over [0.05, 1000].
    static TimeGrid standard();

    [[nodiscard]] const std::vector<double>& times() const noexcept { return times_; }
    [[nodiscard]] std::size_t size() const noexcept { return times_.size(); }
    [[nodiscard]] double operator[](std::size_t i) const { return times_[i]; }
    [[nodiscard]] double back() const { return times_.back(); }

  private:
    std::vector<double> times_;
};

struct SpectralDecomposition {
    Eigen::VectorXd energies;  // ascending
    Eigen::MatrixXd vectors;   // orthonormal columns, real for real-symmetric blocks
};

[[nodiscard]] SpectralDecomposition diagonalize(const Eigen::MatrixXd& block);

/// exp(-i H t) psi0 via the decomposition.
[[nodiscard]] Eigen::VectorXcd evolve_to(const SpectralDecomposition& decomp, const Eigen::VectorXcd& psi0, double t);
[[nodiscard]] std::vector<Eigen::VectorXcd> evolve(const SpectralDecomposition& decomp, const Eigen::VectorXcd& psi0, const TimeGrid& grid);

struct KrylovOptions {
    int max_dimension = 40;
    double tolerance = 1e-10;
    int max_substeps = 100000;
};

/// exp(-i H t) psi with a Lanczos basis, splitting t into substeps whenever
/// the a-posteriori residual estimate exceeds the tolerance.
[[nodiscard]] Eigen::VectorXcd expmv(const Eigen::SparseMatrix<double>& H, const Eigen::VectorXcd& psi, double t,
                                     const KrylovOptions& options = {});

/// Amplitudes over a direct sum of particle-number sectors.
struct PureState {
    int N = 0;
    std::map<int, Eigen::VectorXcd> sectors;

    [[nodiscard]] double norm_squared() const;
    [[nodiscard]] std::vector<int> sector_keys() const;
    /// Dense 2^N amplitude vector indexed by configuration bits.
    [[nodiscard]] Eigen::VectorXcd to_full() const;
};

using SectorDecompositions = std::map<int, SpectralDecomposition>;

[[nodiscard]] SectorDecompositions diagonalize_blocks(const HamiltonianBlocks& blocks);

[[nodiscard]] std::vector<PureState> evolve_multi_sector(const SectorDecompositions& decomps, const PureState& psi0,
                                                         const TimeGrid& grid);
[[nodiscard]] std::vector<PureState> evolve_multi_sector(const HamiltonianBlocks& blocks, const PureState& psi0,
                                                         const TimeGrid& grid);

/// Krylov counterpart of evolve_multi_sector; each grid point is reached from the previous one.
[[nodiscard]] std::vector<PureState> evolve_multi_sector_krylov(const ModelParams& params, const DisorderRealization& disorder,
                                                                const PureState& psi0, const TimeGrid& grid,
                                                                const KrylovOptions& options = {});

} // namespace mblcoh
