#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <cstdint>
#include <map>
#include <span>
#include <string_view>
#include <vector>

namespace mblcoh {

enum class Boundary { open, periodic };

[[nodiscard]] std::string_view to_string(Boundary b) noexcept;
[[nodiscard]] Boundary parse_boundary(std::string_view s);

/// Disordered interacting chain:
///   H = J sum_bonds (c+_l c_{l+1} + h.c.) + delta sum_bonds n_l n_{l+1} + sum_l h_l n_l
struct ModelParams {
    int N = 2;
    double J = 1.0;
    double delta = 0.0;
    double dh = 0.0;
    Boundary boundary = Boundary::open;

    void validate() const;
};

struct DisorderRealization {
    std::uint64_t master_seed = 0;
    std::uint64_t index = 0;
    std::vector<double> h;
};

/// Uniform variate in [0, 1) for (master_seed, realization, site).
///
/// Counter-based: u = (splitmix64(splitmix64(splitmix64(seed) ^ r) ^ l) >> 11) * 2^-53,
/// with l the 0-based site. Depends on nothing but its three keys, so any realization
/// can be regenerated independently of execution order.
[[nodiscard]] double disorder_uniform(std::uint64_t master_seed, std::uint64_t r, std::uint64_t site) noexcept;

/// h_l = dh * (2 u_{r,l} - 1).
[[nodiscard]] DisorderRealization sample_disorder(std::uint64_t master_seed, std::uint64_t r, int N, double dh);

/// Real symmetric block of H in SectorBasis(N, k) order.
[[nodiscard]] Eigen::MatrixXd build_hamiltonian(const ModelParams& params, const DisorderRealization& disorder, int k);
[[nodiscard]] Eigen::MatrixXd build_hamiltonian(const ModelParams& params, std::span<const double> fields, int k);

/// Same block in compressed sparse form, for the Krylov engine.
[[nodiscard]] Eigen::SparseMatrix<double> build_hamiltonian_sparse(const ModelParams& params, std::span<const double> fields, int k);

struct HamiltonianBlocks {
    ModelParams params;
    DisorderRealization disorder;
    std::map<int, Eigen::MatrixXd> blocks;
};

[[nodiscard]] HamiltonianBlocks build_blocks(const ModelParams& params, const DisorderRealization& disorder, std::span<const int> sectors);

} // namespace mblcoh
