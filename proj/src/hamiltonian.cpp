#include "mblcoh/hamiltonian.hpp"

#include "mblcoh/errors.hpp"
#include "mblcoh/fock_basis.hpp"

#include <cmath>
#include <string>

namespace mblcoh {

namespace {

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    std::uint64_t z = x + 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// Calls visit(row, col, value) for every nonzero of the block, diagonal first
// for each row, then the hops out of that configuration.
template <typename Visit>
void for_each_element(const ModelParams& p, std::span<const double> h, const SectorBasis& basis, Visit&& visit) {
    const int N = p.N;
    const int bonds = p.boundary == Boundary::open ? N - 1 : N;
    for(std::size_t i = 0; i < basis.size(); ++i) {
        const std::uint32_t bits = basis[i].bits();
        double diag = 0.0;
        for(int l = 0; l < N; ++l)
            if((bits >> l) & 1U) diag += h[static_cast<std::size_t>(l)];
        for(int b = 0; b < bonds; ++b) {
            const int l = b;
            const int m = (b + 1) % N;
            const bool nl = (bits >> l) & 1U;
            const bool nm = (bits >> m) & 1U;
            if(nl && nm) diag += p.delta;
            if(nl != nm && p.J != 0.0) {
                const std::uint32_t swapped = bits ^ ((1U << l) | (1U << m));
                visit(basis.index_of(OccupationConfig(swapped)), i, p.J);
            }
        }
        visit(i, i, diag);
    }
}

} // namespace

std::string_view to_string(Boundary b) noexcept { return b == Boundary::open ? "open" : "periodic"; }

Boundary parse_boundary(std::string_view s) {
    if(s == "open") return Boundary::open;
    if(s == "periodic") return Boundary::periodic;
    throw ConfigError("boundary must be \"open\" or \"periodic\", got \"" + std::string(s) + "\"");
}

void ModelParams::validate() const {
    if(N < 2 || N > kMaxSites) throw InvalidDimension("model needs 2 <= N <= 20, got N=" + std::to_string(N));
    if(!(dh >= 0.0)) throw ConfigError("disorder half-width must be >= 0");
}

double disorder_uniform(std::uint64_t master_seed, std::uint64_t r, std::uint64_t site) noexcept {
    const std::uint64_t key = splitmix64(splitmix64(splitmix64(master_seed) ^ r) ^ site);
    return static_cast<double>(key >> 11) * 0x1.0p-53;
}

DisorderRealization sample_disorder(std::uint64_t master_seed, std::uint64_t r, int N, double dh) {
    if(N <= 0) throw InvalidDimension("disorder needs N >= 1");
    if(!(dh >= 0.0)) throw ConfigError("disorder half-width must be >= 0");
    DisorderRealization d{master_seed, r, std::vector<double>(static_cast<std::size_t>(N))};
    for(int l = 0; l < N; ++l) d.h[static_cast<std::size_t>(l)] = dh * (2.0 * disorder_uniform(master_seed, r, static_cast<std::uint64_t>(l)) - 1.0);
    return d;
}

Eigen::MatrixXd build_hamiltonian(const ModelParams& params, std::span<const double> fields, int k) {
    params.validate();
    if(fields.size() != static_cast<std::size_t>(params.N))
        throw InvalidDimension("expected " + std::to_string(params.N) + " site fields, got " + std::to_string(fields.size()));
    const SectorBasis basis(params.N, k);
    const auto dim = static_cast<Eigen::Index>(basis.size());
    Eigen::MatrixXd H = Eigen::MatrixXd::Zero(dim, dim);
    // Periodic N=2 visits the same bond twice; accumulate rather than assign.
    for_each_element(params, fields, basis, [&](std::size_t row, std::size_t col, double v) {
        H(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col)) += v;
    });
    return H;
}

Eigen::MatrixXd build_hamiltonian(const ModelParams& params, const DisorderRealization& disorder, int k) {
    return build_hamiltonian(params, std::span<const double>(disorder.h), k);
}

Eigen::SparseMatrix<double> build_hamiltonian_sparse(const ModelParams& params, std::span<const double> fields, int k) {
    params.validate();
    if(fields.size() != static_cast<std::size_t>(params.N))
        throw InvalidDimension("expected " + std::to_string(params.N) + " site fields, got " + std::to_string(fields.size()));
    const SectorBasis basis(params.N, k);
    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(basis.size() * static_cast<std::size_t>(params.N + 1));
    for_each_element(params, fields, basis, [&](std::size_t row, std::size_t col, double v) {
        triplets.emplace_back(static_cast<int>(row), static_cast<int>(col), v);
    });
    const auto dim = static_cast<Eigen::Index>(basis.size());
    Eigen::SparseMatrix<double> H(dim, dim);
    H.setFromTriplets(triplets.begin(), triplets.end());
    return H;
}

HamiltonianBlocks build_blocks(const ModelParams& params, const DisorderRealization& disorder, std::span<const int> sectors) {
    HamiltonianBlocks out{params, disorder, {}};
    for(int k : sectors) out.blocks.emplace(k, build_hamiltonian(params, disorder, k));
    return out;
}

} // namespace mblcoh
