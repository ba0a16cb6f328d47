#include "mblcoh/fock_basis.hpp"

#include "mblcoh/errors.hpp"

#include <array>
#include <bit>

namespace mblcoh {

namespace {

using BinomialTable = std::array<std::array<std::uint64_t, kMaxSites + 2>, kMaxSites + 2>;

constexpr BinomialTable make_binomials() {
    BinomialTable t{};
    for(int n = 0; n <= kMaxSites + 1; ++n) {
        t[n][0] = 1;
        for(int k = 1; k <= n; ++k) t[n][k] = t[n - 1][k - 1] + (k <= n - 1 ? t[n - 1][k] : 0);
    }
    return t;
}

constexpr BinomialTable kBinomials = make_binomials();

} // namespace

OccupationConfig OccupationConfig::from_sites(std::string_view sites) {
    if(sites.empty() || sites.size() > kMaxSites) throw InvalidDimension("site string length must be in [1, 20]");
    std::uint32_t bits = 0;
    for(std::size_t l = 0; l < sites.size(); ++l) {
        if(sites[l] == '1')
            bits |= 1U << l;
        else if(sites[l] != '0')
            throw InvalidDimension("site string may contain only '0' and '1'");
    }
    return OccupationConfig(bits);
}

int OccupationConfig::particle_count() const noexcept { return std::popcount(bits_); }

std::string OccupationConfig::to_sites(int N) const {
    std::string s(static_cast<std::size_t>(N), '0');
    for(int l = 0; l < N; ++l)
        if((bits_ >> l) & 1U) s[static_cast<std::size_t>(l)] = '1';
    return s;
}

std::uint64_t binomial(int n, int k) noexcept {
    if(n < 0 || k < 0 || k > n || n > kMaxSites + 1) return 0;
    return kBinomials[n][k];
}

std::size_t colex_rank(std::uint32_t bits) noexcept {
    std::size_t rank = 0;
    int j = 1;
    while(bits != 0) {
        const int pos = std::countr_zero(bits);
        rank += kBinomials[pos][j];
        bits &= bits - 1;
        ++j;
    }
    return rank;
}

SectorBasis::SectorBasis(int N, int k) : N_(N), k_(k) {
    if(N <= 0 || N > kMaxSites) throw InvalidDimension("site count must be in [1, 20], got " + std::to_string(N));
    if(k < 0 || k > N) throw InvalidDimension("particle count " + std::to_string(k) + " outside [0, " + std::to_string(N) + "]");

    configs_.reserve(binomial(N, k));
    if(k == 0) {
        configs_.emplace_back(0U);
        return;
    }
    // Gosper's hack walks k-bit patterns in ascending order.
    std::uint32_t v = (1U << k) - 1U;
    const std::uint32_t limit = 1U << N;
    while(v < limit) {
        configs_.emplace_back(v);
        const std::uint32_t t = v | (v - 1U);
        v = (t + 1U) | (((~t & -~t) - 1U) >> (std::countr_zero(v) + 1));
    }
}

bool SectorBasis::contains(OccupationConfig c) const noexcept {
    return (c.bits() >> N_) == 0 && c.particle_count() == k_;
}

std::size_t SectorBasis::index_of(OccupationConfig c) const {
    if(!contains(c))
        throw NotFound("configuration " + c.to_sites(N_) + " is not in sector (N=" + std::to_string(N_) + ", k=" + std::to_string(k_) + ")");
    return colex_rank(c.bits());
}

SectorBasis enumerate_sector(int N, int k) { return SectorBasis(N, k); }

std::size_t config_rank(const SectorBasis& basis, OccupationConfig config) { return basis.index_of(config); }

} // namespace mblcoh
