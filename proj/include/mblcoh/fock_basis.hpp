#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace mblcoh {

inline constexpr int kMaxSites = 20;

/// Occupation-number configuration of a chain. Site l (1-based) lives in bit l-1.
class OccupationConfig {
  public:
    constexpr OccupationConfig() = default;
    constexpr explicit OccupationConfig(std::uint32_t bits) : bits_(bits) {}

    /// Parses a site string such as "1010" (site 1 first).
    static OccupationConfig from_sites(std::string_view sites);

    [[nodiscard]] constexpr std::uint32_t bits() const noexcept { return bits_; }
    [[nodiscard]] int particle_count() const noexcept;
    [[nodiscard]] constexpr bool occupied(int site) const noexcept { return (bits_ >> (site - 1)) & 1U; }
    /// Site string of length N, site 1 first.
    [[nodiscard]] std::string to_sites(int N) const;

    constexpr auto operator<=>(const OccupationConfig&) const = default;

  private:
    std::uint32_t bits_ = 0;
};

/// All configurations of N sites holding exactly k particles, in ascending integer order.
///
/// Lookup uses the combinatorial number system: for k-subsets the colex rank
/// coincides with the position in ascending integer order, so no table is stored.
class SectorBasis {
  public:
    SectorBasis(int N, int k);

    [[nodiscard]] int sites() const noexcept { return N_; }
    [[nodiscard]] int particles() const noexcept { return k_; }
    [[nodiscard]] std::size_t size() const noexcept { return configs_.size(); }
    [[nodiscard]] OccupationConfig operator[](std::size_t i) const { return configs_[i]; }
    [[nodiscard]] const std::vector<OccupationConfig>& configs() const noexcept { return configs_; }

    [[nodiscard]] bool contains(OccupationConfig c) const noexcept;
    /// Position of c in this sector; throws NotFound when c is not a member.
    [[nodiscard]] std::size_t index_of(OccupationConfig c) const;

  private:
    int N_;
    int k_;
    std::vector<OccupationConfig> configs_;
};

[[nodiscard]] SectorBasis enumerate_sector(int N, int k);
[[nodiscard]] std::size_t config_rank(const SectorBasis& basis, OccupationConfig config);

[[nodiscard]] std::uint64_t binomial(int n, int k) noexcept;

/// Rank of a k-bit pattern among all patterns with the same popcount (ascending order).
[[nodiscard]] std::size_t colex_rank(std::uint32_t bits) noexcept;

} // namespace mblcoh
