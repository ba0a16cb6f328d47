#pragma once

#include <string>
#include <vector>

namespace mblcoh {

/// Deliberate defects for exercising the selftest itself.
struct SelftestFaults {
    bool flip_hopping_sign = false;   // negate hopping elements above the diagonal
    double normalization_scale = 1.0; // multiplies the l1 normalization result
};

struct PropertyResult {
    std::string name;
    bool passed = false;
    std::string detail;
};

struct SelftestReport {
    std::vector<PropertyResult> properties;

    [[nodiscard]] bool passed() const;
};

/// Brute-force oracle suite at N <= 6: full-space exponential against the sector
/// pipeline, partial-trace identities, and measure axioms.
[[nodiscard]] SelftestReport selftest(const SelftestFaults& faults = {});

} // namespace mblcoh
