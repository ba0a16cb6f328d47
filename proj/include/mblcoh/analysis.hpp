#pragma once

#include "mblcoh/experiment.hpp"

#include <limits>
#include <span>
#include <string>
#include <vector>

namespace mblcoh {

/// l1: plain difference of means. rel_ent: difference divided by the long-time
/// (t > threshold) average of the interaction-free series.
enum class DifferenceMode { l1, rel_ent };

struct DifferenceSeries {
    int n = 0;
    DifferenceMode mode = DifferenceMode::l1;
    std::vector<double> t;
    std::vector<double> value;
    std::vector<double> sem;
    double reference_level = 1.0; // divisor used in rel_ent mode
    std::string pairing = "matched";
};

/// Difference of two ensemble means over one grid. The sem is sqrt(sem_a^2 + sem_b^2),
/// an upper bound when the ensembles share disorder fields.
[[nodiscard]] DifferenceSeries interaction_difference(const Series& interacting, const Series& free, int n, DifferenceMode mode,
                                                      double long_time_threshold = 10.0);

/// Same mean as interaction_difference, with the sem of the per-realization paired
/// differences. Both spans must list realizations in the same order.
[[nodiscard]] DifferenceSeries paired_difference(std::span<const CoherenceSeries> interacting, std::span<const CoherenceSeries> free,
                                                 Measure measure, int n, DifferenceMode mode, double long_time_threshold = 10.0);

/// Long-time level of a series: mean over grid points with t > threshold.
[[nodiscard]] double long_time_average(std::span<const double> t, std::span<const double> y, double threshold);

enum class Abscissa { ln, log10 };

struct SlopeFit {
    double slope = 0.0;
    double stderr_slope = 0.0;
    double intercept = 0.0;
    std::size_t points = 0;
};

/// Ordinary least squares of y against log t over t in [t_min, t_max].
[[nodiscard]] SlopeFit fit_slope(std::span<const double> t, std::span<const double> y, double t_min, double t_max,
                                 Abscissa abscissa = Abscissa::ln);
[[nodiscard]] SlopeFit fit_slope(const DifferenceSeries& diff, double t_min, double t_max, Abscissa abscissa = Abscissa::ln);

/// Mean over the upper `window_fraction` of the logarithmic time range (positive times only).
[[nodiscard]] double saturation_value(std::span<const double> t, std::span<const double> y, double window_fraction = 0.5);

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
};

[[nodiscard]] LinearFit linear_fit(std::span<const double> x, std::span<const double> y);

struct CollapseCurve {
    double delta = 0.0;
    std::vector<double> t;
    std::vector<double> value; // signed or absolute difference; the magnitude is used
    std::vector<double> sem;
};

struct CollapseOptions {
    double x_lo = 1.0;
    double x_hi = 10.0;
    double epsilon = 0.005;
    int points = 200;
    double max_delta = 0.2;
};

struct CollapseReport {
    std::vector<double> x;                         // common log-spaced grid in delta * t
    std::vector<std::vector<double>> curves;       // |difference| interpolated on x
    std::vector<std::vector<double>> sems;
    std::vector<double> onset;                     // first crossing of epsilon; NaN when never reached
    std::vector<std::vector<double>> max_deviation; // pairwise, over x in [x_lo, x_hi]
    std::vector<std::vector<double>> pooled_sem;    // pairwise rms of sqrt(sem_i^2 + sem_j^2) over the same window
};

[[nodiscard]] CollapseReport rescale_collapse(std::span<const CollapseCurve> curves, const CollapseOptions& options = {});

} // namespace mblcoh
