#include "mblcoh/analysis.hpp"

#include "mblcoh/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace mblcoh {

namespace {

void check_same_grid(std::span<const double> a, std::span<const double> b) {
    if(a.size() != b.size() || !std::equal(a.begin(), a.end(), b.begin())) throw ConfigError("difference: time grids do not match");
}

// Linear interpolation in ln t; outside the sampled positive range returns NaN.
double interpolate_log(std::span<const double> x, std::span<const double> y, double at) {
    auto first = std::find_if(x.begin(), x.end(), [](double v) { return v > 0.0; });
    if(first == x.end() || at < *first || at > x.back()) return std::numeric_limits<double>::quiet_NaN();
    auto hi = std::lower_bound(first, x.end(), at);
    const auto j = static_cast<std::size_t>(hi - x.begin());
    if(*hi == at || hi == first) return y[j];
    const double x0 = std::log(x[j - 1]);
    const double x1 = std::log(x[j]);
    const double w = (std::log(at) - x0) / (x1 - x0);
    return (1.0 - w) * y[j - 1] + w * y[j];
}

} // namespace

double long_time_average(std::span<const double> t, std::span<const double> y, double threshold) {
    double s = 0.0;
    std::size_t count = 0;
    for(std::size_t i = 0; i < t.size(); ++i)
        if(t[i] > threshold) {
            s += y[i];
            ++count;
        }
    if(count == 0) throw InsufficientData("no grid points with t > " + std::to_string(threshold) + " for the long-time average");
    return s / static_cast<double>(count);
}

DifferenceSeries interaction_difference(const Series& interacting, const Series& free, int n, DifferenceMode mode, double long_time_threshold) {
    check_same_grid(interacting.t, free.t);
    DifferenceSeries d;
    d.n = n;
    d.mode = mode;
    d.t = interacting.t;
    d.pairing = "matched";
    if(mode == DifferenceMode::rel_ent) {
        d.reference_level = long_time_average(free.t, free.value, long_time_threshold);
        if(d.reference_level == 0.0) throw InsufficientData("rel_ent difference: interaction-free long-time level is zero");
    }
    d.value.resize(d.t.size());
    d.sem.resize(d.t.size());
    for(std::size_t i = 0; i < d.t.size(); ++i) {
        d.value[i] = (interacting.value[i] - free.value[i]) / d.reference_level;
        const double a = i < interacting.sem.size() ? interacting.sem[i] : 0.0;
        const double b = i < free.sem.size() ? free.sem[i] : 0.0;
        d.sem[i] = std::hypot(a, b) / std::abs(d.reference_level);
    }
    return d;
}

DifferenceSeries paired_difference(std::span<const CoherenceSeries> interacting, std::span<const CoherenceSeries> free, Measure measure, int n,
                                   DifferenceMode mode, double long_time_threshold) {
    if(interacting.empty() || interacting.size() != free.size()) throw ConfigError("paired difference needs two equally sized, non-empty ensembles");
    const auto& ref = free.front();
    const std::size_t T = ref.times.size();
    for(std::size_t r = 0; r < interacting.size(); ++r) {
        check_same_grid(interacting[r].times, free[r].times);
        check_same_grid(free[r].times, ref.times);
        if(interacting[r].realization != free[r].realization) throw ConfigError("paired difference: realization indices are not matched");
    }
    const std::size_t mi_a = interacting.front().measure_index(measure), ni_a = interacting.front().n_index(n);
    const std::size_t mi_b = ref.measure_index(measure), ni_b = ref.n_index(n);

    DifferenceSeries d;
    d.n = n;
    d.mode = mode;
    d.t = ref.times;
    d.pairing = "matched";
    if(mode == DifferenceMode::rel_ent) {
        std::vector<double> free_mean(T, 0.0);
        for(const auto& s : free)
            for(std::size_t j = 0; j < T; ++j) free_mean[j] += s.at(mi_b, ni_b, j);
        for(auto& v : free_mean) v /= static_cast<double>(free.size());
        d.reference_level = long_time_average(d.t, free_mean, long_time_threshold);
        if(d.reference_level == 0.0) throw InsufficientData("rel_ent difference: interaction-free long-time level is zero");
    }

    const double R = static_cast<double>(interacting.size());
    d.value.assign(T, 0.0);
    d.sem.assign(T, 0.0);
    for(std::size_t r = 0; r < interacting.size(); ++r)
        for(std::size_t j = 0; j < T; ++j) d.value[j] += interacting[r].at(mi_a, ni_a, j) - free[r].at(mi_b, ni_b, j);
    for(auto& v : d.value) v /= R;
    if(interacting.size() > 1) {
        for(std::size_t r = 0; r < interacting.size(); ++r)
            for(std::size_t j = 0; j < T; ++j) {
                const double x = interacting[r].at(mi_a, ni_a, j) - free[r].at(mi_b, ni_b, j) - d.value[j];
                d.sem[j] += x * x;
            }
        for(auto& v : d.sem) v = std::sqrt(v / (R - 1.0) / R);
    }
    for(std::size_t j = 0; j < T; ++j) {
        d.value[j] /= d.reference_level;
        d.sem[j] /= std::abs(d.reference_level);
    }
    return d;
}

SlopeFit fit_slope(std::span<const double> t, std::span<const double> y, double t_min, double t_max, Abscissa abscissa) {
    if(t.size() != y.size()) throw InvalidDimension("fit_slope: time and value lengths differ");
    std::vector<double> xs, ys;
    for(std::size_t i = 0; i < t.size(); ++i)
        if(t[i] > 0.0 && t[i] >= t_min && t[i] <= t_max) {
            xs.push_back(abscissa == Abscissa::ln ? std::log(t[i]) : std::log10(t[i]));
            ys.push_back(y[i]);
        }
    if(xs.size() < 3)
        throw InsufficientData("fit_slope: " + std::to_string(xs.size()) + " grid points in [" + std::to_string(t_min) + ", " +
                               std::to_string(t_max) + "], need at least 3");
    const double m = static_cast<double>(xs.size());
    double x_mean = 0.0, y_mean = 0.0;
    for(std::size_t i = 0; i < xs.size(); ++i) {
        x_mean += xs[i];
        y_mean += ys[i];
    }
    x_mean /= m;
    y_mean /= m;
    double sxx = 0.0, sxy = 0.0;
    for(std::size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - x_mean) * (xs[i] - x_mean);
        sxy += (xs[i] - x_mean) * (ys[i] - y_mean);
    }
    SlopeFit fit;
    fit.points = xs.size();
    fit.slope = sxy / sxx;
    fit.intercept = y_mean - fit.slope * x_mean;
    double ssr = 0.0;
    for(std::size_t i = 0; i < xs.size(); ++i) {
        const double r = ys[i] - fit.intercept - fit.slope * xs[i];
        ssr += r * r;
    }
    fit.stderr_slope = std::sqrt(ssr / (m - 2.0) / sxx);
    return fit;
}

SlopeFit fit_slope(const DifferenceSeries& diff, double t_min, double t_max, Abscissa abscissa) {
    return fit_slope(diff.t, diff.value, t_min, t_max, abscissa);
}

double saturation_value(std::span<const double> t, std::span<const double> y, double window_fraction) {
    if(t.size() != y.size()) throw InvalidDimension("saturation_value: time and value lengths differ");
    if(!(window_fraction > 0.0 && window_fraction <= 1.0)) throw ConfigError("saturation window fraction must be in (0, 1]");
    const auto first = std::find_if(t.begin(), t.end(), [](double v) { return v > 0.0; });
    if(first == t.end()) throw InsufficientData("saturation_value: no positive grid times");
    const double lo = std::log(*first);
    const double hi = std::log(t.back());
    const double cut = hi - window_fraction * (hi - lo);
    double s = 0.0;
    std::size_t count = 0;
    for(std::size_t i = 0; i < t.size(); ++i)
        if(t[i] > 0.0 && std::log(t[i]) >= cut - 1e-12) {
            s += y[i];
            ++count;
        }
    if(count == 0) throw InsufficientData("saturation_value: averaging window is empty");
    return s / static_cast<double>(count);
}

LinearFit linear_fit(std::span<const double> x, std::span<const double> y) {
    if(x.size() != y.size() || x.size() < 2) throw InsufficientData("linear_fit needs at least two paired points");
    const double m = static_cast<double>(x.size());
    double xm = 0.0, ym = 0.0;
    for(std::size_t i = 0; i < x.size(); ++i) {
        xm += x[i];
        ym += y[i];
    }
    xm /= m;
    ym /= m;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for(std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - xm) * (x[i] - xm);
        sxy += (x[i] - xm) * (y[i] - ym);
        syy += (y[i] - ym) * (y[i] - ym);
    }
    LinearFit f;
    f.slope = sxy / sxx;
    f.intercept = ym - f.slope * xm;
    f.r_squared = syy == 0.0 ? 1.0 : (sxy * sxy) / (sxx * syy);
    return f;
}

CollapseReport rescale_collapse(std::span<const CollapseCurve> curves, const CollapseOptions& options) {
    if(curves.empty()) throw InsufficientData("collapse needs at least one curve");
    if(options.points < 2 || !(options.x_lo > 0.0) || !(options.x_hi > options.x_lo)) throw ConfigError("collapse: invalid x window or point count");

    // Rescaled abscissae x = delta * t over positive times.
    std::vector<std::vector<double>> xs(curves.size()), ys(curves.size()), ss(curves.size());
    double common_lo = 0.0, common_hi = std::numeric_limits<double>::infinity();
    for(std::size_t c = 0; c < curves.size(); ++c) {
        const auto& curve = curves[c];
        if(!(curve.delta > 0.0 && curve.delta <= options.max_delta))
            throw ConfigError("collapse: interaction " + std::to_string(curve.delta) + " outside (0, " + std::to_string(options.max_delta) + "]");
        if(curve.t.size() != curve.value.size()) throw InvalidDimension("collapse: time and value lengths differ");
        for(std::size_t i = 0; i < curve.t.size(); ++i) {
            if(!(curve.t[i] > 0.0)) continue;
            xs[c].push_back(curve.delta * curve.t[i]);
            ys[c].push_back(std::abs(curve.value[i]));
            ss[c].push_back(i < curve.sem.size() ? curve.sem[i] : 0.0);
        }
        if(xs[c].size() < 2) throw InsufficientData("collapse: curve has fewer than two positive times");
        common_lo = std::max(common_lo, xs[c].front());
        common_hi = std::min(common_hi, xs[c].back());
    }
    if(!(common_hi > common_lo)) throw InsufficientData("collapse: rescaled time ranges do not overlap");

    CollapseReport report;
    const int P = options.points;
    report.x.resize(static_cast<std::size_t>(P));
    for(int i = 0; i < P; ++i)
        report.x[static_cast<std::size_t>(i)] =
            i == P - 1 ? common_hi : std::exp(std::log(common_lo) + (std::log(common_hi) - std::log(common_lo)) * i / (P - 1));
    for(std::size_t c = 0; c < curves.size(); ++c) {
        std::vector<double> f(report.x.size()), s(report.x.size());
        for(std::size_t i = 0; i < report.x.size(); ++i) {
            f[i] = interpolate_log(xs[c], ys[c], report.x[i]);
            s[i] = interpolate_log(xs[c], ss[c], report.x[i]);
        }
        report.curves.push_back(std::move(f));
        report.sems.push_back(std::move(s));

        double onset = std::numeric_limits<double>::quiet_NaN();
        for(std::size_t i = 0; i < xs[c].size(); ++i)
            if(ys[c][i] > options.epsilon) {
                if(i == 0) {
                    onset = xs[c][0];
                } else {
                    const double l0 = std::log(xs[c][i - 1]), l1 = std::log(xs[c][i]);
                    const double w = (options.epsilon - ys[c][i - 1]) / (ys[c][i] - ys[c][i - 1]);
                    onset = std::exp(l0 + w * (l1 - l0));
                }
                break;
            }
        report.onset.push_back(onset);
    }

    const double lo = std::max(options.x_lo, common_lo);
    const double hi = std::min(options.x_hi, common_hi);
    std::vector<std::size_t> window;
    for(std::size_t i = 0; i < report.x.size(); ++i)
        if(report.x[i] >= lo && report.x[i] <= hi) window.push_back(i);
    if(window.empty()) throw InsufficientData("collapse: no common x samples inside the comparison window");

    const std::size_t C = curves.size();
    report.max_deviation.assign(C, std::vector<double>(C, 0.0));
    report.pooled_sem.assign(C, std::vector<double>(C, 0.0));
    for(std::size_t a = 0; a < C; ++a)
        for(std::size_t b = 0; b < C; ++b) {
            double dev = 0.0, var = 0.0;
            for(std::size_t i : window) {
                dev = std::max(dev, std::abs(report.curves[a][i] - report.curves[b][i]));
                var += report.sems[a][i] * report.sems[a][i] + report.sems[b][i] * report.sems[b][i];
            }
            report.max_deviation[a][b] = dev;
            report.pooled_sem[a][b] = std::sqrt(var / static_cast<double>(window.size()));
        }
    return report;
}

} // namespace mblcoh
