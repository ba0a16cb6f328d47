#include "mblcoh/analyze.hpp"

#include "mblcoh/errors.hpp"
#include "mblcoh/runner.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <tuple>

namespace mblcoh {

namespace {

// Everything identifying a curve except the interaction strength.
struct CurveKey {
    std::string measure, initial_state, boundary;
    int N;
    double J, dh;
    int n;
    auto tie() const { return std::tie(measure, initial_state, boundary, N, J, dh, n); }
    bool operator<(const CurveKey& o) const { return tie() < o.tie(); }
};

struct Curve {
    std::vector<double> t, mean, sem;
};

using CurveMap = std::map<CurveKey, std::map<double, Curve>>; // key -> delta -> curve

CurveMap group(const std::vector<ResultRow>& rows) {
    CurveMap out;
    for(const auto& r : rows) {
        auto& c = out[CurveKey{r.measure, r.initial_state, r.boundary, r.N, r.J, r.dh, r.n}][r.delta];
        if(!c.t.empty() && !(r.t > c.t.back())) throw ConfigError("results rows are not in ascending time order within a curve");
        c.t.push_back(r.t);
        c.mean.push_back(r.mean);
        c.sem.push_back(r.sem);
    }
    return out;
}

Series as_series(const Curve& c) { return Series{c.t, c.mean, c.sem}; }

DifferenceMode mode_for(const std::string& measure) { return measure == "rel_ent" ? DifferenceMode::rel_ent : DifferenceMode::l1; }

std::string key_prefix(const CurveKey& k, double delta) {
    return k.measure + "," + k.initial_state + "," + k.boundary + "," + std::to_string(k.N) + "," + format_real(k.J) + "," + format_real(delta) + "," +
           format_real(k.dh) + "," + std::to_string(k.n);
}

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string cell;
    while(std::getline(ss, cell, ',')) out.push_back(cell);
    return out;
}

const std::string kHeader = "measure,initial_state,boundary,N,J,delta,dh,n,t,mean,sem,realizations";

std::string difference_table(const ResultSet& results, const AnalyzeOptions& o) {
    std::string out = "measure,initial_state,boundary,N,J,delta,dh,n,t,value,sem\n";
    const CurveMap curves = group(results.rows);
    if(!o.against.empty()) {
        const CurveMap other = group(load_compatible(o.against).rows);
        for(const auto& [key, by_delta] : curves)
            for(const auto& [delta, c] : by_delta) {
                const auto k = other.find(key);
                if(k == other.end() || !k->second.count(delta)) continue;
                const auto d = interaction_difference(as_series(c), as_series(k->second.at(delta)), key.n, DifferenceMode::l1);
                for(std::size_t i = 0; i < d.t.size(); ++i)
                    out += key_prefix(key, delta) + "," + format_real(d.t[i]) + "," + format_real(d.value[i]) + "," + format_real(d.sem[i]) + "\n";
            }
        return out;
    }
    for(const auto& [key, by_delta] : curves) {
        const auto ref = by_delta.find(o.reference_delta);
        if(ref == by_delta.end()) continue;
        for(const auto& [delta, c] : by_delta) {
            if(delta == o.reference_delta) continue;
            DifferenceSeries d;
            try {
                d = interaction_difference(as_series(c), as_series(ref->second), key.n, mode_for(key.measure), o.long_time_threshold);
            } catch(const InsufficientData&) {
                continue; // rel_ent of a curve that never leaves zero, e.g. n = 1 from a product state
            }
            for(std::size_t i = 0; i < d.t.size(); ++i)
                out += key_prefix(key, delta) + "," + format_real(d.t[i]) + "," + format_real(d.value[i]) + "," + format_real(d.sem[i]) + "\n";
        }
    }
    return out;
}

std::string slope_table(const ResultSet& results, const AnalyzeOptions& o) {
    std::string out = "measure,initial_state,boundary,N,J,delta,dh,n,chi,chi_stderr,points,t_min,t_max\n";
    for(const auto& [key, by_delta] : group(results.rows)) {
        const auto ref = by_delta.find(o.reference_delta);
        for(const auto& [delta, c] : by_delta) {
            const double t_max = o.t_max > 0.0 ? o.t_max : c.t.back();
            if(!o.raw && (ref == by_delta.end() || delta == o.reference_delta)) continue;
            SlopeFit fit;
            try {
                fit = o.raw ? fit_slope(c.t, c.mean, o.t_min, t_max)
                            : fit_slope(interaction_difference(as_series(c), as_series(ref->second), key.n, mode_for(key.measure),
                                                               o.long_time_threshold),
                                        o.t_min, t_max);
            } catch(const InsufficientData&) {
                continue;
            }
            out += key_prefix(key, delta) + "," + format_real(fit.slope) + "," + format_real(fit.stderr_slope) + "," + std::to_string(fit.points) +
                   "," + format_real(o.t_min) + "," + format_real(t_max) + "\n";
        }
    }
    return out;
}

std::string saturation_table(const ResultSet& results, const AnalyzeOptions& o) {
    // Group across N: the subsystem label is "total" for n = N, else n itself.
    struct SatKey {
        std::string measure, initial_state, boundary;
        double J, delta, dh;
        std::string subsystem;
        auto tie() const { return std::tie(measure, initial_state, boundary, J, delta, dh, subsystem); }
        bool operator<(const SatKey& x) const { return tie() < x.tie(); }
    };
    std::map<SatKey, std::map<int, std::pair<int, double>>> sat; // -> N -> (n, value)
    for(const auto& [key, by_delta] : group(results.rows))
        for(const auto& [delta, c] : by_delta) {
            const std::string label = key.n == key.N ? "total" : std::to_string(key.n);
            sat[SatKey{key.measure, key.initial_state, key.boundary, key.J, delta, key.dh, label}][key.N] = {key.n,
                                                                                                              saturation_value(c.t, c.mean, o.window_fraction)};
        }
    std::string out = "measure,initial_state,boundary,J,delta,dh,subsystem,N,n,saturation,inv_N_slope,inv_N_intercept,inv_N_r2\n";
    for(const auto& [key, by_N] : sat) {
        std::vector<double> x, y;
        for(const auto& [N, v] : by_N) {
            x.push_back(1.0 / N);
            y.push_back(v.second);
        }
        LinearFit fit{std::nan(""), std::nan(""), std::nan("")};
        if(x.size() >= 2) fit = linear_fit(x, y);
        for(const auto& [N, v] : by_N)
            out += key.measure + "," + key.initial_state + "," + key.boundary + "," + format_real(key.J) + "," + format_real(key.delta) + "," +
                   format_real(key.dh) + "," + key.subsystem + "," + std::to_string(N) + "," + std::to_string(v.first) + "," + format_real(v.second) +
                   "," + format_real(fit.slope) + "," + format_real(fit.intercept) + "," + format_real(fit.r_squared) + "\n";
    }
    return out;
}

std::string collapse_table(const ResultSet& results, const AnalyzeOptions& o) {
    std::string out = "measure,initial_state,boundary,N,J,delta,dh,n,onset_x,max_deviation,pooled_sem\n";
    for(const auto& [key, by_delta] : group(results.rows)) {
        const auto ref = by_delta.find(o.reference_delta);
        if(ref == by_delta.end()) continue;
        std::vector<CollapseCurve> curves;
        for(const auto& [delta, c] : by_delta) {
            if(delta == o.reference_delta || !(delta > 0.0 && delta <= o.collapse.max_delta)) continue;
            const auto d = interaction_difference(as_series(c), as_series(ref->second), key.n, DifferenceMode::l1);
            curves.push_back({delta, d.t, d.value, d.sem});
        }
        if(curves.empty()) continue;
        const auto report = rescale_collapse(curves, o.collapse);
        for(std::size_t a = 0; a < curves.size(); ++a) {
            double dev = 0.0, pooled = 0.0;
            for(std::size_t b = 0; b < curves.size(); ++b)
                if(report.max_deviation[a][b] >= dev) {
                    dev = report.max_deviation[a][b];
                    pooled = report.pooled_sem[a][b];
                }
            out += key_prefix(key, curves[a].delta) + "," + format_real(report.onset[a]) + "," + format_real(dev) + "," + format_real(pooled) + "\n";
        }
    }
    return out;
}

} // namespace

std::vector<ResultRow> parse_results_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if(!std::getline(in, line) || line != kHeader) throw ConfigError("results CSV header does not match the expected column order");
    std::vector<ResultRow> rows;
    int line_no = 1;
    while(std::getline(in, line)) {
        ++line_no;
        if(line.empty()) continue;
        const auto c = split(line);
        if(c.size() != 12) throw ConfigError("results CSV line " + std::to_string(line_no) + " has " + std::to_string(c.size()) + " columns");
        try {
            rows.push_back(ResultRow{c[0], c[1], c[2], std::stoi(c[3]), std::stod(c[4]), std::stod(c[5]), std::stod(c[6]), std::stoi(c[7]),
                                     std::stod(c[8]), std::stod(c[9]), std::stod(c[10]), std::stoi(c[11])});
        } catch(const std::logic_error&) {
            throw ConfigError("results CSV line " + std::to_string(line_no) + " has a malformed number");
        }
    }
    return rows;
}

ResultSet load_results(const std::filesystem::path& dir) {
    const auto csv = dir / "results.csv";
    std::ifstream in(csv, std::ios::binary);
    if(!in) throw ConfigError("no results.csv in " + dir.string());
    std::stringstream ss;
    ss << in.rdbuf();
    ResultSet set;
    set.rows = parse_results_csv(ss.str());
    const auto meta = dir / "metadata.json";
    if(std::filesystem::exists(meta)) {
        std::ifstream m(meta);
        try {
            set.metadata = nlohmann::json::parse(m);
        } catch(const nlohmann::json::exception& e) {
            throw ConfigError("metadata.json in " + dir.string() + " is malformed: " + e.what());
        }
    }
    return set;
}

ResultSet load_compatible(const std::vector<std::filesystem::path>& dirs) {
    if(dirs.empty()) throw ConfigError("no results directories given");
    ResultSet merged = load_results(dirs.front());
    static const std::vector<std::string> fields{"J", "boundary", "initial", "log_base", "seed", "t_min", "t_max", "t_points", "include_t0", "engine"};
    for(std::size_t i = 1; i < dirs.size(); ++i) {
        ResultSet next = load_results(dirs[i]);
        if(!merged.metadata.is_null() && !next.metadata.is_null()) {
            std::string diff;
            const auto& a = merged.metadata.at("config");
            const auto& b = next.metadata.at("config");
            for(const auto& f : fields)
                if(a.value(f, nlohmann::json()) != b.value(f, nlohmann::json()))
                    diff += "\n  " + f + ": " + a.value(f, nlohmann::json()).dump() + " (" + dirs.front().string() + ") vs " +
                            b.value(f, nlohmann::json()).dump() + " (" + dirs[i].string() + ")";
            if(!diff.empty()) throw ConfigError("results directories have incompatible configurations:" + diff);
        }
        merged.rows.insert(merged.rows.end(), next.rows.begin(), next.rows.end());
    }
    return merged;
}

AnalysisKind parse_analysis_kind(const std::string& s) {
    if(s == "slope") return AnalysisKind::slope;
    if(s == "saturation") return AnalysisKind::saturation;
    if(s == "collapse") return AnalysisKind::collapse;
    if(s == "difference") return AnalysisKind::difference;
    throw ConfigError("analysis must be one of slope, saturation, collapse, difference; got \"" + s + "\"");
}

std::string analyze(const ResultSet& results, AnalysisKind kind, const AnalyzeOptions& options) {
    switch(kind) {
    case AnalysisKind::slope: return slope_table(results, options);
    case AnalysisKind::saturation: return saturation_table(results, options);
    case AnalysisKind::collapse: return collapse_table(results, options);
    case AnalysisKind::difference: return difference_table(results, options);
    }
    return {};
}

} // namespace mblcoh
