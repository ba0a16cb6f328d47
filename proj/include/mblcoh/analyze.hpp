#pragma once

#include "mblcoh/analysis.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>
#include <vector>

namespace mblcoh {

struct ResultRow {
    std::string measure;
    std::string initial_state;
    std::string boundary;
    int N = 0;
    double J = 0.0;
    double delta = 0.0;
    double dh = 0.0;
    int n = 0;
    double t = 0.0;
    double mean = 0.0;
    double sem = 0.0;
    int realizations = 0;
};

struct ResultSet {
    std::vector<ResultRow> rows;
    nlohmann::json metadata; // null when absent
};

[[nodiscard]] std::vector<ResultRow> parse_results_csv(const std::string& text);
/// Reads results.csv (and metadata.json when present) from a run directory.
[[nodiscard]] ResultSet load_results(const std::filesystem::path& dir);

/// Merges run directories; refuses, listing the differing fields, when their
/// metadata disagree on anything other than the sweep lists.
[[nodiscard]] ResultSet load_compatible(const std::vector<std::filesystem::path>& dirs);

enum class AnalysisKind { slope, saturation, collapse, difference };
[[nodiscard]] AnalysisKind parse_analysis_kind(const std::string& s);

struct AnalyzeOptions {
    double t_min = 10.0;
    double t_max = 0.0;           // 0: last grid time
    double reference_delta = 0.0; // the interaction-free partner of each difference
    double window_fraction = 0.5;
    double long_time_threshold = 10.0;
    bool raw = false;             // slope of the series itself instead of the difference
    CollapseOptions collapse;
    std::vector<std::filesystem::path> against; // difference: subtract this dataset instead
};

/// CSV text of the requested derived table.
[[nodiscard]] std::string analyze(const ResultSet& results, AnalysisKind kind, const AnalyzeOptions& options);

} // namespace mblcoh
