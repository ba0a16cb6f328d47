#include "mblcoh/analyze.hpp"
#include "mblcoh/config.hpp"
#include "mblcoh/errors.hpp"
#include "mblcoh/runner.hpp"
#include "mblcoh/selftest.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>

namespace {

constexpr int kConfigError = 2;
constexpr int kSelftestFailure = 3;
constexpr int kPartialFailure = 4;

int do_run(const std::string& config_path, const std::string& out, int workers, std::optional<std::uint64_t> seed,
           const std::string& boundary) {
    auto config = mblcoh::parse_config(config_path);
    if(seed) config.master_seed = *seed;
    if(!boundary.empty()) config.boundary = mblcoh::parse_boundary(boundary);
    config.validate();
    const auto manifest = mblcoh::run(config, out, workers);
    for(const auto& f : manifest.failures)
        std::cerr << "failed: N=" << f.point.N << " dh=" << f.point.dh << " delta=" << f.point.delta << " r=" << f.realization << ": " << f.message
                  << '\n';
    std::cout << "wrote " << (std::filesystem::path(out) / "results.csv").string() << '\n';
    return manifest.failures.empty() ? 0 : kPartialFailure;
}

int do_analyze(const std::vector<std::string>& dirs, const std::string& kind, const std::string& out, mblcoh::AnalyzeOptions options) {
    std::vector<std::filesystem::path> paths(dirs.begin(), dirs.end());
    const auto table = mblcoh::analyze(mblcoh::load_compatible(paths), mblcoh::parse_analysis_kind(kind), options);
    if(out.empty()) {
        std::cout << table;
    } else {
        std::ofstream f(out, std::ios::binary);
        if(!f) throw mblcoh::ConfigError("cannot write " + out);
        f << table;
    }
    return 0;
}

int do_selftest() {
    const auto report = mblcoh::selftest();
    for(const auto& p : report.properties)
        std::cout << (p.passed ? "PASS " : "FAIL ") << p.name << (p.detail.empty() ? "" : "  " + p.detail) << '\n';
    return report.passed() ? 0 : kSelftestFailure;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Coherence dynamics of disordered interacting fermion chains"};
    app.require_subcommand(1);

    auto* run = app.add_subcommand("run", "Execute a sweep and write results.csv and metadata.json");
    std::string config_path, out_dir = "results", boundary;
    int workers = 1;
    std::optional<std::uint64_t> seed;
    run->add_option("--config", config_path, "Run configuration file")->required()->check(CLI::ExistingFile);
    run->add_option("--out", out_dir, "Output directory");
    run->add_option("--workers", workers, "Worker threads")->check(CLI::PositiveNumber);
    run->add_option("--seed", seed, "Master seed (overrides the file)");
    run->add_option("--boundary", boundary, "open or periodic (overrides the file)");

    auto* an = app.add_subcommand("analyze", "Derive a table from one or more results directories");
    std::vector<std::string> dirs;
    std::string kind, an_out;
    mblcoh::AnalyzeOptions options;
    std::vector<std::string> against;
    an->add_option("results", dirs, "Results directories")->required();
    an->add_option("--analysis", kind, "slope | saturation | collapse | difference")->required();
    an->add_option("--out", an_out, "Output CSV (stdout when omitted)");
    an->add_option("--t-min", options.t_min, "Slope fit lower time");
    an->add_option("--t-max", options.t_max, "Slope fit upper time (default: last grid time)");
    an->add_option("--reference-delta", options.reference_delta, "Interaction strength subtracted in differences");
    an->add_option("--window-fraction", options.window_fraction, "Saturation window, fraction of the log-time range");
    an->add_option("--against", against, "Difference against another results directory");
    an->add_flag("--raw", options.raw, "Slope of the series itself rather than the difference");

    app.add_subcommand("selftest", "Brute-force oracle checks at N <= 6");

    try {
        app.parse(argc, argv);
    } catch(const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : kConfigError;
    }

    try {
        if(run->parsed()) return do_run(config_path, out_dir, workers, seed, boundary);
        if(an->parsed()) {
            options.against.assign(against.begin(), against.end());
            return do_analyze(dirs, kind, an_out, options);
        }
        return do_selftest();
    } catch(const mblcoh::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfigError;
    } catch(const mblcoh::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kConfigError;
    } catch(const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
