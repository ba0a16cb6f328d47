#include "mblcoh/analyze.hpp"
#include "mblcoh/config.hpp"
#include "mblcoh/errors.hpp"
#include "mblcoh/runner.hpp"

#include <doctest.h>

#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

using namespace mblcoh;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const auto dir = fs::temp_directory_path() / ("mblcoh_runner_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::size_t count_lines(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

ExperimentConfig smoke() {
    return parse_config_text(R"(
N = 6
delta = [0.0, 1.0]
dh = [6.0]
R = 4
seed = 3
n_list = [1, 2, "N"]
measures = ["l1", "rel_ent"]
t_points = 30
)");
}

} // namespace

TEST_CASE("parallel_for visits every index once") {
    for(int workers : {1, 3, 8}) {
        std::vector<std::atomic<int>> hits(101);
        parallel_for(hits.size(), workers, [&](std::size_t i) { hits[i].fetch_add(1); });
        for(auto& h : hits) CHECK(h.load() == 1);
    }
}

TEST_CASE("csv row count and layout") {
    const auto c = smoke();
    const auto results = execute(c, 2);
    const auto csv = format_results_csv(results);
    // measures x |n_list| x |grid| x sweep points, plus the header
    CHECK(count_lines(csv) == 2 * 3 * 31 * 2 + 1);
    CHECK(csv.rfind("measure,initial_state,boundary,N,J,delta,dh,n,t,mean,sem,realizations\n", 0) == 0);
    const auto rows = parse_results_csv(csv);
    CHECK(rows.size() == 2 * 3 * 31 * 2);
    CHECK(rows.front().measure == "l1");
    CHECK(rows.front().initial_state == "neel");
    CHECK(rows.front().realizations == 4);
    CHECK(results.ensemble(6, 6.0, 1.0).realizations == 4);
    CHECK(results.series(6, 6.0, 0.0).size() == 4);
    CHECK_THROWS_AS((void)results.ensemble(8, 6.0, 1.0), NotFound);
}

TEST_CASE("output is independent of the worker count") {
    const auto c = smoke();
    const auto one = format_results_csv(execute(c, 1));
    const auto eight = format_results_csv(execute(c, 8));
    CHECK(one == eight);
}

TEST_CASE("reals round-trip through the csv") {
    for(double v : {0.1, 1.0 / 3.0, 1e-300, 123456.789, std::nextafter(1.0, 2.0)}) CHECK(std::stod(format_real(v)) == v);
}

TEST_CASE("run writes results and metadata") {
    const auto dir = scratch("run");
    const auto manifest = run(smoke(), dir, 2);
    CHECK(fs::exists(dir / "results.csv"));
    CHECK(fs::exists(dir / "metadata.json"));
    CHECK(manifest.failures.empty());
    const auto meta = nlohmann::json::parse(slurp(dir / "metadata.json"));
    CHECK(meta.at("master_seed") == 3);
    CHECK(meta.at("log_base") == "e");
    CHECK(meta.at("pairing") == "matched");
    CHECK(meta.at("boundary") == "open");
    CHECK(meta.at("code_version") == code_version());
    CHECK(meta.at("grid").at("points") == 30);
    CHECK(meta.at("config").at("R") == 4);
    CHECK(meta.at("failed").empty());
    // The echoed config reproduces the same bytes.
    const auto again = scratch("run_again");
    (void)run(config_from_json(meta.at("config")), again, 1);
    CHECK(slurp(dir / "results.csv") == slurp(again / "results.csv"));
    fs::remove_all(dir);
    fs::remove_all(again);
}

TEST_CASE("failures are listed in the manifest") {
    RunManifest m;
    m.config = config_to_json(smoke());
    m.failures.push_back({SweepPoint{6, 6.0, 1.0}, 2, "boom"});
    const auto j = m.to_json();
    REQUIRE(j.at("failed").size() == 1);
    CHECK(j.at("failed")[0].at("realization") == 2);
    CHECK(j.at("failed")[0].at("error") == "boom");
}

TEST_CASE("analysis of a dataset with itself is zero") {
    const auto dir = scratch("self");
    (void)run(smoke(), dir, 1);
    AnalyzeOptions o;
    o.against = {dir};
    const auto table = analyze(load_results(dir), AnalysisKind::difference, o);
    const auto lines = count_lines(table);
    CHECK(lines == 2 * 3 * 31 * 2 + 1);
    std::istringstream in(table);
    std::string line;
    std::getline(in, line);
    while(std::getline(in, line)) {
        const auto fields = line.substr(0, line.rfind(','));
        CHECK(fields.substr(fields.rfind(',') + 1) == "0");
    }
    fs::remove_all(dir);
}

TEST_CASE("slope analysis recovers a synthetic line") {
    const auto dir = scratch("line");
    std::string csv = "measure,initial_state,boundary,N,J,delta,dh,n,t,mean,sem,realizations\n";
    for(double delta : {0.0, 1.0})
        for(int i = 0; i <= 40; ++i) {
            const double t = i == 0 ? 0.0 : std::exp(std::log(0.05) + std::log(20000.0) * (i - 1) / 39.0);
            const double y = t > 0.0 ? 0.1 + delta * 0.05 * std::log(t) : 0.1;
            csv += "l1,neel,open,8,1," + format_real(delta) + ",10,2," + format_real(t) + "," + format_real(y) + ",0.001,5\n";
        }
    std::ofstream(dir / "results.csv") << csv;
    AnalyzeOptions o;
    const auto table = analyze(load_results(dir), AnalysisKind::slope, o);
    std::istringstream in(table);
    std::string header, row;
    std::getline(in, header);
    std::getline(in, row);
    CHECK(header.rfind("measure,initial_state,boundary,N,J,delta,dh,n,chi,chi_stderr", 0) == 0);
    // chi is the ninth column
    std::vector<std::string> cells;
    std::stringstream rs(row);
    for(std::string c; std::getline(rs, c, ',');) cells.push_back(c);
    REQUIRE(cells.size() >= 10);
    CHECK(std::abs(std::stod(cells[8]) - 0.05) < 1e-12);
    o.raw = true;
    const auto raw = analyze(load_results(dir), AnalysisKind::slope, o);
    CHECK(count_lines(raw) == 3);
    fs::remove_all(dir);
}

TEST_CASE("saturation decreases with N on a small Fig. 5-style sweep") {
    const auto c = parse_config_text(R"(
N = [6, 8, 10]
delta = 1.0
dh = 6.0
R = 20
seed = 1
n_list = ["N"]
)");
    const auto dir = scratch("saturation");
    (void)run(c, dir, 1);
    const auto table = analyze(load_results(dir), AnalysisKind::saturation, AnalyzeOptions{});
    std::istringstream in(table);
    std::string line;
    std::getline(in, line);
    std::vector<double> sat;
    while(std::getline(in, line)) {
        std::vector<std::string> cells;
        std::stringstream rs(line);
        for(std::string x; std::getline(rs, x, ',');) cells.push_back(x);
        sat.push_back(std::stod(cells[9]));
    }
    REQUIRE(sat.size() == 3);
    CHECK(sat[0] > sat[1]);
    CHECK(sat[1] > sat[2]);
    fs::remove_all(dir);
}

TEST_CASE("mismatched configurations are refused with a field diff") {
    auto a = smoke();
    auto b = smoke();
    b.boundary = Boundary::periodic;
    b.master_seed = 4;
    const auto da = scratch("mismatch_a");
    const auto db = scratch("mismatch_b");
    (void)run(a, da, 1);
    (void)run(b, db, 1);
    try {
        (void)load_compatible({da, db});
        FAIL("expected a configuration mismatch");
    } catch(const ConfigError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("boundary: \"open\"") != std::string::npos);
        CHECK(msg.find("\"periodic\"") != std::string::npos);
        CHECK(msg.find("seed: 3") != std::string::npos);
    }
    CHECK_THROWS_AS((void)parse_analysis_kind("variance"), ConfigError);
    CHECK_THROWS_AS((void)load_results(da / "nothing"), ConfigError);
    fs::remove_all(da);
    fs::remove_all(db);
}

TEST_CASE("malformed results files") {
    CHECK_THROWS_AS((void)parse_results_csv("t,mean\n"), ConfigError);
    CHECK_THROWS_AS((void)parse_results_csv("measure,initial_state,boundary,N,J,delta,dh,n,t,mean,sem,realizations\nl1,neel\n"), ConfigError);
    CHECK_THROWS_AS((void)parse_results_csv("measure,initial_state,boundary,N,J,delta,dh,n,t,mean,sem,realizations\nl1,neel,open,x,1,0,0,2,0,0,0,1\n"),
                    ConfigError);
}
