#include "brute_force.hpp"
#include "mblcoh/errors.hpp"
#include "mblcoh/experiment.hpp"
#include "mblcoh/fock_basis.hpp"
#include "mblcoh/reduced_density.hpp"

#include <doctest.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <vector>

using namespace mblcoh;

namespace {

// Splits a dense 2^N vector into sector amplitudes, keeping only `sectors`.
PureState from_full(const Eigen::VectorXcd& full, int N, const std::vector<int>& sectors) {
    PureState s;
    s.N = N;
    for(int k : sectors) {
        const auto basis = enumerate_sector(N, k);
        Eigen::VectorXcd v(static_cast<Eigen::Index>(basis.size()));
        for(std::size_t i = 0; i < basis.size(); ++i) v[static_cast<Eigen::Index>(i)] = full[basis[i].bits()];
        s.sectors[k] = v;
    }
    const double norm = std::sqrt(s.norm_squared());
    for(auto& [k, v] : s.sectors) v /= norm;
    return s;
}

PureState random_state(int N, const std::vector<int>& sectors, unsigned seed) {
    std::srand(seed);
    return from_full(Eigen::VectorXcd::Random(Eigen::Index{1} << N), N, sectors);
}

std::vector<int> all_sectors(int N) {
    std::vector<int> v(N + 1);
    for(int k = 0; k <= N; ++k) v[k] = k;
    return v;
}

// Reduced density matrix of an arbitrary set of kept sites (1-based, ascending),
// by summation over every pair of full configurations agreeing outside the set.
Eigen::MatrixXcd keep_sites(const Eigen::VectorXcd& psi, int N, const std::vector<int>& keep) {
    const int n = static_cast<int>(keep.size());
    std::uint32_t mask = 0;
    for(int s : keep) mask |= 1U << (s - 1);
    auto local = [&](std::uint32_t c) {
        std::uint32_t a = 0;
        for(int i = 0; i < n; ++i) a |= ((c >> (keep[i] - 1)) & 1U) << i;
        return a;
    };
    Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(Eigen::Index{1} << n, Eigen::Index{1} << n);
    const std::uint32_t dim = 1U << N;
    for(std::uint32_t x = 0; x < dim; ++x)
        for(std::uint32_t y = 0; y < dim; ++y)
            if((x & ~mask) == (y & ~mask)) rho(local(x), local(y)) += psi[x] * std::conj(psi[y]);
    return rho;
}

void check_density_axioms(const Eigen::MatrixXcd& rho) {
    CHECK((rho - rho.adjoint()).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(std::abs(rho.trace() - Complex(1.0, 0.0)) < 1e-12);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho, Eigen::EigenvaluesOnly);
    CHECK(es.eigenvalues().minCoeff() >= -1e-10);
}

Eigen::VectorXd sorted_nonzero(Eigen::VectorXd v, double floor = 1e-12) {
    std::vector<double> out;
    for(double x : v)
        if(x > floor) out.push_back(x);
    std::sort(out.begin(), out.end());
    return Eigen::Map<Eigen::VectorXd>(out.data(), static_cast<Eigen::Index>(out.size()));
}

} // namespace

TEST_CASE("whole chain gives the projector") {
    const auto psi = random_state(5, all_sectors(5), 1);
    const auto rho = reduce(psi, 1, 5).dense();
    const auto full = psi.to_full();
    CHECK((rho - full * full.adjoint()).cwiseAbs().maxCoeff() < 1e-14);
    check_density_axioms(rho);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho, Eigen::EigenvaluesOnly);
    CHECK(es.eigenvalues().maxCoeff() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(sorted_nonzero(es.eigenvalues(), 1e-10).size() == 1);
}

TEST_CASE("basis state windows are diagonal with a single 1") {
    const int N = 8;
    const auto psi = build_initial_state(InitialStateKind::neel, N); // 10101010, site 1 first
    for(int n = 1; n <= N; ++n)
        for(int start = 1; start + n - 1 <= N; ++start) {
            const auto rho = reduce(psi, start, n).dense();
            std::uint32_t a = 0;
            for(int i = 0; i < n; ++i)
                if((start + i) % 2 == 1) a |= 1U << i;
            Eigen::MatrixXcd expected = Eigen::MatrixXcd::Zero(rho.rows(), rho.cols());
            expected(a, a) = 1.0;
            CHECK((rho - expected).cwiseAbs().maxCoeff() < 1e-15);
        }
}

TEST_CASE("maximally entangled pair") {
    PureState psi;
    psi.N = 2;
    psi.sectors[1] = Eigen::VectorXcd::Constant(2, 1.0 / std::sqrt(2.0));
    const auto rho = reduce(psi, 1, 1).dense();
    CHECK((rho - 0.5 * Eigen::MatrixXcd::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("matches explicit index summation up to six sites") {
    for(int N = 2; N <= 6; ++N)
        for(const auto& sectors : {all_sectors(N), std::vector<int>{N / 2}, std::vector<int>{0, N / 2 + 1}}) {
            const auto psi = random_state(N, sectors, static_cast<unsigned>(N * 10 + sectors.size()));
            const auto full = psi.to_full();
            for(int n = 1; n <= N; ++n)
                for(int start = 1; start + n - 1 <= N; ++start) {
                    const auto rho = reduce(psi, start, n).dense();
                    CHECK((rho - reference::reduced_density(full, N, start, n)).cwiseAbs().maxCoeff() < 1e-13);
                    check_density_axioms(rho);
                }
        }
}

TEST_CASE("tracing out the last site gives the shorter window") {
    for(int N : {4, 7, 10}) {
        const auto psi = random_state(N, N <= 7 ? all_sectors(N) : std::vector<int>{5}, static_cast<unsigned>(N));
        for(int n = 2; n <= N; ++n)
            for(int start = 1; start + n - 1 <= N; ++start) {
                const auto big = reduce(psi, start, n).dense();
                const auto small = reduce(psi, start, n - 1).dense();
                CHECK((trace_out_last_site(big, n) - small).cwiseAbs().maxCoeff() < 1e-12);
            }
    }
}

TEST_CASE("window and complement share their nonzero spectrum") {
    for(int N : {4, 6, 8}) {
        const auto psi = random_state(N, all_sectors(N), static_cast<unsigned>(100 + N));
        const auto full = psi.to_full();
        for(int n = 1; n < N; ++n)
            for(int start = 1; start + n - 1 <= N; ++start) {
                std::vector<int> rest;
                for(int s = 1; s <= N; ++s)
                    if(s < start || s > start + n - 1) rest.push_back(s);
                Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> a(reduce(psi, start, n).dense(), Eigen::EigenvaluesOnly);
                Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> b(keep_sites(full, N, rest), Eigen::EigenvaluesOnly);
                const auto ea = sorted_nonzero(a.eigenvalues(), 1e-10);
                const auto eb = sorted_nonzero(b.eigenvalues(), 1e-10);
                REQUIRE(ea.size() == eb.size());
                CHECK((ea - eb).cwiseAbs().maxCoeff() < 1e-10);
            }
    }
}

TEST_CASE("single-sector states give block-diagonal windows") {
    const auto psi = random_state(8, {4}, 5);
    for(int n = 1; n < 8; ++n) {
        const auto rho = reduce(psi, 2, std::min(n, 7));
        CHECK(rho.block_diagonal());
        const auto dense = rho.dense();
        for(std::uint32_t a = 0; a < dense.rows(); ++a)
            for(std::uint32_t b = 0; b < dense.cols(); ++b)
                if(std::popcount(a) != std::popcount(b)) CHECK(dense(a, b) == Complex(0.0, 0.0));
    }
    CHECK_FALSE(reduce(random_state(4, all_sectors(4), 6), 1, 2).block_diagonal());
}

TEST_CASE("spectrum and populations from the amplitude blocks") {
    for(const auto& sectors : {std::vector<int>{5}, all_sectors(10)}) {
        const auto psi = random_state(10, sectors, 9);
        for(int n : {1, 3, 5, 8}) {
            const WindowPlan plan(10, psi.sector_keys(), 2, n);
            const WindowAmplitudes amps(psi, plan);
            const auto dense = reduce(amps).dense();
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(dense, Eigen::EigenvaluesOnly);
            const auto expected = sorted_nonzero(es.eigenvalues());
            const auto got = sorted_nonzero(window_spectrum(amps));
            REQUIRE(got.size() == expected.size());
            CHECK((got - expected).cwiseAbs().maxCoeff() < 1e-12);
            CHECK((window_populations(amps) - dense.diagonal().real()).cwiseAbs().maxCoeff() < 1e-14);
        }
    }
}

TEST_CASE("window element access") {
    const auto psi = random_state(5, all_sectors(5), 12);
    const auto rho = reduce(psi, 2, 3);
    const auto dense = rho.dense();
    for(std::uint32_t a = 0; a < 8; ++a)
        for(std::uint32_t b = 0; b < 8; ++b) CHECK(rho(a, b) == dense(a, b));
    CHECK((rho.diagonal() - dense.diagonal().real()).norm() == 0.0);
    CHECK(rho.dimension() == 8);
    CHECK(rho.start() == 2);
    CHECK(rho.size() == 3);
}

TEST_CASE("windows outside the chain are rejected") {
    const auto psi = random_state(4, all_sectors(4), 1);
    CHECK_THROWS_AS((void)reduce(psi, 0, 2), InvalidWindow);
    CHECK_THROWS_AS((void)reduce(psi, 3, 3), InvalidWindow);
    CHECK_THROWS_AS((void)reduce(psi, 1, 0), InvalidWindow);
    CHECK_THROWS_AS((void)reduce(psi, 1, 5), InvalidWindow);
    CHECK_THROWS_AS(WindowPlan(4, {2}, 4, 2), InvalidWindow);
}
