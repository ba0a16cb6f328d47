#include "brute_force.hpp"
#include "mblcoh/errors.hpp"
#include "mblcoh/experiment.hpp"
#include "mblcoh/fock_basis.hpp"
#include "mblcoh/hamiltonian.hpp"
#include "mblcoh/propagator.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

using namespace mblcoh;

namespace {

using cld = std::complex<long double>;

// Characteristic polynomial coefficients by Faddeev-LeVerrier, then all roots by
// Durand-Kerner. Shares nothing with the library's eigensolver.
std::vector<double> charpoly_roots(const Eigen::MatrixXd& A) {
    const int n = static_cast<int>(A.rows());
    using M = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;
    const M a = A.cast<long double>();
    std::vector<long double> c(n + 1);
    c[n] = 1.0L;
    M m = M::Zero(n, n);
    for(int k = 1; k <= n; ++k) {
        m = a * m + c[n - k + 1] * M::Identity(n, n);
        c[n - k] = -(a * m).trace() / k;
    }
    auto p = [&](cld z) {
        cld v = c[n];
        for(int i = n - 1; i >= 0; --i) v = v * z + c[i];
        return v;
    };
    std::vector<cld> z(n);
    for(int i = 0; i < n; ++i) z[i] = std::pow(cld(0.4L, 0.9L), i) * 3.0L;
    for(int it = 0; it < 2000; ++it) {
        for(int i = 0; i < n; ++i) {
            cld den = 1.0L;
            for(int j = 0; j < n; ++j)
                if(j != i) den *= z[i] - z[j];
            z[i] -= p(z[i]) / den;
        }
    }
    std::vector<double> roots;
    for(auto r : z) roots.push_back(static_cast<double>(r.real()));
    std::sort(roots.begin(), roots.end());
    return roots;
}

ModelParams model(int N, double delta, double dh = 0.0) {
    ModelParams p;
    p.N = N;
    p.delta = delta;
    p.dh = dh;
    return p;
}

Eigen::VectorXcd random_unit(Eigen::Index dim, unsigned seed) {
    std::srand(seed);
    Eigen::VectorXcd v = Eigen::VectorXcd::Random(dim);
    return v / v.norm();
}

} // namespace

TEST_CASE("pauli x") {
    Eigen::MatrixXd x(2, 2);
    x << 0, 1, 1, 0;
    const auto d = diagonalize(x);
    CHECK(d.energies[0] == doctest::Approx(-1.0));
    CHECK(d.energies[1] == doctest::Approx(1.0));
}

TEST_CASE("diagonal input") {
    Eigen::MatrixXd m = Eigen::Vector4d(3.0, -1.0, 2.0, 0.5).asDiagonal();
    const auto d = diagonalize(m);
    CHECK(d.energies[0] == -1.0);
    CHECK(d.energies[1] == 0.5);
    CHECK(d.energies[2] == 2.0);
    CHECK(d.energies[3] == 3.0);
    // Columns are signed unit vectors: a permutation up to sign.
    for(int j = 0; j < 4; ++j) CHECK(d.vectors.col(j).cwiseAbs().maxCoeff() == doctest::Approx(1.0));
    CHECK(std::abs(d.vectors(1, 0)) == doctest::Approx(1.0));
    CHECK(std::abs(d.vectors(3, 1)) == doctest::Approx(1.0));
    CHECK(std::abs(d.vectors(2, 2)) == doctest::Approx(1.0));
    CHECK(std::abs(d.vectors(0, 3)) == doctest::Approx(1.0));
}

TEST_CASE("four-site half-filled block against characteristic polynomial roots") {
    const std::vector<double> h(4, 0.0);
    const auto H = build_hamiltonian(model(4, 1.0), h, 2);
    const auto d = diagonalize(H);
    const auto roots = charpoly_roots(H);
    REQUIRE(roots.size() == 6);
    for(int i = 0; i < 6; ++i) CHECK(d.energies[i] == doctest::Approx(roots[i]).epsilon(1e-10));
    // Also with disorder, where the spectrum is non-degenerate.
    const auto dis = sample_disorder(5, 0, 4, 2.0);
    const auto H2 = build_hamiltonian(model(4, 1.0, 2.0), dis, 2);
    const auto roots2 = charpoly_roots(H2);
    const auto d2 = diagonalize(H2);
    for(int i = 0; i < 6; ++i) CHECK(d2.energies[i] == doctest::Approx(roots2[i]).epsilon(1e-10));
}

TEST_CASE("reconstruction and orthonormality at the largest desk-scale block") {
    const auto dis = sample_disorder(1, 0, 12, 10.0);
    const auto H = build_hamiltonian(model(12, 1.0, 10.0), dis, 6);
    REQUIRE(H.rows() == 924);
    const auto d = diagonalize(H);
    const Eigen::MatrixXd rebuilt = d.vectors * d.energies.asDiagonal() * d.vectors.transpose();
    CHECK((rebuilt - H).cwiseAbs().maxCoeff() < 1e-10);
    CHECK((d.vectors.transpose() * d.vectors - Eigen::MatrixXd::Identity(924, 924)).cwiseAbs().maxCoeff() < 1e-10);
    for(Eigen::Index i = 1; i < d.energies.size(); ++i) CHECK(d.energies[i - 1] <= d.energies[i]);
}

TEST_CASE("empty or non-square blocks are rejected") {
    CHECK_THROWS_AS(diagonalize(Eigen::MatrixXd(0, 0)), InvalidDimension);
    CHECK_THROWS_AS(diagonalize(Eigen::MatrixXd::Zero(2, 3)), InvalidDimension);
}

TEST_CASE("identity at t = 0") {
    const auto dis = sample_disorder(1, 0, 8, 3.0);
    const auto d = diagonalize(build_hamiltonian(model(8, 1.0, 3.0), dis, 4));
    const auto psi = random_unit(70, 3);
    CHECK((evolve_to(d, psi, 0.0) - psi).norm() < 1e-14);
}

TEST_CASE("two-level Rabi oscillation") {
    const std::vector<double> h(2, 0.0);
    const auto H = build_hamiltonian(model(2, 0.0), h, 1);
    const auto d = diagonalize(H);
    Eigen::VectorXcd psi0(2);
    psi0 << 1.0, 0.0; // site 1 occupied
    const TimeGrid grid({0.0, 0.3, 1.0, 2.5, 10.0});
    const auto out = evolve(d, psi0, grid);
    for(std::size_t i = 0; i < grid.size(); ++i) {
        const double t = grid[i];
        CHECK(std::abs(out[i][0] - Complex(std::cos(t), 0.0)) < 1e-14);
        CHECK(std::abs(out[i][1] - Complex(0.0, -std::sin(t))) < 1e-14);
    }
}

TEST_CASE("eigenstates only acquire a phase") {
    const auto dis = sample_disorder(2, 0, 6, 1.0);
    const auto d = diagonalize(build_hamiltonian(model(6, 0.5, 1.0), dis, 3));
    for(int j : {0, 7, 19}) {
        const Eigen::VectorXcd v = d.vectors.col(j).cast<Complex>();
        const auto out = evolve_to(d, v, 4.2);
        CHECK(std::abs(v.dot(out)) == doctest::Approx(1.0).epsilon(1e-12));
        CHECK((out - std::exp(Complex(0.0, -d.energies[j] * 4.2)) * v).norm() < 1e-12);
    }
}

TEST_CASE("negative times are rejected") {
    CHECK_THROWS_AS(TimeGrid({0.0, -1.0}), InvalidTime);
    CHECK_THROWS_AS(TimeGrid({-0.5}), InvalidTime);
    CHECK_THROWS_AS(TimeGrid({1.0, 1.0}), InvalidTime);
    const auto d = diagonalize(Eigen::MatrixXd::Identity(2, 2));
    CHECK_THROWS_AS(evolve_to(d, Eigen::VectorXcd::Ones(2) / std::sqrt(2.0), -1.0), InvalidTime);
}

TEST_CASE("standard grid") {
    const auto g = TimeGrid::standard();
    REQUIRE(g.size() == 122);
    CHECK(g[0] == 0.0);
    CHECK(g[1] == doctest::Approx(0.05));
    CHECK(g.back() == doctest::Approx(1000.0));
    for(std::size_t i = 2; i < g.size(); ++i) CHECK(std::log(g[i] / g[i - 1]) == doctest::Approx(std::log(20000.0) / 120.0));
    CHECK(TimeGrid::log_spaced(0.1, 10.0, 5, false).size() == 5);
}

TEST_CASE("norm, energy and time composition") {
    const auto dis = sample_disorder(8, 1, 10, 6.0);
    const auto H = build_hamiltonian(model(10, 1.0, 6.0), dis, 5);
    const auto d = diagonalize(H);
    const auto psi = random_unit(H.rows(), 11);
    const auto grid = TimeGrid::standard();
    const auto out = evolve(d, psi, grid);
    const double e0 = psi.dot(H.cast<Complex>() * psi).real();
    for(const auto& v : out) {
        CHECK(std::abs(v.norm() - 1.0) < 1e-10);
        CHECK(std::abs(v.dot(H.cast<Complex>() * v).real() - e0) <= 1e-9 * std::abs(e0));
    }
    for(auto [t1, t2] : {std::pair{0.7, 3.1}, std::pair{10.0, 250.0}, std::pair{0.05, 999.0}}) {
        const auto composed = evolve_to(d, evolve_to(d, psi, t1), t2 - t1);
        CHECK((composed - evolve_to(d, psi, t2)).norm() < 1e-9);
    }
}

TEST_CASE("krylov engine: trivial cases") {
    const std::vector<double> h(2, 0.0);
    const auto H = build_hamiltonian_sparse(model(2, 0.0), h, 1);
    Eigen::VectorXcd psi0(2);
    psi0 << 1.0, 0.0;
    CHECK((expmv(H, psi0, 0.0) - psi0).norm() == 0.0);
    const auto out = expmv(H, psi0, 1.0);
    CHECK(std::abs(out[0] - Complex(std::cos(1.0), 0.0)) < 1e-12);
    CHECK(std::abs(out[1] - Complex(0.0, -std::sin(1.0))) < 1e-12);
}

TEST_CASE("krylov engine agrees with the spectral engine") {
    for(std::uint64_t r = 0; r < 3; ++r) {
        const auto dis = sample_disorder(21, r, 10, 10.0);
        const auto p = model(10, r == 1 ? 0.0 : 1.0, 10.0);
        const auto psi = random_unit(252, static_cast<unsigned>(r + 1));
        const auto d = diagonalize(build_hamiltonian(p, dis, 5));
        const auto sparse = build_hamiltonian_sparse(p, dis.h, 5);
        for(double t : {0.5, 10.0, 100.0}) CHECK((expmv(sparse, psi, t) - evolve_to(d, psi, t)).norm() < 1e-8);
    }
}

TEST_CASE("krylov engine reports non-convergence") {
    const auto dis = sample_disorder(21, 0, 10, 10.0);
    const auto sparse = build_hamiltonian_sparse(model(10, 1.0, 10.0), dis.h, 5);
    KrylovOptions tight;
    tight.max_dimension = 2;
    tight.max_substeps = 3;
    CHECK_THROWS_AS(expmv(sparse, random_unit(252, 1), 100.0, tight), ConvergenceError);
    try {
        (void)expmv(sparse, random_unit(252, 1), 100.0, tight);
    } catch(const ConvergenceError& e) {
        CHECK(e.residual() > 0.0);
        CHECK(std::string(e.what()).find("residual") != std::string::npos);
    }
}

TEST_CASE("multi-sector evolution") {
    const int N = 4;
    const std::vector<int> all{0, 1, 2, 3, 4};
    ModelParams p = model(N, 0.0);

    SUBCASE("single sector equals evolve()") {
        const auto dis = sample_disorder(3, 0, N, 2.0);
        const auto blocks = build_blocks(p, dis, std::vector<int>{2});
        const auto psi0 = build_initial_state(InitialStateKind::neel, N);
        const TimeGrid grid({0.0, 0.5, 5.0});
        const auto out = evolve_multi_sector(blocks, psi0, grid);
        const auto direct = evolve(diagonalize(blocks.blocks.at(2)), psi0.sectors.at(2), grid);
        for(std::size_t i = 0; i < grid.size(); ++i) CHECK((out[i].sectors.at(2) - direct[i]).norm() == 0.0);
    }

    SUBCASE("empty and full sectors only pick up phases") {
        const auto dis = sample_disorder(3, 0, N, 2.0);
        const auto blocks = build_blocks(p, dis, std::vector<int>{0, N});
        PureState psi0;
        psi0.N = N;
        psi0.sectors[0] = Eigen::VectorXcd::Constant(1, 1.0 / std::sqrt(2.0));
        psi0.sectors[N] = Eigen::VectorXcd::Constant(1, 1.0 / std::sqrt(2.0));
        const auto out = evolve_multi_sector(blocks, psi0, TimeGrid({0.0, 1.0, 7.0}));
        for(const auto& s : out) {
            CHECK(std::abs(s.sectors.at(0)[0]) == doctest::Approx(1.0 / std::sqrt(2.0)));
            CHECK(std::abs(s.sectors.at(N)[0]) == doctest::Approx(1.0 / std::sqrt(2.0)));
        }
    }

    SUBCASE("maximally coherent state against the full exponential") {
        const std::vector<double> h(N, 0.0);
        DisorderRealization dis{0, 0, h};
        const auto blocks = build_blocks(p, dis, all);
        const auto psi0 = build_initial_state(InitialStateKind::max_coherent, N);
        const auto out = evolve_multi_sector(blocks, psi0, TimeGrid({0.3}));
        const auto full = reference::fermion_hamiltonian(N, 1.0, 0.0, h, false);
        const auto expected = reference::evolve(full, reference::initial_state("max_coherent", N), 0.3);
        CHECK((out[0].to_full() - expected).cwiseAbs().maxCoeff() < 1e-10);
    }

    SUBCASE("per-sector norms are conserved") {
        const auto dis = sample_disorder(3, 2, N, 5.0);
        p.delta = 1.0;
        const auto blocks = build_blocks(p, dis, all);
        const auto psi0 = build_initial_state(InitialStateKind::max_coherent, N);
        for(const auto& s : evolve_multi_sector(blocks, psi0, TimeGrid::standard())) {
            for(int k : all) CHECK(std::abs(s.sectors.at(k).squaredNorm() - psi0.sectors.at(k).squaredNorm()) < 1e-10);
            CHECK(std::abs(s.norm_squared() - 1.0) < 1e-10);
        }
    }

    SUBCASE("missing sector block") {
        const auto dis = sample_disorder(3, 0, N, 2.0);
        const auto blocks = build_blocks(p, dis, std::vector<int>{2});
        CHECK_THROWS_AS((void)evolve_multi_sector(blocks, build_initial_state(InitialStateKind::max_coherent, N), TimeGrid({1.0})), ConfigError);
    }

    SUBCASE("krylov multi-sector matches spectral") {
        const auto dis = sample_disorder(3, 1, N, 5.0);
        p.delta = 1.0;
        const auto psi0 = build_initial_state(InitialStateKind::max_coherent, N);
        const auto grid = TimeGrid::log_spaced(0.05, 100.0, 20);
        const auto a = evolve_multi_sector(build_blocks(p, dis, all), psi0, grid);
        const auto b = evolve_multi_sector_krylov(p, dis, psi0, grid);
        for(std::size_t i = 0; i < grid.size(); ++i) CHECK((a[i].to_full() - b[i].to_full()).norm() < 1e-8);
    }
}
