#include "brute_force.hpp"

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <stdexcept>
#include <string>

namespace mblcoh::reference {

namespace {

Eigen::MatrixXd number_op(int N, int site) {
    const Eigen::MatrixXd c = annihilator(N, site);
    return c.transpose() * c;
}

int bit(long x, int pos) { return static_cast<int>((x >> pos) & 1L); }

} // namespace

Eigen::MatrixXd annihilator(int N, int site) {
    const long dim = 1L << N;
    Eigen::MatrixXd c = Eigen::MatrixXd::Zero(dim, dim);
    const int l = site - 1;
    for(long s = 0; s < dim; ++s) {
        if(!bit(s, l)) continue;
        int parity = 0;
        for(int j = 0; j < l; ++j) parity += bit(s, j);
        c(s ^ (1L << l), s) = parity % 2 == 0 ? 1.0 : -1.0;
    }
    return c;
}

Eigen::MatrixXd fermion_hamiltonian(int N, double J, double delta, std::span<const double> h, bool periodic) {
    const long dim = 1L << N;
    Eigen::MatrixXd H = Eigen::MatrixXd::Zero(dim, dim);
    const int bonds = periodic ? N : N - 1;
    for(int b = 1; b <= bonds; ++b) {
        const int l = b;
        const int m = b % N + 1;
        const Eigen::MatrixXd cl = annihilator(N, l);
        const Eigen::MatrixXd cm = annihilator(N, m);
        H += J * (cl.transpose() * cm + cm.transpose() * cl);
        H += delta * number_op(N, l) * number_op(N, m);
    }
    for(int l = 1; l <= N; ++l) H += h[static_cast<std::size_t>(l - 1)] * number_op(N, l);
    return H;
}

Eigen::MatrixXd hardcore_boson_hamiltonian(int N, double J, double delta, std::span<const double> h, bool periodic) {
    const long dim = 1L << N;
    Eigen::MatrixXd H = Eigen::MatrixXd::Zero(dim, dim);
    const int bonds = periodic ? N : N - 1;
    for(long s = 0; s < dim; ++s) {
        for(int b = 0; b < bonds; ++b) {
            const int l = b;
            const int m = (b + 1) % N;
            if(bit(s, l) && bit(s, m)) H(s, s) += delta;
            if(bit(s, l) != bit(s, m)) H(s ^ ((1L << l) | (1L << m)), s) += J;
        }
        for(int l = 0; l < N; ++l)
            if(bit(s, l)) H(s, s) += h[static_cast<std::size_t>(l)];
    }
    return H;
}

Eigen::MatrixXd project_to_sector(const Eigen::MatrixXd& full, int N, int k) {
    std::vector<long> states;
    for(long s = 0; s < (1L << N); ++s) {
        int count = 0;
        for(int j = 0; j < N; ++j) count += bit(s, j);
        if(count == k) states.push_back(s);
    }
    const auto d = static_cast<Eigen::Index>(states.size());
    Eigen::MatrixXd out(d, d);
    for(Eigen::Index i = 0; i < d; ++i)
        for(Eigen::Index j = 0; j < d; ++j) out(i, j) = full(states[static_cast<std::size_t>(i)], states[static_cast<std::size_t>(j)]);
    return out;
}

Eigen::VectorXcd evolve(const Eigen::MatrixXd& H, const Eigen::VectorXcd& psi, double t) {
    const Eigen::MatrixXcd generator = Eigen::MatrixXcd(H.cast<std::complex<double>>()) * std::complex<double>(0.0, -t);
    const Eigen::MatrixXcd U = generator.exp();
    return U * psi;
}

Eigen::VectorXcd initial_state(std::string_view kind, int N) {
    const long dim = 1L << N;
    Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(dim);
    if(kind == "max_coherent") {
        psi.setConstant(1.0 / std::sqrt(static_cast<double>(dim)));
        return psi;
    }
    long s = 0;
    for(int l = 1; l <= N; ++l) {
        const bool occupied = kind == "neel" ? (l % 2 == 1) : (l <= N / 2);
        if(occupied) s |= 1L << (l - 1);
    }
    if(kind != "neel" && kind != "domain_wall") throw std::invalid_argument("unknown initial state " + std::string(kind));
    psi[s] = 1.0;
    return psi;
}

Eigen::MatrixXcd reduced_density(const Eigen::VectorXcd& psi, int N, int start, int n) {
    const Eigen::MatrixXcd full = psi * psi.adjoint();
    const long dw = 1L << n;
    const int env_sites = N - n;
    const long de = 1L << env_sites;
    Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(dw, dw);
    // Environment bit j maps to the j-th site outside the window, in site order.
    auto compose = [&](long a, long e) {
        long s = 0;
        int ej = 0;
        for(int l = 1; l <= N; ++l) {
            const bool inside = l >= start && l < start + n;
            const int value = inside ? bit(a, l - start) : bit(e, ej++);
            if(value) s |= 1L << (l - 1);
        }
        return s;
    };
    for(long a = 0; a < dw; ++a)
        for(long b = 0; b < dw; ++b)
            for(long e = 0; e < de; ++e) rho(a, b) += full(compose(a, e), compose(b, e));
    return rho;
}

double l1(const Eigen::MatrixXcd& rho) {
    double s = 0.0;
    for(Eigen::Index i = 0; i < rho.rows(); ++i)
        for(Eigen::Index j = 0; j < rho.cols(); ++j)
            if(i != j) s += std::abs(rho(i, j));
    return s;
}

double rel_ent(const Eigen::MatrixXcd& rho) {
    auto entropy = [](const Eigen::VectorXd& p) {
        double s = 0.0;
        for(Eigen::Index i = 0; i < p.size(); ++i)
            if(p[i] > 1e-14) s -= p[i] * std::log(p[i]);
        return s;
    };
    // The general complex Schur solver stalls on some degenerate pure states; the
    // Hermitian part is exact here anyway.
    const Eigen::MatrixXcd h = 0.5 * (rho + rho.adjoint());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(h, Eigen::EigenvaluesOnly);
    return entropy(rho.diagonal().real()) - entropy(solver.eigenvalues());
}

double local_coherence(const Eigen::VectorXcd& psi, int N, int n, std::string_view measure) {
    const int windows = n == N ? 1 : N + 1 - n;
    double s = 0.0;
    for(int start = 1; start <= windows; ++start) {
        const Eigen::MatrixXcd rho = reduced_density(psi, N, start, n);
        s += measure == "l1" ? l1(rho) : rel_ent(rho);
    }
    return s / windows;
}

} // namespace mblcoh::reference
