#pragma once

// Full Fock-space reference implementation used as an independent check of the
// sector pipeline. Nothing here uses the production basis, window tables or
// spectral propagator; everything is 2^N dense and only suitable for N <= 8.

#include <Eigen/Dense>

#include <span>
#include <string_view>

namespace mblcoh::reference {

/// Jordan-Wigner annihilation operator for site l (1-based) on the 2^N Fock space,
/// with configuration index bit l-1 holding n_l.
Eigen::MatrixXd annihilator(int N, int site);

/// H assembled from fermionic operator products: J sum (c+_l c_{l+1} + h.c.)
/// + delta sum n_l n_{l+1} + sum h_l n_l, bonds l=1..N-1 (open) or l=1..N (periodic).
Eigen::MatrixXd fermion_hamiltonian(int N, double J, double delta, std::span<const double> h, bool periodic);

/// Hard-core boson version (sigma+ sigma- hopping without strings).
Eigen::MatrixXd hardcore_boson_hamiltonian(int N, double J, double delta, std::span<const double> h, bool periodic);

/// Rows/columns of `full` restricted to configurations with k particles, ascending.
Eigen::MatrixXd project_to_sector(const Eigen::MatrixXd& full, int N, int k);

/// exp(-i H t) psi by the dense Pade matrix exponential.
Eigen::VectorXcd evolve(const Eigen::MatrixXd& H, const Eigen::VectorXcd& psi, double t);

/// "neel", "domain_wall" or "max_coherent" as a 2^N vector.
Eigen::VectorXcd initial_state(std::string_view kind, int N);

/// Reduced density matrix of sites [start, start+n-1] by explicit index summation
/// over the full |psi><psi|.
Eigen::MatrixXcd reduced_density(const Eigen::VectorXcd& psi, int N, int start, int n);

double l1(const Eigen::MatrixXcd& rho);
/// Natural-log relative entropy of coherence; eigenvalues from a dense Hermitian solve.
double rel_ent(const Eigen::MatrixXcd& rho);

/// Window-averaged measure; n = N uses the full projector. measure is "l1" or "rel_ent".
double local_coherence(const Eigen::VectorXcd& psi, int N, int n, std::string_view measure);

} // namespace mblcoh::reference
