#pragma once

#include "mblcoh/propagator.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <map>
#include <vector>

namespace mblcoh {

/// Precomputed bit-merge tables for one contiguous window (start is 1-based).
///
/// A full configuration splits into window bits a (reindexed to 0..n-1, site order kept)
/// and environment bits e (the remaining N-n sites, compressed in site order). Both
/// halves are grouped by particle count: row group m = popcount(a), column group
/// q = popcount(e), and rank within a group follows ascending integer order.
class WindowPlan {
  public:
    struct Slot {
        int row_group;
        int col_group;
        std::uint32_t row;
        std::uint32_t col;
    };

    WindowPlan(int N, std::vector<int> sectors, int start, int n);

    [[nodiscard]] int sites() const noexcept { return N_; }
    [[nodiscard]] int start() const noexcept { return start_; }
    [[nodiscard]] int size() const noexcept { return n_; }
    [[nodiscard]] const std::vector<int>& sectors() const noexcept { return sectors_; }
    [[nodiscard]] const std::vector<Slot>& slots(int sector) const;

  private:
    int N_;
    int start_;
    int n_;
    std::vector<int> sectors_;
    std::map<int, std::vector<Slot>> slots_;
};

/// The state reshaped as a (window x environment) amplitude matrix, stored in
/// particle-count blocks M(m, q). Absent blocks are identically zero.
class WindowAmplitudes {
  public:
    WindowAmplitudes(const PureState& psi, const WindowPlan& plan);

    [[nodiscard]] int start() const noexcept { return start_; }
    [[nodiscard]] int size() const noexcept { return n_; }
    [[nodiscard]] int environment_size() const noexcept { return env_; }
    [[nodiscard]] bool present(int m, int q) const { return present_[index(m, q)]; }
    [[nodiscard]] const Eigen::MatrixXcd& block(int m, int q) const { return blocks_[index(m, q)]; }

  private:
    [[nodiscard]] std::size_t index(int m, int q) const {
        return static_cast<std::size_t>(m) * static_cast<std::size_t>(env_ + 1) + static_cast<std::size_t>(q);
    }

    int start_;
    int n_;
    int env_;
    std::vector<Eigen::MatrixXcd> blocks_;
    std::vector<bool> present_;
};

/// Reduced density matrix of a contiguous window, stored as particle-count blocks
/// rho(m, m'). Dense indices are window configurations a in [0, 2^n).
class WindowDensityMatrix {
  public:
    WindowDensityMatrix(int start, int n);

    [[nodiscard]] int start() const noexcept { return start_; }
    [[nodiscard]] int size() const noexcept { return n_; }
    [[nodiscard]] Eigen::Index dimension() const noexcept { return Eigen::Index{1} << n_; }

    [[nodiscard]] bool present(int m, int mp) const { return present_[index(m, mp)]; }
    [[nodiscard]] const Eigen::MatrixXcd& block(int m, int mp) const { return blocks_[index(m, mp)]; }
    void set_block(int m, int mp, Eigen::MatrixXcd value);

    /// True when no block couples different window particle counts.
    [[nodiscard]] bool block_diagonal() const;
    [[nodiscard]] Complex operator()(std::uint32_t a, std::uint32_t b) const;
    [[nodiscard]] Eigen::MatrixXcd dense() const;
    [[nodiscard]] Eigen::VectorXd diagonal() const;

  private:
    [[nodiscard]] std::size_t index(int m, int mp) const {
        return static_cast<std::size_t>(m) * static_cast<std::size_t>(n_ + 1) + static_cast<std::size_t>(mp);
    }

    int start_;
    int n_;
    std::vector<Eigen::MatrixXcd> blocks_;
    std::vector<bool> present_;
};

[[nodiscard]] WindowDensityMatrix reduce(const WindowAmplitudes& amplitudes);
[[nodiscard]] WindowDensityMatrix reduce(const PureState& psi, const WindowPlan& plan);
/// rho[a,b] = sum_e psi[a(+)e] conj(psi[b(+)e]) for the window [start, start+n-1].
[[nodiscard]] WindowDensityMatrix reduce(const PureState& psi, int start, int n);

/// Eigenvalues of the window density matrix, computed from the smaller Gram side
/// of each connected block of the amplitude matrix. Zero eigenvalues beyond the
/// Schmidt rank are omitted.
[[nodiscard]] Eigen::VectorXd window_spectrum(const WindowAmplitudes& amplitudes);

/// Diagonal of the window density matrix (occupation probabilities), dense order.
[[nodiscard]] Eigen::VectorXd window_populations(const WindowAmplitudes& amplitudes);

/// Partial trace of a window density matrix over its rightmost site.
[[nodiscard]] Eigen::MatrixXcd trace_out_last_site(const Eigen::MatrixXcd& rho, int n);

} // namespace mblcoh
