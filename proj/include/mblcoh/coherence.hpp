#pragma once

#include "mblcoh/reduced_density.hpp"

#include <Eigen/Dense>

#include <string_view>
#include <vector>

namespace mblcoh {

enum class Measure { l1, rel_ent };
enum class LogBase { natural, two };

[[nodiscard]] std::string_view to_string(Measure m) noexcept;
[[nodiscard]] std::string_view to_string(LogBase b) noexcept;
[[nodiscard]] Measure parse_measure(std::string_view s);
[[nodiscard]] LogBase parse_log_base(std::string_view s);

struct CoherenceValue {
    Measure measure = Measure::l1;
    int n = 0;
    double value = 0.0;
    bool normalized = false;
};

/// Sum of |rho_ij| over i != j.
[[nodiscard]] double l1_coherence(const Eigen::MatrixXcd& rho);
[[nodiscard]] double l1_coherence(const WindowDensityMatrix& rho);

/// -sum p log p. Eigenvalues are clipped to [0, 1]; anything below -1e-8 is an
/// invalid state, and values below 1e-14 contribute nothing.
[[nodiscard]] double von_neumann_entropy(const Eigen::VectorXd& eigenvalues, LogBase base = LogBase::natural);

/// S(diag rho) - S(rho).
[[nodiscard]] double rel_ent_coherence(const Eigen::MatrixXcd& rho, LogBase base = LogBase::natural);
[[nodiscard]] double rel_ent_coherence(const WindowDensityMatrix& rho, LogBase base = LogBase::natural);

/// Whole-system measures for |psi><psi| without forming the 2^N x 2^N projector.
[[nodiscard]] double l1_coherence_pure(const PureState& psi);
[[nodiscard]] double rel_ent_coherence_pure(const PureState& psi, LogBase base = LogBase::natural);

/// Mean of the measure over the N+1-n contiguous n-site windows; n = N is the total coherence.
[[nodiscard]] double local_coherence(const PureState& psi, int n, Measure measure, LogBase base = LogBase::natural);

/// l1 value in units of the n-site maximally coherent state, value / (2^n - 1).
[[nodiscard]] double normalize_l1(double value, int n);

/// Evaluates local_coherence for several (measure, n) pairs on many states that share
/// one sector layout, reusing the window tables.
class LocalCoherenceEvaluator {
  public:
    LocalCoherenceEvaluator(int N, std::vector<int> sectors, std::vector<int> n_values, std::vector<Measure> measures,
                            LogBase base = LogBase::natural);

    /// result[measure index][n index], raw (unnormalized) values.
    [[nodiscard]] std::vector<std::vector<double>> evaluate(const PureState& psi) const;

    [[nodiscard]] const std::vector<int>& n_values() const noexcept { return n_values_; }
    [[nodiscard]] const std::vector<Measure>& measures() const noexcept { return measures_; }

  private:
    int N_;
    std::vector<int> n_values_;
    std::vector<Measure> measures_;
    LogBase base_;
    std::vector<std::vector<WindowPlan>> plans_; // per n index; empty for n = N
};

} // namespace mblcoh
