#include "mblcoh/coherence.hpp"

#include "mblcoh/errors.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <numbers>
#include <string>

namespace mblcoh {

namespace {

constexpr double kNegativeEigenvalueLimit = -1e-8;
constexpr double kZeroEigenvalue = 1e-14;

double plogp_sum(const Eigen::VectorXd& p, LogBase base) {
    double s = 0.0;
    for(Eigen::Index i = 0; i < p.size(); ++i) {
        double x = p[i];
        if(x < kNegativeEigenvalueLimit) throw InvalidState("density matrix has eigenvalue " + std::to_string(x) + " below -1e-8");
        x = std::min(std::max(x, 0.0), 1.0);
        if(x < kZeroEigenvalue) continue;
        s -= x * std::log(x);
    }
    return base == LogBase::two ? s / std::numbers::ln2 : s;
}

void check_square(const Eigen::MatrixXcd& rho) {
    if(rho.rows() != rho.cols() || rho.rows() == 0)
        throw InvalidDimension("density matrix must be non-empty and square, got " + std::to_string(rho.rows()) + "x" +
                               std::to_string(rho.cols()));
}

bool is_diagonal(const Eigen::MatrixXcd& m) {
    for(Eigen::Index j = 0; j < m.cols(); ++j)
        for(Eigen::Index i = 0; i < m.rows(); ++i)
            if(i != j && m(i, j) != Complex(0.0, 0.0)) return false;
    return true;
}

// Diagonal input returns its own diagonal, so both measures vanish exactly on it.
Eigen::VectorXd hermitian_eigenvalues(const Eigen::MatrixXcd& m) {
    if(is_diagonal(m)) return m.diagonal().real();
    const Eigen::MatrixXcd sym = 0.5 * (m + m.adjoint());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(sym, Eigen::EigenvaluesOnly);
    if(solver.info() != Eigen::Success) throw InvalidState("Hermitian eigensolver failed to converge");
    return solver.eigenvalues();
}

double sum_off_diagonal_moduli(const Eigen::MatrixXcd& block, bool skip_diagonal) {
    double s = block.cwiseAbs().sum();
    if(skip_diagonal) s -= block.diagonal().cwiseAbs().sum();
    return s;
}

} // namespace

std::string_view to_string(Measure m) noexcept { return m == Measure::l1 ? "l1" : "rel_ent"; }
std::string_view to_string(LogBase b) noexcept { return b == LogBase::natural ? "e" : "2"; }

Measure parse_measure(std::string_view s) {
    if(s == "l1") return Measure::l1;
    if(s == "rel_ent") return Measure::rel_ent;
    throw ConfigError("measure must be \"l1\" or \"rel_ent\", got \"" + std::string(s) + "\"");
}

LogBase parse_log_base(std::string_view s) {
    if(s == "e" || s == "natural") return LogBase::natural;
    if(s == "2") return LogBase::two;
    throw ConfigError("log_base must be \"e\" or \"2\", got \"" + std::string(s) + "\"");
}

double l1_coherence(const Eigen::MatrixXcd& rho) {
    check_square(rho);
    return sum_off_diagonal_moduli(rho, true);
}

double l1_coherence(const WindowDensityMatrix& rho) {
    double s = 0.0;
    for(int m = 0; m <= rho.size(); ++m)
        for(int mp = 0; mp <= rho.size(); ++mp)
            if(rho.present(m, mp)) s += sum_off_diagonal_moduli(rho.block(m, mp), m == mp);
    return s;
}

double von_neumann_entropy(const Eigen::VectorXd& eigenvalues, LogBase base) { return plogp_sum(eigenvalues, base); }

double rel_ent_coherence(const Eigen::MatrixXcd& rho, LogBase base) {
    check_square(rho);
    const Eigen::VectorXd populations = rho.diagonal().real();
    return plogp_sum(populations, base) - plogp_sum(hermitian_eigenvalues(rho), base);
}

double rel_ent_coherence(const WindowDensityMatrix& rho, LogBase base) {
    if(!rho.block_diagonal()) return rel_ent_coherence(rho.dense(), base);
    double s = 0.0;
    for(int m = 0; m <= rho.size(); ++m)
        if(rho.present(m, m)) {
            const auto& b = rho.block(m, m);
            s += plogp_sum(b.diagonal().real(), base) - plogp_sum(hermitian_eigenvalues(b), base);
        }
    return s;
}

double l1_coherence_pure(const PureState& psi) {
    double sum_abs = 0.0;
    double sum_sq = 0.0;
    for(const auto& [k, v] : psi.sectors) {
        sum_abs += v.cwiseAbs().sum();
        sum_sq += v.squaredNorm();
    }
    return std::max(0.0, sum_abs * sum_abs - sum_sq);
}

double rel_ent_coherence_pure(const PureState& psi, LogBase base) {
    double s = 0.0;
    for(const auto& [k, v] : psi.sectors) s += plogp_sum(v.cwiseAbs2(), base);
    return s;
}

double normalize_l1(double value, int n) {
    if(n < 1 || n > 62) throw InvalidDimension("normalize_l1 needs 1 <= n <= 62");
    return value / (std::ldexp(1.0, n) - 1.0);
}

LocalCoherenceEvaluator::LocalCoherenceEvaluator(int N, std::vector<int> sectors, std::vector<int> n_values, std::vector<Measure> measures,
                                                 LogBase base)
    : N_(N), n_values_(std::move(n_values)), measures_(std::move(measures)), base_(base) {
    for(int n : n_values_) {
        if(n < 1 || n > N) throw InvalidWindow("subsystem size n=" + std::to_string(n) + " outside [1, " + std::to_string(N) + "]");
        std::vector<WindowPlan> plans;
        if(n < N)
            for(int start = 1; start + n - 1 <= N; ++start) plans.emplace_back(N, sectors, start, n);
        plans_.push_back(std::move(plans));
    }
}

std::vector<std::vector<double>> LocalCoherenceEvaluator::evaluate(const PureState& psi) const {
    if(psi.N != N_) throw InvalidDimension("state N does not match evaluator N");
    std::vector<std::vector<double>> out(measures_.size(), std::vector<double>(n_values_.size(), 0.0));
    bool want_l1 = false;
    bool want_rel = false;
    for(auto m : measures_) (m == Measure::l1 ? want_l1 : want_rel) = true;

    for(std::size_t ni = 0; ni < n_values_.size(); ++ni) {
        double l1 = 0.0;
        double rel = 0.0;
        if(n_values_[ni] == N_) {
            if(want_l1) l1 = l1_coherence_pure(psi);
            if(want_rel) rel = rel_ent_coherence_pure(psi, base_);
        } else {
            const auto& plans = plans_[ni];
            for(const auto& plan : plans) {
                const WindowAmplitudes amps(psi, plan);
                if(want_l1) l1 += l1_coherence(reduce(amps));
                if(want_rel) rel += plogp_sum(window_populations(amps), base_) - plogp_sum(window_spectrum(amps), base_);
            }
            l1 /= static_cast<double>(plans.size());
            rel /= static_cast<double>(plans.size());
        }
        for(std::size_t mi = 0; mi < measures_.size(); ++mi) out[mi][ni] = measures_[mi] == Measure::l1 ? l1 : rel;
    }
    return out;
}

double local_coherence(const PureState& psi, int n, Measure measure, LogBase base) {
    if(n < 1 || n > psi.N) throw InvalidWindow("subsystem size n=" + std::to_string(n) + " outside [1, " + std::to_string(psi.N) + "]");
    const LocalCoherenceEvaluator evaluator(psi.N, psi.sector_keys(), {n}, {measure}, base);
    return evaluator.evaluate(psi)[0][0];
}

} // namespace mblcoh
