#pragma once

// Posynomial geometric programming through the dual.
//
//   min  f0(x) = sum_i beta_i0 prod_j x_j^alpha_0ij
//   s.t. fk(x) = sum_i beta_ik prod_j x_j^alpha_kij <= 1,   k = 1..K,  x > 0
//
// The dual maximizes V(delta) = prod (beta/delta)^delta * prod_{k>=1} lambda_k^lambda_k
// over delta >= 0 subject to the normality row (objective weights sum to 1)
// and one orthogonality row per variable. The primal point is recovered from
// the optimal weights by a log-linear least-squares solve.

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

namespace ugp {

struct Term {
    double coefficient;
    std::vector<double> exponents;
};

class Posynomial {
public:
    explicit Posynomial(std::vector<Term> terms);

    [[nodiscard]] const std::vector<Term>& terms() const noexcept { return terms_; }
    [[nodiscard]] std::size_t size() const noexcept { return terms_.size(); }
    [[nodiscard]] double evaluate(const std::vector<double>& x) const;
    /// Same exponents, every coefficient multiplied by `factor`.
    [[nodiscard]] Posynomial scaled(double factor) const;

private:
    std::vector<Term> terms_;
};

class DeterministicGP {
public:
    DeterministicGP(Posynomial objective, std::vector<Posynomial> constraints, std::size_t variables);

    [[nodiscard]] const Posynomial& objective() const noexcept { return objective_; }
    [[nodiscard]] const std::vector<Posynomial>& constraints() const noexcept { return constraints_; }
    [[nodiscard]] std::size_t variables() const noexcept { return variables_; }
    /// N: objective plus constraint terms.
    [[nodiscard]] std::size_t total_terms() const noexcept;

private:
    Posynomial objective_;
    std::vector<Posynomial> constraints_;
    std::size_t variables_;
};

/// N - (n + 1).
[[nodiscard]] long degree_of_difficulty(const DeterministicGP& gp) noexcept;

struct DualProblem {
    Eigen::VectorXd coefficients;      // beta, length N
    Eigen::MatrixXd exponents;         // N x n
    std::vector<std::size_t> block;    // term -> k (0 = objective)
    std::size_t blocks = 1;            // K + 1

    [[nodiscard]] std::size_t terms() const noexcept { return static_cast<std::size_t>(coefficients.size()); }
    [[nodiscard]] std::size_t variables() const noexcept { return static_cast<std::size_t>(exponents.cols()); }
    /// (n+1) x N: normality row then orthogonality rows.
    [[nodiscard]] Eigen::MatrixXd condition_matrix() const;
    /// e_1 of length n+1.
    [[nodiscard]] Eigen::VectorXd condition_rhs() const;
    /// lambda_k = sum of the weights in block k, for k = 0..K.
    [[nodiscard]] std::vector<double> lambdas(const Eigen::VectorXd& delta) const;
    /// log V(delta) with 0 log 0 = 0.
    [[nodiscard]] double log_value(const Eigen::VectorXd& delta) const;
};

struct SolutionDiagnostics {
    double primal_objective = 0.0;
    double duality_gap_rel = 0.0;
    std::vector<double> constraint_values;  // f_k(x*) for k = 1..K
    double linear_residual = 0.0;           // max |A delta - e1|
    double recovery_residual = 0.0;         // max residual of the log-linear system
    bool gap_exceeded = false;              // gap > 1e-6
    bool constraint_violated = false;       // some f_k(x*) > 1 + 1e-8
};

struct DualSolution {
    std::vector<double> delta;
    std::vector<double> lambda;  // lambda[0] == 1
    double dual_value = 0.0;
    std::vector<double> primal_x;
    SolutionDiagnostics diagnostics;
    int newton_iterations = 0;
    bool direct_solve = false;  // zero degree of difficulty fast path
};

struct PrimalRecovery {
    std::vector<double> x;
    double residual = 0.0;
};

inline constexpr double kGradientTolerance = 1e-9;
inline constexpr int kMaxNewtonIterations = 500;
inline constexpr double kGapTolerance = 1e-6;
inline constexpr double kFeasibilityTolerance = 1e-8;

[[nodiscard]] DualProblem build_dual(const DeterministicGP& gp);

/// Direct solve when the conditions determine delta; otherwise damped Newton
/// on log V over the null space of the conditions. Leaves primal_x and the
/// primal diagnostics empty.
[[nodiscard]] DualSolution solve_dual(const DualProblem& dual);

[[nodiscard]] PrimalRecovery recover_primal(const DualSolution& solution, const DeterministicGP& gp);

[[nodiscard]] SolutionDiagnostics verify_solution(const DeterministicGP& gp, const DualSolution& solution);

/// build_dual -> solve_dual -> recover_primal -> verify_solution.
[[nodiscard]] DualSolution solve_gp(const DeterministicGP& gp);

}  // namespace ugp
