#include "ugp/gp_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "ugp/error.hpp"

namespace ugp {

namespace {

constexpr double kDeltaFloor = 1e-300;
constexpr double kDroppedBlock = 1e-14;
constexpr int kMaxPhaseOneIterations = 200;

double x_log_x(double v) { return v > 0.0 ? v * std::log(v) : 0.0; }

double max_abs(const Eigen::VectorXd& v) { return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff(); }

std::vector<double> to_std(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

// Rows of `a` that form a basis of its row space.
Eigen::MatrixXd independent_rows(const Eigen::MatrixXd& a, const Eigen::VectorXd& b, Eigen::VectorXd& b_out) {
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a.transpose());
    qr.setThreshold(1e-12);
    const auto rank = qr.rank();
    Eigen::MatrixXd rows(rank, a.cols());
    b_out.resize(rank);
    for (Eigen::Index i = 0; i < rank; ++i) {
        const auto row = qr.colsPermutation().indices()(i);
        rows.row(i) = a.row(row);
        b_out(i) = b(row);
    }
    return rows;
}

// Orthonormal basis of ker(a) for full-row-rank a.
Eigen::MatrixXd null_space(const Eigen::MatrixXd& a) {
    const Eigen::Index n = a.cols();
    const Eigen::Index r = a.rows();
    if (r == 0) return Eigen::MatrixXd::Identity(n, n);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(a.transpose());
    const Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(n, n);
    return q.rightCols(n - r);
}

// Infeasible-start Newton on sum(log delta): the first accepted full step
// lands on the affine set while staying strictly positive.
Eigen::VectorXd strictly_positive_point(const Eigen::MatrixXd& a, const Eigen::VectorXd& b) {
    const Eigen::Index n = a.cols();
    Eigen::VectorXd delta = Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(n));
    const double scale = 1.0 + max_abs(b);
    for (int iteration = 0; iteration < kMaxPhaseOneIterations; ++iteration) {
        const Eigen::VectorXd residual = b - a * delta;
        if (max_abs(residual) <= 1e-13 * scale) return delta;
        const Eigen::VectorXd d = delta.array().square();
        const Eigen::MatrixXd normal = a * d.asDiagonal() * a.transpose();
        const Eigen::VectorXd nu = normal.ldlt().solve(residual - a * delta);
        const Eigen::VectorXd step = delta + d.asDiagonal() * (a.transpose() * nu);
        double t = 1.0;
        for (Eigen::Index i = 0; i < n; ++i) {
            if (delta(i) + step(i) <= 0.0) t = std::min(t, 0.9 * delta(i) / -step(i));
        }
        delta += t * step;
        if (t == 1.0) {
            // Clean up round-off on the affine set.
            const Eigen::VectorXd r = b - a * delta;
            delta += a.transpose() * (a * a.transpose()).ldlt().solve(r);
            if ((delta.array() > 0.0).all()) return delta;
            delta = delta.cwiseMax(kDeltaFloor);
        }
    }
    fail(ErrorCode::InfeasibleDual, "no strictly positive weights satisfy the normality and orthogonality conditions");
}

struct NewtonState {
    Eigen::VectorXd delta;  // full length; dropped blocks are exactly zero
    std::vector<bool> dropped_block;
};

double masked_log_value(const DualProblem& dual, const Eigen::VectorXd& delta) { return dual.log_value(delta); }

// Damped Newton on log V restricted to the affine set, over the terms of
// blocks that are still active.
int maximize_log_value(const DualProblem& dual, const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
                       NewtonState& state) {
    const auto terms = static_cast<Eigen::Index>(dual.terms());
    for (int iteration = 1; iteration <= kMaxNewtonIterations; ++iteration) {
        std::vector<Eigen::Index> active;
        for (Eigen::Index i = 0; i < terms; ++i) {
            if (!state.dropped_block[dual.block[static_cast<std::size_t>(i)]]) active.push_back(i);
        }
        const auto m = static_cast<Eigen::Index>(active.size());
        Eigen::MatrixXd a_active(a.rows(), m);
        Eigen::VectorXd delta(m);
        for (Eigen::Index j = 0; j < m; ++j) {
            a_active.col(j) = a.col(active[static_cast<std::size_t>(j)]);
            delta(j) = state.delta(active[static_cast<std::size_t>(j)]);
        }
        Eigen::VectorXd b_reduced;
        const Eigen::MatrixXd a_rows = independent_rows(a_active, b, b_reduced);
        const Eigen::MatrixXd z = null_space(a_rows);
        if (z.cols() == 0) return iteration - 1;

        const std::vector<double> lambda = dual.lambdas(state.delta);
        Eigen::VectorXd gradient(m);
        Eigen::MatrixXd hessian = Eigen::MatrixXd::Zero(m, m);
        for (Eigen::Index j = 0; j < m; ++j) {
            const auto term = active[static_cast<std::size_t>(j)];
            const std::size_t k = dual.block[static_cast<std::size_t>(term)];
            gradient(j) = std::log(dual.coefficients(term)) - std::log(delta(j)) - 1.0;
            hessian(j, j) = -1.0 / delta(j);
            if (k == 0) continue;
            gradient(j) += std::log(lambda[k]) + 1.0;
            for (Eigen::Index l = 0; l < m; ++l) {
                if (dual.block[static_cast<std::size_t>(active[static_cast<std::size_t>(l)])] == k) {
                    hessian(j, l) += 1.0 / lambda[k];
                }
            }
        }
        const Eigen::VectorXd reduced_gradient = z.transpose() * gradient;
        if (reduced_gradient.norm() <= kGradientTolerance) return iteration - 1;

        // -Z'HZ is positive semidefinite; directions along which log V is
        // linear get a small Levenberg shift.
        Eigen::MatrixXd curvature = -(z.transpose() * hessian * z);
        const double diagonal_scale = 1.0 + curvature.diagonal().cwiseAbs().maxCoeff();
        Eigen::VectorXd direction;
        for (double shift = 0.0;; shift = shift == 0.0 ? 1e-12 * diagonal_scale : shift * 100.0) {
            Eigen::MatrixXd shifted = curvature;
            shifted.diagonal().array() += shift;
            Eigen::LLT<Eigen::MatrixXd> llt(shifted);
            if (llt.info() == Eigen::Success) {
                direction = z * llt.solve(reduced_gradient);
                if (direction.allFinite()) break;
            }
            if (shift > 1e6 * diagonal_scale) fail(ErrorCode::NonConvergence, "dual Newton system is singular");
        }

        double t = 1.0;
        for (Eigen::Index j = 0; j < m; ++j) {
            if (delta(j) + direction(j) <= 0.0) t = std::min(t, 0.99 * delta(j) / -direction(j));
        }
        const double slope = gradient.dot(direction);
        const double current = masked_log_value(dual, state.delta);
        Eigen::VectorXd candidate = state.delta;
        for (int halving = 0; halving < 60; ++halving) {
            for (Eigen::Index j = 0; j < m; ++j) {
                const auto term = active[static_cast<std::size_t>(j)];
                candidate(term) = std::max(kDeltaFloor, delta(j) + t * direction(j));
            }
            const double value = masked_log_value(dual, candidate);
            if (std::isfinite(value) && value >= current + 1e-4 * t * slope) break;
            t *= 0.5;
        }
        state.delta = candidate;

        // A constraint block whose total weight collapses is inactive at the
        // optimum; fix it at zero and continue on the remaining terms.
        const std::vector<double> updated = dual.lambdas(state.delta);
        for (std::size_t k = 1; k < dual.blocks; ++k) {
            if (!state.dropped_block[k] && updated[k] < kDroppedBlock) {
                state.dropped_block[k] = true;
                for (Eigen::Index i = 0; i < terms; ++i) {
                    if (dual.block[static_cast<std::size_t>(i)] == k) state.delta(i) = 0.0;
                }
            }
        }
    }
    fail(ErrorCode::NonConvergence,
         "dual Newton iteration did not converge within " + std::to_string(kMaxNewtonIterations) + " iterations");
}

}  // namespace

// ---------------------------------------------------------------------------
// Problem types
// ---------------------------------------------------------------------------

Posynomial::Posynomial(std::vector<Term> terms) : terms_(std::move(terms)) {
    require(!terms_.empty(), ErrorCode::InvalidParameter, "a posynomial needs at least one term");
    for (const auto& term : terms_) {
        require(std::isfinite(term.coefficient) && term.coefficient > 0.0, ErrorCode::InvalidParameter,
                "posynomial coefficients must be positive, got " + std::to_string(term.coefficient));
        require(std::all_of(term.exponents.begin(), term.exponents.end(), [](double e) { return std::isfinite(e); }),
                ErrorCode::InvalidParameter, "posynomial exponents must be finite");
    }
}

double Posynomial::evaluate(const std::vector<double>& x) const {
    double total = 0.0;
    for (const auto& term : terms_) {
        require(term.exponents.size() == x.size(), ErrorCode::InvalidParameter,
                "point dimension does not match the exponent vectors");
        double value = term.coefficient;
        for (std::size_t j = 0; j < x.size(); ++j) value *= std::pow(x[j], term.exponents[j]);
        total += value;
    }
    return total;
}

Posynomial Posynomial::scaled(double factor) const {
    std::vector<Term> terms = terms_;
    for (auto& term : terms) term.coefficient *= factor;
    return Posynomial(std::move(terms));
}

DeterministicGP::DeterministicGP(Posynomial objective, std::vector<Posynomial> constraints, std::size_t variables)
    : objective_(std::move(objective)), constraints_(std::move(constraints)), variables_(variables) {
    const auto check = [&](const Posynomial& p, const std::string& where) {
        for (const auto& term : p.terms()) {
            require(term.exponents.size() == variables_, ErrorCode::InvalidParameter,
                    where + ": exponent vector has " + std::to_string(term.exponents.size()) +
                        " entries, expected " + std::to_string(variables_));
        }
    };
    check(objective_, "objective");
    for (std::size_t k = 0; k < constraints_.size(); ++k) check(constraints_[k], "constraint " + std::to_string(k + 1));
}

std::size_t DeterministicGP::total_terms() const noexcept {
    return std::accumulate(constraints_.begin(), constraints_.end(), objective_.size(),
                           [](std::size_t sum, const Posynomial& p) { return sum + p.size(); });
}

long degree_of_difficulty(const DeterministicGP& gp) noexcept {
    return static_cast<long>(gp.total_terms()) - static_cast<long>(gp.variables() + 1);
}

// ---------------------------------------------------------------------------
// Dual
// ---------------------------------------------------------------------------

Eigen::MatrixXd DualProblem::condition_matrix() const {
    const auto n = exponents.cols();
    const auto terms = coefficients.size();
    Eigen::MatrixXd a(n + 1, terms);
    for (Eigen::Index i = 0; i < terms; ++i) a(0, i) = block[static_cast<std::size_t>(i)] == 0 ? 1.0 : 0.0;
    a.bottomRows(n) = exponents.transpose();
    return a;
}

Eigen::VectorXd DualProblem::condition_rhs() const {
    Eigen::VectorXd b = Eigen::VectorXd::Zero(exponents.cols() + 1);
    b(0) = 1.0;
    return b;
}

std::vector<double> DualProblem::lambdas(const Eigen::VectorXd& delta) const {
    std::vector<double> lambda(blocks, 0.0);
    for (Eigen::Index i = 0; i < delta.size(); ++i) lambda[block[static_cast<std::size_t>(i)]] += delta(i);
    return lambda;
}

double DualProblem::log_value(const Eigen::VectorXd& delta) const {
    double total = 0.0;
    for (Eigen::Index i = 0; i < delta.size(); ++i) {
        if (delta(i) > 0.0) total += delta(i) * std::log(coefficients(i)) - x_log_x(delta(i));
    }
    const std::vector<double> lambda = lambdas(delta);
    for (std::size_t k = 1; k < blocks; ++k) total += x_log_x(lambda[k]);
    return total;
}

DualProblem build_dual(const DeterministicGP& gp) {
    const std::size_t terms = gp.total_terms();
    const std::size_t n = gp.variables();
    DualProblem dual;
    dual.coefficients.resize(static_cast<Eigen::Index>(terms));
    dual.exponents.resize(static_cast<Eigen::Index>(terms), static_cast<Eigen::Index>(n));
    dual.block.reserve(terms);
    dual.blocks = gp.constraints().size() + 1;
    Eigen::Index row = 0;
    const auto append = [&](const Posynomial& p, std::size_t k) {
        for (const auto& term : p.terms()) {
            dual.coefficients(row) = term.coefficient;
            for (std::size_t j = 0; j < n; ++j) dual.exponents(row, static_cast<Eigen::Index>(j)) = term.exponents[j];
            dual.block.push_back(k);
            ++row;
        }
    };
    append(gp.objective(), 0);
    for (std::size_t k = 0; k < gp.constraints().size(); ++k) append(gp.constraints()[k], k + 1);
    return dual;
}

DualSolution solve_dual(const DualProblem& dual) {
    const auto terms = static_cast<Eigen::Index>(dual.terms());
    const auto n = static_cast<Eigen::Index>(dual.variables());
    if (terms < n + 1) {
        fail(ErrorCode::DegreeOfDifficultyNegative,
             "degree of difficulty is negative (" + std::to_string(terms) + " terms, " + std::to_string(n) +
                 " variables); the dual conditions are overdetermined");
    }
    const Eigen::MatrixXd a = dual.condition_matrix();
    const Eigen::VectorXd b = dual.condition_rhs();

    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(a);
    cod.setThreshold(1e-12);
    const Eigen::VectorXd least_norm = cod.solve(b);
    if (max_abs(a * least_norm - b) > 1e-9) {
        fail(ErrorCode::InfeasibleDual, "the normality and orthogonality conditions are inconsistent");
    }

    DualSolution solution;
    Eigen::VectorXd delta;
    if (cod.rank() == terms) {
        if (least_norm.minCoeff() < -1e-10) {
            fail(ErrorCode::InfeasibleDual,
                 "the unique solution of the dual conditions has a negative weight (" +
                     std::to_string(least_norm.minCoeff()) + ")");
        }
        delta = least_norm.cwiseMax(0.0);
        solution.direct_solve = true;
    } else {
        Eigen::VectorXd b_reduced;
        const Eigen::MatrixXd a_rows = independent_rows(a, b, b_reduced);
        NewtonState state{strictly_positive_point(a_rows, b_reduced), std::vector<bool>(dual.blocks, false)};
        solution.newton_iterations = maximize_log_value(dual, a, b, state);
        delta = state.delta;
    }

    solution.delta = to_std(delta);
    solution.lambda = dual.lambdas(delta);
    solution.lambda[0] = 1.0;
    solution.dual_value = std::exp(dual.log_value(delta));
    solution.diagnostics.linear_residual = max_abs(a * delta - b);
    return solution;
}

PrimalRecovery recover_primal(const DualSolution& solution, const DeterministicGP& gp) {
    const std::size_t n = gp.variables();
    if (n == 0) return {};
    std::vector<Eigen::RowVectorXd> rows;
    std::vector<double> rhs;
    std::size_t index = 0;
    const auto add_rows = [&](const Posynomial& p, std::size_t k) {
        for (const auto& term : p.terms()) {
            const double weight = solution.delta.at(index++);
            if (weight <= 0.0) continue;
            if (k > 0 && solution.lambda.at(k) <= 0.0) continue;
            Eigen::RowVectorXd row(static_cast<Eigen::Index>(n));
            for (std::size_t j = 0; j < n; ++j) row(static_cast<Eigen::Index>(j)) = term.exponents[j];
            rows.push_back(row);
            if (k == 0) {
                rhs.push_back(std::log(weight * solution.dual_value / term.coefficient));
            } else {
                rhs.push_back(std::log(weight / (solution.lambda[k] * term.coefficient)));
            }
        }
    };
    add_rows(gp.objective(), 0);
    for (std::size_t k = 0; k < gp.constraints().size(); ++k) add_rows(gp.constraints()[k], k + 1);

    Eigen::MatrixXd system(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(n));
    Eigen::VectorXd target(static_cast<Eigen::Index>(rows.size()));
    for (std::size_t r = 0; r < rows.size(); ++r) {
        system.row(static_cast<Eigen::Index>(r)) = rows[r];
        target(static_cast<Eigen::Index>(r)) = rhs[r];
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(system);
    qr.setThreshold(1e-12);
    if (rows.size() < n || qr.rank() < static_cast<Eigen::Index>(n)) {
        fail(ErrorCode::RankDeficient, "the exponent rows of the positive-weight terms do not determine all " +
                                           std::to_string(n) + " variables");
    }
    const Eigen::VectorXd log_x = qr.solve(target);
    PrimalRecovery recovery;
    recovery.x = to_std(log_x.array().exp().matrix());
    recovery.residual = max_abs(system * log_x - target);
    return recovery;
}

SolutionDiagnostics verify_solution(const DeterministicGP& gp, const DualSolution& solution) {
    SolutionDiagnostics diagnostics = solution.diagnostics;
    diagnostics.primal_objective = gp.objective().evaluate(solution.primal_x);
    diagnostics.duality_gap_rel =
        std::abs(diagnostics.primal_objective - solution.dual_value) / std::abs(solution.dual_value);
    diagnostics.gap_exceeded = !(diagnostics.duality_gap_rel <= kGapTolerance);
    diagnostics.constraint_values.clear();
    diagnostics.constraint_violated = false;
    for (const auto& constraint : gp.constraints()) {
        const double value = constraint.evaluate(solution.primal_x);
        diagnostics.constraint_values.push_back(value);
        if (!(value <= 1.0 + kFeasibilityTolerance)) diagnostics.constraint_violated = true;
    }
    return diagnostics;
}

DualSolution solve_gp(const DeterministicGP& gp) {
    DualSolution solution = solve_dual(build_dual(gp));
    const PrimalRecovery recovery = recover_primal(solution, gp);
    solution.primal_x = recovery.x;
    solution.diagnostics.recovery_residual = recovery.residual;
    solution.diagnostics = verify_solution(gp, solution);
    return solution;
}

}  // namespace ugp
