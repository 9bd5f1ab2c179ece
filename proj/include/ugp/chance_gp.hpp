#pragma once

// Geometric programs whose coefficients are two-fold uncertain variables.
//
// Each coefficient is reduced to a single-fold distribution. The objective is
// replaced by its expected value and every chance constraint M{f_k <= 1} >= gamma
// by the posynomial whose coefficients are the reduced inverses at gamma.
// The resulting deterministic program is solved through its dual.

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "ugp/error.hpp"
#include "ugp/gp_solver.hpp"
#include "ugp/twofold.hpp"
#include "ugp/uncert_core.hpp"

namespace ugp {

struct UncertainTerm {
    TwoFoldUV coefficient;
    std::vector<double> exponents;
};

class UncertainGPProblem {
public:
    /// Empty `names` defaults to x1..xn.
    UncertainGPProblem(std::vector<UncertainTerm> objective, std::vector<std::vector<UncertainTerm>> constraints,
                       std::size_t variables, std::vector<std::string> names = {});

    [[nodiscard]] const std::vector<UncertainTerm>& objective() const noexcept { return objective_; }
    [[nodiscard]] const std::vector<std::vector<UncertainTerm>>& constraints() const noexcept { return constraints_; }
    [[nodiscard]] std::size_t variables() const noexcept { return variables_; }
    [[nodiscard]] const std::vector<std::string>& names() const noexcept { return names_; }
    [[nodiscard]] std::size_t total_terms() const noexcept;

private:
    std::vector<UncertainTerm> objective_;
    std::vector<std::vector<UncertainTerm>> constraints_;
    std::size_t variables_;
    std::vector<std::string> names_;
};

/// Addresses one coefficient: block 0 is the objective, block k the k-th constraint.
struct TermRef {
    std::size_t block;
    std::size_t term;
    friend bool operator==(const TermRef&, const TermRef&) = default;
};

/// Experimental: a different criterion for a single coefficient.
struct CriterionOverride {
    TermRef term;
    ReductionCriterion criterion;
};

struct ChanceConfig {
    double gamma = 0.5;
    ReductionCriterion criterion = ReductionCriterion::expected();
    /// Round every deterministic coefficient to this many decimals before solving.
    std::optional<int> coefficient_decimals;
    std::vector<CriterionOverride> overrides;
};

struct ReducedTerm {
    PiecewiseUD distribution;
    std::vector<double> exponents;
};

struct ReducedProblem {
    std::vector<ReducedTerm> objective;
    std::vector<std::vector<ReducedTerm>> constraints;
    std::size_t variables = 0;
};

/// Rejects coefficients whose support reaches zero or below.
[[nodiscard]] ReducedProblem reduce_problem(const UncertainGPProblem& problem, const ReductionCriterion& criterion,
                                            const std::vector<CriterionOverride>& overrides = {});

/// Expected values of the reduced objective coefficients.
[[nodiscard]] std::vector<double> objective_coefficients(const ReducedProblem& reduced);

/// Reduced inverses at gamma, one vector per constraint block.
[[nodiscard]] std::vector<std::vector<double>> constraint_coefficients(const ReducedProblem& reduced, double gamma);

[[nodiscard]] double round_to_decimals(double value, int decimals);

[[nodiscard]] DeterministicGP deterministic_form(const ReducedProblem& reduced, double gamma,
                                                 std::optional<int> coefficient_decimals = std::nullopt);

/// Assembles the deterministic program from precomputed objective coefficients.
[[nodiscard]] DeterministicGP deterministic_form(const ReducedProblem& reduced, const std::vector<double>& objective,
                                                 double gamma, std::optional<int> coefficient_decimals = std::nullopt);

struct SweepRow {
    double gamma = 0.0;
    std::vector<double> x_star;
    std::vector<double> delta_star;
    double expected_objective = 0.0;
    std::vector<double> objective_coefficients;
    std::vector<std::vector<double>> constraint_coefficients;
    DualSolution solution;
};

[[nodiscard]] SweepRow solve_chance(const UncertainGPProblem& problem, const ChanceConfig& config);

struct SweepOutcome {
    double gamma = 0.0;
    std::optional<SweepRow> row;
    std::optional<ErrorCode> error;
    std::string message;

    [[nodiscard]] bool ok() const noexcept { return row.has_value(); }
};

/// One outcome per gamma in input order; a failing gamma does not stop the sweep.
/// `config.gamma` is ignored.
[[nodiscard]] std::vector<SweepOutcome> sweep(const UncertainGPProblem& problem, const std::vector<double>& gammas,
                                              const ChanceConfig& config);

/// The two benchmark programs: minimize b1 x1x2 + b2 x2x3 + b3 x1x3 subject to
/// b4 / (x1x2x3) <= 1, with triangular or trapezoidal two-fold coefficients.
[[nodiscard]] UncertainGPProblem benchmark_triangular_problem();
[[nodiscard]] UncertainGPProblem benchmark_trapezoidal_problem();

}  // namespace ugp
