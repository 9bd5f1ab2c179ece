#include "ugp/chance_gp.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace ugp {

namespace {

void check_exponents(const std::vector<UncertainTerm>& terms, std::size_t variables, const std::string& where) {
    for (std::size_t i = 0; i < terms.size(); ++i) {
        require(terms[i].exponents.size() == variables, ErrorCode::InvalidParameter,
                where + " term " + std::to_string(i + 1) + " has " + std::to_string(terms[i].exponents.size()) +
                    " exponents, expected " + std::to_string(variables));
    }
}

ReductionCriterion criterion_for(TermRef ref, const ReductionCriterion& global,
                                 const std::vector<CriterionOverride>& overrides) {
    for (const auto& o : overrides) {
        if (o.term == ref) return o.criterion;
    }
    return global;
}

std::vector<ReducedTerm> reduce_block(const std::vector<UncertainTerm>& terms, std::size_t block,
                                      const ReductionCriterion& global,
                                      const std::vector<CriterionOverride>& overrides) {
    std::vector<ReducedTerm> reduced;
    reduced.reserve(terms.size());
    for (std::size_t i = 0; i < terms.size(); ++i) {
        const auto& coefficient = terms[i].coefficient;
        require(coefficient.lo() > 0.0, ErrorCode::InvalidParameter,
                "coefficient " + std::to_string(i + 1) + " of block " + std::to_string(block) +
                    " has support starting at " + std::to_string(coefficient.lo()) +
                    "; posynomial coefficients must be positive");
        reduced.push_back({reduce(coefficient, criterion_for({block, i}, global, overrides)), terms[i].exponents});
    }
    return reduced;
}

double maybe_round(double value, std::optional<int> decimals) {
    return decimals ? round_to_decimals(value, *decimals) : value;
}

UncertainGPProblem benchmark(const std::vector<TwoFoldUV>& objective, const TwoFoldUV& constraint) {
    const std::vector<std::vector<double>> exponents = {{1, 1, 0}, {0, 1, 1}, {1, 0, 1}};
    std::vector<UncertainTerm> terms;
    for (std::size_t i = 0; i < objective.size(); ++i) terms.push_back({objective[i], exponents[i]});
    return UncertainGPProblem(std::move(terms), {{UncertainTerm{constraint, {-1, -1, -1}}}}, 3);
}

}  // namespace

UncertainGPProblem::UncertainGPProblem(std::vector<UncertainTerm> objective,
                                       std::vector<std::vector<UncertainTerm>> constraints, std::size_t variables,
                                       std::vector<std::string> names)
    : objective_(std::move(objective)),
      constraints_(std::move(constraints)),
      variables_(variables),
      names_(std::move(names)) {
    require(!objective_.empty(), ErrorCode::InvalidParameter, "the objective needs at least one term");
    check_exponents(objective_, variables_, "objective");
    for (std::size_t k = 0; k < constraints_.size(); ++k) {
        require(!constraints_[k].empty(), ErrorCode::InvalidParameter,
                "constraint " + std::to_string(k + 1) + " has no terms");
        check_exponents(constraints_[k], variables_, "constraint " + std::to_string(k + 1));
    }
    if (names_.empty()) {
        for (std::size_t j = 0; j < variables_; ++j) names_.push_back("x" + std::to_string(j + 1));
    }
    require(names_.size() == variables_, ErrorCode::InvalidParameter, "one name per variable is required");
}

std::size_t UncertainGPProblem::total_terms() const noexcept {
    return std::accumulate(constraints_.begin(), constraints_.end(), objective_.size(),
                           [](std::size_t sum, const auto& block) { return sum + block.size(); });
}

ReducedProblem reduce_problem(const UncertainGPProblem& problem, const ReductionCriterion& criterion,
                              const std::vector<CriterionOverride>& overrides) {
    ReducedProblem reduced;
    reduced.variables = problem.variables();
    reduced.objective = reduce_block(problem.objective(), 0, criterion, overrides);
    for (std::size_t k = 0; k < problem.constraints().size(); ++k) {
        reduced.constraints.push_back(reduce_block(problem.constraints()[k], k + 1, criterion, overrides));
    }
    return reduced;
}

std::vector<double> objective_coefficients(const ReducedProblem& reduced) {
    std::vector<double> values;
    values.reserve(reduced.objective.size());
    for (const auto& term : reduced.objective) values.push_back(expected_via_quadrature(term.distribution));
    return values;
}

std::vector<std::vector<double>> constraint_coefficients(const ReducedProblem& reduced, double gamma) {
    require_open_unit(gamma, "gamma");
    std::vector<std::vector<double>> values;
    for (const auto& block : reduced.constraints) {
        auto& row = values.emplace_back();
        for (const auto& term : block) row.push_back(term.distribution.inverse(gamma));
    }
    return values;
}

double round_to_decimals(double value, int decimals) {
    const double scale = std::pow(10.0, decimals);
    return std::round(value * scale) / scale;
}

DeterministicGP deterministic_form(const ReducedProblem& reduced, double gamma, std::optional<int> coefficient_decimals) {
    return deterministic_form(reduced, objective_coefficients(reduced), gamma, coefficient_decimals);
}

DeterministicGP deterministic_form(const ReducedProblem& reduced, const std::vector<double>& objective, double gamma,
                                   std::optional<int> coefficient_decimals) {
    require(objective.size() == reduced.objective.size(), ErrorCode::InvalidParameter,
            "objective coefficient count does not match the problem");
    const auto constraint_values = constraint_coefficients(reduced, gamma);
    std::vector<Term> objective_terms;
    for (std::size_t i = 0; i < objective.size(); ++i) {
        objective_terms.push_back({maybe_round(objective[i], coefficient_decimals), reduced.objective[i].exponents});
    }
    std::vector<Posynomial> constraints;
    for (std::size_t k = 0; k < reduced.constraints.size(); ++k) {
        std::vector<Term> terms;
        for (std::size_t i = 0; i < reduced.constraints[k].size(); ++i) {
            terms.push_back({maybe_round(constraint_values[k][i], coefficient_decimals),
                             reduced.constraints[k][i].exponents});
        }
        constraints.emplace_back(std::move(terms));
    }
    return DeterministicGP(Posynomial(std::move(objective_terms)), std::move(constraints), reduced.variables);
}

namespace {

SweepRow solve_reduced(const ReducedProblem& reduced, const std::vector<double>& objective, double gamma,
                       std::optional<int> decimals) {
    const DeterministicGP gp = deterministic_form(reduced, objective, gamma, decimals);
    SweepRow row;
    row.gamma = gamma;
    row.solution = solve_gp(gp);
    if (row.solution.diagnostics.gap_exceeded || row.solution.diagnostics.constraint_violated) {
        fail(ErrorCode::NonConvergence,
             "solution failed verification (relative gap " + std::to_string(row.solution.diagnostics.duality_gap_rel) +
                 ")");
    }
    row.x_star = row.solution.primal_x;
    row.delta_star = row.solution.delta;
    row.expected_objective = row.solution.diagnostics.primal_objective;
    for (const auto& term : gp.objective().terms()) row.objective_coefficients.push_back(term.coefficient);
    for (const auto& constraint : gp.constraints()) {
        auto& block = row.constraint_coefficients.emplace_back();
        for (const auto& term : constraint.terms()) block.push_back(term.coefficient);
    }
    return row;
}

}  // namespace

SweepRow solve_chance(const UncertainGPProblem& problem, const ChanceConfig& config) {
    require_open_unit(config.gamma, "gamma");
    const ReducedProblem reduced = reduce_problem(problem, config.criterion, config.overrides);
    return solve_reduced(reduced, objective_coefficients(reduced), config.gamma, config.coefficient_decimals);
}

std::vector<SweepOutcome> sweep(const UncertainGPProblem& problem, const std::vector<double>& gammas,
                                const ChanceConfig& config) {
    std::vector<SweepOutcome> outcomes;
    if (gammas.empty()) return outcomes;
    const ReducedProblem reduced = reduce_problem(problem, config.criterion, config.overrides);
    const std::vector<double> objective = objective_coefficients(reduced);
    for (const double gamma : gammas) {
        SweepOutcome outcome;
        outcome.gamma = gamma;
        try {
            require_open_unit(gamma, "gamma");
            outcome.row = solve_reduced(reduced, objective, gamma, config.coefficient_decimals);
        } catch (const Error& e) {
            outcome.error = e.code();
            outcome.message = e.what();
        }
        outcomes.push_back(std::move(outcome));
    }
    return outcomes;
}

UncertainGPProblem benchmark_triangular_problem() {
    return benchmark({TwoFoldUV::triangular(10, 20, 25, 0.5, 0.6), TwoFoldUV::triangular(30, 40, 50, 0.4, 0.6),
                      TwoFoldUV::triangular(15, 25, 30, 0.4, 0.5)},
                     TwoFoldUV::triangular(6, 8, 9, 0.5, 0.7));
}

UncertainGPProblem benchmark_trapezoidal_problem() {
    return benchmark({TwoFoldUV::trapezoidal(10, 15, 20, 25, 0.5, 0.6), TwoFoldUV::trapezoidal(30, 40, 50, 60, 0.4, 0.6),
                      TwoFoldUV::trapezoidal(15, 20, 25, 30, 0.4, 0.5)},
                     TwoFoldUV::trapezoidal(6, 7, 8, 9, 0.5, 0.7));
}

}  // namespace ugp
