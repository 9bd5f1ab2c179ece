#include "ugp/cli.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <utility>

#include "CLI11.hpp"

#include "ugp/chance_gp.hpp"
#include "ugp/problem_io.hpp"

namespace ugp::cli {

namespace {

struct CriterionOptions {
    std::string name = "expected";
    double alpha = std::numeric_limits<double>::quiet_NaN();
};

void add_criterion_options(CLI::App& command, CriterionOptions& options) {
    command.add_option("--criterion", options.name, "Reduction criterion")
        ->check(CLI::IsMember({"expected", "optimistic", "pessimistic"}));
    command.add_option("--alpha", options.alpha, "Level for the optimistic and pessimistic criteria");
}

ReductionCriterion make_criterion(const CriterionOptions& options) {
    if (options.name == "expected") return ReductionCriterion::expected();
    if (std::isnan(options.alpha)) fail(ErrorCode::ParseError, "--alpha is required for the " + options.name + " criterion");
    return options.name == "optimistic" ? ReductionCriterion::optimistic(options.alpha)
                                        : ReductionCriterion::pessimistic(options.alpha);
}

std::string criterion_label(const ReductionCriterion& criterion) {
    switch (criterion.kind()) {
        case CriticalKind::Optimistic: return "optimistic(alpha=" + format_full(criterion.alpha()) + ")";
        case CriticalKind::Pessimistic: return "pessimistic(alpha=" + format_full(criterion.alpha()) + ")";
        case CriticalKind::Expected: return "expected";
    }
    return "expected";
}

// Writes to `path`, or to `out` when the path is empty or "-".
void emit(const std::string& path, const std::string& text, std::ostream& out) {
    if (path.empty() || path == "-") {
        out << text;
        return;
    }
    std::ofstream file(path, std::ios::binary);
    if (!file) fail(ErrorCode::InvalidParameter, "cannot open output file " + path);
    file << text;
    if (!file) fail(ErrorCode::InvalidParameter, "failed writing " + path);
}

std::vector<std::string> sweep_header(std::size_t variables, std::size_t terms) {
    std::vector<std::string> header{"gamma"};
    for (std::size_t j = 0; j < variables; ++j) header.push_back("x" + std::to_string(j + 1));
    for (std::size_t i = 0; i < terms; ++i) header.push_back("delta" + std::to_string(i + 1));
    header.push_back("objective");
    return header;
}

std::vector<std::string> sweep_fields(const SweepRow& row, std::string (*format)(double)) {
    std::vector<std::string> fields{format(row.gamma)};
    for (const double x : row.x_star) fields.push_back(format(x));
    for (const double d : row.delta_star) fields.push_back(format(d));
    fields.push_back(format(row.expected_objective));
    return fields;
}

std::string fixed3(double value) { return format_fixed(value, 3); }
std::string fixed1(double value) { return format_fixed(value, 1); }

std::string sweep_csv(const UncertainGPProblem& problem, const std::vector<SweepOutcome>& outcomes) {
    std::string csv = csv_line(sweep_header(problem.variables(), problem.total_terms()));
    for (const auto& outcome : outcomes) {
        if (outcome.ok()) {
            csv += csv_line(sweep_fields(*outcome.row, format_full));
        } else {
            csv += "# gamma=" + format_full(outcome.gamma) + " error=" + std::string(to_string(*outcome.error)) + ": " +
                   outcome.message + "\n";
        }
    }
    return csv;
}

std::string sweep_table(const UncertainGPProblem& problem, const std::vector<SweepOutcome>& outcomes) {
    const auto header = sweep_header(problem.variables(), problem.total_terms());
    std::ostringstream table;
    for (const auto& name : header) table << std::setw(name == "gamma" ? 5 : 10) << name;
    table << '\n';
    for (const auto& outcome : outcomes) {
        if (!outcome.ok()) {
            table << std::setw(5) << fixed1(outcome.gamma) << "  " << to_string(*outcome.error) << ": "
                  << outcome.message << '\n';
            continue;
        }
        const auto fields = sweep_fields(*outcome.row, fixed3);
        table << std::setw(5) << fixed1(outcome.gamma);
        for (std::size_t i = 1; i < fields.size(); ++i) table << std::setw(10) << fields[i];
        table << '\n';
    }
    return table.str();
}

std::string coefficient_name(std::size_t block, std::size_t term) {
    if (block == 0) return "obj" + std::to_string(term + 1);
    return "con" + std::to_string(block) + "_" + std::to_string(term + 1);
}

int cmd_reduce(const std::string& file, const CriterionOptions& options, std::size_t samples, const std::string& output,
               std::ostream& out) {
    const UncertainGPProblem problem = load_problem(file);
    const ReducedProblem reduced = reduce_problem(problem, make_criterion(options));
    std::vector<std::string> header;
    std::vector<std::vector<CurvePoint>> curves;
    const auto add = [&](const std::vector<ReducedTerm>& block, std::size_t k) {
        for (std::size_t i = 0; i < block.size(); ++i) {
            const std::string name = coefficient_name(k, i);
            header.push_back(name + "_x");
            header.push_back(name + "_phi");
            curves.push_back(sample_curve(block[i].distribution, samples));
        }
    };
    add(reduced.objective, 0);
    for (std::size_t k = 0; k < reduced.constraints.size(); ++k) add(reduced.constraints[k], k + 1);

    std::string csv = csv_line(header);
    for (std::size_t s = 0; s < samples; ++s) {
        std::vector<std::string> fields;
        for (const auto& curve : curves) {
            fields.push_back(format_full(curve[s].x));
            fields.push_back(format_full(curve[s].value));
        }
        csv += csv_line(fields);
    }
    emit(output, csv, out);
    return kExitOk;
}

int cmd_solve(const std::string& file, double gamma, const CriterionOptions& options, int decimals,
              const std::string& output, std::ostream& out) {
    const UncertainGPProblem problem = load_problem(file);
    ChanceConfig config;
    config.gamma = gamma;
    config.criterion = make_criterion(options);
    if (decimals >= 0) config.coefficient_decimals = decimals;
    const SweepRow row = solve_chance(problem, config);
    const auto& d = row.solution.diagnostics;

    std::ostringstream report;
    report << "gamma: " << format_full(gamma) << '\n';
    report << "criterion: " << criterion_label(config.criterion) << '\n';
    report << "objective coefficients:";
    for (const double b : row.objective_coefficients) report << ' ' << format_full(b);
    report << '\n';
    for (std::size_t k = 0; k < row.constraint_coefficients.size(); ++k) {
        report << "constraint " << k + 1 << " coefficients:";
        for (const double b : row.constraint_coefficients[k]) report << ' ' << format_full(b);
        report << '\n';
    }
    for (std::size_t j = 0; j < row.x_star.size(); ++j) {
        report << problem.names()[j] << "* = " << format_full(row.x_star[j]) << '\n';
    }
    report << "delta* =";
    for (const double w : row.delta_star) report << ' ' << format_full(w);
    report << '\n';
    report << "E[f0(x*)] = " << format_full(row.expected_objective) << '\n';
    report << "dual value = " << format_full(row.solution.dual_value) << '\n';
    report << "relative duality gap = " << format_full(d.duality_gap_rel) << '\n';
    for (std::size_t k = 0; k < d.constraint_values.size(); ++k) {
        report << "f" << k + 1 << "(x*) - 1 = " << format_full(d.constraint_values[k] - 1.0) << '\n';
    }
    report << "dual residual = " << format_full(d.linear_residual) << '\n';
    report << "recovery residual = " << format_full(d.recovery_residual) << '\n';
    out << report.str();

    std::string csv = csv_line(sweep_header(problem.variables(), problem.total_terms()));
    csv += csv_line(sweep_fields(row, format_full));
    emit(output, csv, out);
    return kExitOk;
}

int cmd_sweep(const std::string& file, const std::string& grid, const CriterionOptions& options, int decimals,
              const std::string& output, std::ostream& out, std::ostream& err) {
    const UncertainGPProblem problem = load_problem(file);
    const std::vector<double> gammas = parse_grid(grid);
    ChanceConfig config;
    config.criterion = make_criterion(options);
    if (decimals >= 0) config.coefficient_decimals = decimals;
    const auto outcomes = sweep(problem, gammas, config);
    emit(output, sweep_csv(problem, outcomes), out);
    if (!output.empty() && output != "-") out << sweep_table(problem, outcomes);

    std::optional<ErrorCode> first_error;
    bool any_ok = false;
    for (const auto& outcome : outcomes) {
        any_ok = any_ok || outcome.ok();
        if (!outcome.ok()) {
            err << "gamma " << format_full(outcome.gamma) << ": " << to_string(*outcome.error) << ": "
                << outcome.message << '\n';
            if (!first_error) first_error = outcome.error;
        }
    }
    if (outcomes.empty() || any_ok) return kExitOk;
    return exit_code_for(*first_error);
}

int cmd_tables(const std::string& directory, int decimals, bool full_precision, std::ostream& out) {
    std::filesystem::create_directories(directory);
    ChanceConfig config;
    if (!full_precision) config.coefficient_decimals = decimals;
    const std::vector<double> gammas = parse_grid("0.1:0.9:0.1");
    const std::pair<const char*, UncertainGPProblem> cases[] = {
        {"table1.csv", benchmark_triangular_problem()},
        {"table2.csv", benchmark_trapezoidal_problem()},
    };
    int status = kExitOk;
    for (const auto& [name, problem] : cases) {
        const auto outcomes = sweep(problem, gammas, config);
        const std::string path = (std::filesystem::path(directory) / name).string();
        emit(path, sweep_csv(problem, outcomes), out);
        out << name << '\n' << sweep_table(problem, outcomes) << '\n';
        for (const auto& outcome : outcomes) {
            if (!outcome.ok()) status = exit_code_for(*outcome.error);
        }
    }
    return status;
}

}  // namespace

int exit_code_for(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::ParseError: return kExitParse;
        case ErrorCode::DegreeOfDifficultyNegative: return kExitDifficulty;
        case ErrorCode::NonConvergence:
        case ErrorCode::QuadratureNonConvergence: return kExitConvergence;
        case ErrorCode::InvalidParameter:
        case ErrorCode::AlphaOutOfRange:
        case ErrorCode::YOutOfRange:
        case ErrorCode::InfeasibleDual:
        case ErrorCode::RankDeficient: return kExitDomain;
    }
    return kExitDomain;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Geometric programming with two-fold uncertain coefficients", "ugp"};
    app.require_subcommand(1);

    std::string file;
    std::string output;
    CriterionOptions criterion;
    std::size_t samples = 1000;
    double gamma = 0.5;
    int decimals = -1;
    std::string grid = "0.1:0.9:0.1";
    std::string directory = ".";
    int table_decimals = 3;
    bool full_precision = false;

    auto* reduce_cmd = app.add_subcommand("reduce", "Sample the reduced distribution of every coefficient");
    reduce_cmd->add_option("file", file, "Problem file (JSON)")->required();
    add_criterion_options(*reduce_cmd, criterion);
    reduce_cmd->add_option("--samples", samples, "Points per curve")->check(CLI::Range(2, 10000000));
    reduce_cmd->add_option("-o,--output", output, "CSV output path (default stdout)");

    auto* solve_cmd = app.add_subcommand("solve", "Solve at one confidence level");
    solve_cmd->add_option("file", file, "Problem file (JSON)")->required();
    solve_cmd->add_option("--gamma", gamma, "Confidence level in (0,1)")->required();
    add_criterion_options(*solve_cmd, criterion);
    solve_cmd->add_option("--coef-decimals", decimals, "Round deterministic coefficients to this many decimals");
    solve_cmd->add_option("-o,--output", output, "CSV output path (default stdout)");

    auto* sweep_cmd = app.add_subcommand("sweep", "Solve over a grid of confidence levels");
    sweep_cmd->add_option("file", file, "Problem file (JSON)")->required();
    sweep_cmd->add_option("--gammas", grid, "start:stop:step or a comma separated list");
    add_criterion_options(*sweep_cmd, criterion);
    sweep_cmd->add_option("--coef-decimals", decimals, "Round deterministic coefficients to this many decimals");
    sweep_cmd->add_option("-o,--output", output, "CSV output path (default stdout)");

    auto* tables_cmd = app.add_subcommand("tables", "Write table1.csv and table2.csv for the bundled benchmarks");
    tables_cmd->add_option("--outdir", directory, "Output directory");
    tables_cmd->add_option("--coef-decimals", table_decimals, "Coefficient rounding used for the tables")
        ->check(CLI::Range(0, 15));
    tables_cmd->add_flag("--full-precision", full_precision, "Do not round coefficients");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        std::ostringstream help_out;
        std::ostringstream help_err;
        const int code = app.exit(e, help_out, help_err);
        out << help_out.str();
        err << help_err.str();
        return code == 0 ? kExitOk : kExitParse;
    }

    try {
        if (reduce_cmd->parsed()) return cmd_reduce(file, criterion, samples, output, out);
        if (solve_cmd->parsed()) return cmd_solve(file, gamma, criterion, decimals, output, out);
        if (sweep_cmd->parsed()) return cmd_sweep(file, grid, criterion, decimals, output, out, err);
        return cmd_tables(directory, table_decimals, full_precision, out);
    } catch (const Error& e) {
        err << "error: " << to_string(e.code()) << ": " << e.what() << '\n';
        return exit_code_for(e.code());
    } catch (const std::filesystem::filesystem_error& e) {
        err << "error: " << e.what() << '\n';
        return kExitDomain;
    }
}

}  // namespace ugp::cli
