#pragma once

// JSON problem files and CSV formatting.
//
// Problem file layout:
//   {
//     "variables": ["x1", "x2"],
//     "objective": [ term, ... ],
//     "constraints": [ [ term, ... ], ... ]
//   }
//   term = {"family": "tri" | "tra", "params": [a, b, c(, d)],
//           "theta_l": t, "theta_r": t, "exponents": {"x1": 1, ...}}
// Variables missing from "exponents" get exponent 0.

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "ugp/chance_gp.hpp"

namespace ugp {

/// Syntax and schema problems throw ParseError; invalid parameter values
/// throw InvalidParameter. Messages start with the JSON path of the field.
[[nodiscard]] UncertainGPProblem parse_problem(std::string_view text);
[[nodiscard]] UncertainGPProblem load_problem(const std::filesystem::path& path);
[[nodiscard]] std::string problem_to_json(const UncertainGPProblem& problem);

/// 17 significant digits, '.' decimal point.
[[nodiscard]] std::string format_full(double value);
/// Fixed-point with `decimals` digits, '.' decimal point.
[[nodiscard]] std::string format_fixed(double value, int decimals);
/// Quotes a field when it contains a comma, quote, CR or LF.
[[nodiscard]] std::string csv_field(std::string_view field);
[[nodiscard]] std::string csv_line(const std::vector<std::string>& fields);

/// "start:stop:step" (inclusive stop) or a comma separated list; "" is empty.
[[nodiscard]] std::vector<double> parse_grid(std::string_view spec);

}  // namespace ugp
