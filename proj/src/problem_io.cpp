#include "ugp/problem_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "ugp/error.hpp"

namespace ugp {

namespace {

using nlohmann::json;

[[noreturn]] void schema_error(const std::string& path, const std::string& message) {
    fail(ErrorCode::ParseError, path + ": " + message);
}

const json& member(const json& object, const char* key, const std::string& path) {
    const auto it = object.find(key);
    if (it == object.end()) schema_error(path, std::string("missing field \"") + key + "\"");
    return *it;
}

double number(const json& value, const std::string& path) {
    if (!value.is_number()) schema_error(path, "expected a number");
    return value.get<double>();
}

UncertainTerm parse_term(const json& term, const std::vector<std::string>& names, const std::string& path) {
    if (!term.is_object()) schema_error(path, "expected an object");
    const json& family = member(term, "family", path);
    if (!family.is_string()) schema_error(path + ".family", "expected \"tri\" or \"tra\"");
    const std::string tag = family.get<std::string>();
    if (tag != "tri" && tag != "tra") schema_error(path + ".family", "expected \"tri\" or \"tra\", got \"" + tag + "\"");

    const json& params_json = member(term, "params", path);
    if (!params_json.is_array()) schema_error(path + ".params", "expected an array");
    const std::size_t expected_size = tag == "tri" ? 3 : 4;
    if (params_json.size() != expected_size) {
        schema_error(path + ".params", "expected " + std::to_string(expected_size) + " values, got " +
                                           std::to_string(params_json.size()));
    }
    std::vector<double> params;
    for (std::size_t i = 0; i < params_json.size(); ++i) {
        params.push_back(number(params_json[i], path + ".params[" + std::to_string(i) + "]"));
    }
    const double theta_l = number(member(term, "theta_l", path), path + ".theta_l");
    const double theta_r = number(member(term, "theta_r", path), path + ".theta_r");

    std::vector<double> exponents(names.size(), 0.0);
    const json& exponents_json = member(term, "exponents", path);
    if (!exponents_json.is_object()) schema_error(path + ".exponents", "expected an object");
    for (const auto& [key, value] : exponents_json.items()) {
        const auto it = std::find(names.begin(), names.end(), key);
        if (it == names.end()) schema_error(path + ".exponents." + key, "not a declared variable");
        exponents[static_cast<std::size_t>(it - names.begin())] = number(value, path + ".exponents." + key);
    }

    try {
        auto coefficient = tag == "tri" ? TwoFoldUV::triangular(params[0], params[1], params[2], theta_l, theta_r)
                                        : TwoFoldUV::trapezoidal(params[0], params[1], params[2], params[3], theta_l,
                                                                 theta_r);
        return UncertainTerm{std::move(coefficient), std::move(exponents)};
    } catch (const Error& e) {
        fail(e.code(), path + ": " + e.what());
    }
}

std::vector<UncertainTerm> parse_block(const json& block, const std::vector<std::string>& names,
                                       const std::string& path) {
    if (!block.is_array()) schema_error(path, "expected an array of terms");
    std::vector<UncertainTerm> terms;
    for (std::size_t i = 0; i < block.size(); ++i) {
        terms.push_back(parse_term(block[i], names, path + "[" + std::to_string(i) + "]"));
    }
    return terms;
}

json term_to_json(const UncertainTerm& term, const std::vector<std::string>& names) {
    json exponents = json::object();
    for (std::size_t j = 0; j < names.size(); ++j) {
        if (term.exponents[j] != 0.0) exponents[names[j]] = term.exponents[j];
    }
    const auto& c = term.coefficient;
    return json{{"family", c.family() == TwoFoldFamily::Triangular ? "tri" : "tra"},
                {"params", c.params()},
                {"theta_l", c.theta_l()},
                {"theta_r", c.theta_r()},
                {"exponents", exponents}};
}

}  // namespace

UncertainGPProblem parse_problem(std::string_view text) {
    json document;
    try {
        document = json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        fail(ErrorCode::ParseError, std::string("invalid JSON: ") + e.what());
    }
    if (!document.is_object()) schema_error("$", "expected an object");

    const json& variables = member(document, "variables", "$");
    if (!variables.is_array() || variables.empty()) schema_error("$.variables", "expected a non-empty array of names");
    std::vector<std::string> names;
    for (std::size_t j = 0; j < variables.size(); ++j) {
        if (!variables[j].is_string()) schema_error("$.variables[" + std::to_string(j) + "]", "expected a string");
        const std::string name = variables[j].get<std::string>();
        if (std::find(names.begin(), names.end(), name) != names.end()) {
            schema_error("$.variables[" + std::to_string(j) + "]", "duplicate variable \"" + name + "\"");
        }
        names.push_back(name);
    }

    auto objective = parse_block(member(document, "objective", "$"), names, "$.objective");
    if (objective.empty()) schema_error("$.objective", "at least one term is required");

    std::vector<std::vector<UncertainTerm>> constraints;
    if (const auto it = document.find("constraints"); it != document.end()) {
        if (!it->is_array()) schema_error("$.constraints", "expected an array of blocks");
        for (std::size_t k = 0; k < it->size(); ++k) {
            const std::string path = "$.constraints[" + std::to_string(k) + "]";
            auto block = parse_block((*it)[k], names, path);
            if (block.empty()) schema_error(path, "at least one term is required");
            constraints.push_back(std::move(block));
        }
    }
    const std::size_t n = names.size();
    return UncertainGPProblem(std::move(objective), std::move(constraints), n, std::move(names));
}

UncertainGPProblem load_problem(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorCode::ParseError, "cannot open problem file " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_problem(buffer.str());
}

std::string problem_to_json(const UncertainGPProblem& problem) {
    json objective = json::array();
    for (const auto& term : problem.objective()) objective.push_back(term_to_json(term, problem.names()));
    json constraints = json::array();
    for (const auto& block : problem.constraints()) {
        json terms = json::array();
        for (const auto& term : block) terms.push_back(term_to_json(term, problem.names()));
        constraints.push_back(terms);
    }
    const json document{{"variables", problem.names()}, {"objective", objective}, {"constraints", constraints}};
    return document.dump(2) + "\n";
}

std::string format_full(double value) {
    char buffer[64];
    const auto result = std::to_chars(buffer, buffer + sizeof buffer, value, std::chars_format::general, 17);
    return std::string(buffer, result.ptr);
}

std::string format_fixed(double value, int decimals) {
    char buffer[64];
    const auto result = std::to_chars(buffer, buffer + sizeof buffer, value, std::chars_format::fixed, decimals);
    std::string text(buffer, result.ptr);
    // Avoid "-0.000" for values that round to zero.
    if (text.front() == '-' && text.find_first_not_of("-0.") == std::string::npos) text.erase(0, 1);
    return text;
}

std::string csv_field(std::string_view field) {
    if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
    std::string quoted = "\"";
    for (const char ch : field) {
        if (ch == '"') quoted += '"';
        quoted += ch;
    }
    quoted += '"';
    return quoted;
}

std::string csv_line(const std::vector<std::string>& fields) {
    std::string line;
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i > 0) line += ',';
        line += csv_field(fields[i]);
    }
    line += '\n';
    return line;
}

namespace {

double parse_double(std::string_view token, std::string_view spec) {
    while (!token.empty() && token.front() == ' ') token.remove_prefix(1);
    while (!token.empty() && token.back() == ' ') token.remove_suffix(1);
    double value = 0.0;
    const auto result = std::from_chars(token.data(), token.data() + token.size(), value);
    if (token.empty() || result.ec != std::errc() || result.ptr != token.data() + token.size()) {
        fail(ErrorCode::ParseError, "invalid number \"" + std::string(token) + "\" in grid \"" + std::string(spec) + "\"");
    }
    return value;
}

}  // namespace

std::vector<double> parse_grid(std::string_view spec) {
    std::vector<double> values;
    if (spec.find_first_not_of(' ') == std::string_view::npos) return values;
    if (spec.find(':') != std::string_view::npos) {
        const auto first = spec.find(':');
        const auto second = spec.find(':', first + 1);
        if (second == std::string_view::npos || spec.find(':', second + 1) != std::string_view::npos) {
            fail(ErrorCode::ParseError, "range grid must be start:stop:step, got \"" + std::string(spec) + "\"");
        }
        const double start = parse_double(spec.substr(0, first), spec);
        const double stop = parse_double(spec.substr(first + 1, second - first - 1), spec);
        const double step = parse_double(spec.substr(second + 1), spec);
        if (!(step > 0.0)) fail(ErrorCode::ParseError, "grid step must be positive");
        if (stop < start) return values;
        const auto count = static_cast<long>(std::floor((stop - start) / step + 1e-9)) + 1;
        for (long i = 0; i < count; ++i) {
            // Snap to 12 decimals so 0.1:0.9:0.1 yields 0.3 rather than 0.30000000000000004.
            values.push_back(std::round((start + static_cast<double>(i) * step) * 1e12) / 1e12);
        }
        return values;
    }
    std::size_t begin = 0;
    while (begin <= spec.size()) {
        const auto end = std::min(spec.find(',', begin), spec.size());
        values.push_back(parse_double(spec.substr(begin, end - begin), spec));
        begin = end + 1;
    }
    return values;
}

}  // namespace ugp
