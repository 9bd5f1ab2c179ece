#include <catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "approx.hpp"
#include "oracles.hpp"
#include "ugp/cli.hpp"
#include "ugp/problem_io.hpp"

using namespace ugp;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result run_cli(std::vector<std::string> args) {
    std::ostringstream out;
    std::ostringstream err;
    const int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

std::string data_file(const char* name) { return (std::filesystem::path(UGP_DATA_DIR) / name).string(); }

class TempDir {
public:
    TempDir() {
        path_ = std::filesystem::temp_directory_path() /
                ("ugp_test_" + std::to_string(reinterpret_cast<std::uintptr_t>(this)));
        std::filesystem::remove_all(path_);
        std::filesystem::create_directories(path_);
    }
    ~TempDir() { std::filesystem::remove_all(path_); }
    [[nodiscard]] std::string file(const std::string& name, const std::string& content = {}) const {
        const auto p = path_ / name;
        if (!content.empty()) std::ofstream(p) << content;
        return p.string();
    }
    [[nodiscard]] const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::vector<std::string> fields;
        std::istringstream ls(line);
        std::string field;
        while (std::getline(ls, field, ',')) fields.push_back(field);
        rows.push_back(fields);
    }
    return rows;
}

const char* kSingleTri = R"({"variables": ["x"],
  "objective": [{"family": "tri", "params": [2, 4, 5], "theta_l": 0.5, "theta_r": 0.6, "exponents": {"x": 1}}],
  "constraints": []})";

}  // namespace

TEST_CASE("bundled data files equal the built-in benchmarks") {
    CHECK(problem_to_json(load_problem(data_file("case1_triangular.json"))) ==
          problem_to_json(benchmark_triangular_problem()));
    CHECK(problem_to_json(load_problem(data_file("case2_trapezoidal.json"))) ==
          problem_to_json(benchmark_trapezoidal_problem()));
}

TEST_CASE("parse errors carry the JSON path") {
    try {
        (void)parse_problem(R"({"variables": ["x"], "objective": [{"family": "tri", "params": [1, 2],
            "theta_l": 0, "theta_r": 0}], "constraints": []})");
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::ParseError);
        CHECK(std::string(e.what()).find("$.objective[0].params") != std::string::npos);
    }
    try {
        (void)parse_problem(R"({"variables": ["x"], "objective": [{"family": "tri", "params": [1, 2, 3],
            "theta_l": 1.5, "theta_r": 0, "exponents": {}}], "constraints": []})");
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::InvalidParameter);
    }
    CHECK_THROWS_AS(parse_problem("{"), Error);
    CHECK_THROWS_AS(parse_problem(R"({"variables": ["x"], "objective": [{"family": "tri", "params": [1, 2, 3],
            "theta_l": 0, "theta_r": 0, "exponents": {"y": 1}}], "constraints": []})"),
                    Error);
}

TEST_CASE("problem files round-trip through JSON") {
    const auto problem = benchmark_trapezoidal_problem();
    CHECK(problem_to_json(parse_problem(problem_to_json(problem))) == problem_to_json(problem));
}

TEST_CASE("number and CSV formatting") {
    CHECK(format_full(0.1) == "0.10000000000000001");
    CHECK(std::stod(format_full(1.0 / 3.0)) == 1.0 / 3.0);
    CHECK(format_fixed(2.9304, 3) == "2.930");
    CHECK(format_fixed(-0.0001, 3) == "0.000");
    CHECK(csv_field("plain") == "plain");
    CHECK(csv_field("a,b") == "\"a,b\"");
    CHECK(csv_field("say \"hi\"") == "\"say \"\"hi\"\"\"");
    CHECK(csv_line({"a", "b"}) == "a,b\n");
}

TEST_CASE("grid specifications") {
    const auto grid = parse_grid("0.1:0.9:0.1");
    REQUIRE(grid.size() == 9);
    CHECK(grid[2] == 0.3);
    CHECK(grid.back() == 0.9);
    CHECK(parse_grid("0.25, 0.5") == std::vector<double>{0.25, 0.5});
    CHECK(parse_grid("").empty());
    CHECK_THROWS_AS(parse_grid("0.1:0.9"), Error);
    CHECK_THROWS_AS(parse_grid("abc"), Error);
}

TEST_CASE("exit codes") {
    TempDir dir;
    CHECK(run_cli({"solve", dir.file("bad.json", "{ not json"), "--gamma", "0.5"}).code == 2);
    CHECK(run_cli({"solve", dir.file("missing.json"), "--gamma", "0.5"}).code == 2);
    CHECK(run_cli({"solve", dir.file("schema.json", R"({"objective": 3})"), "--gamma", "0.5"}).code == 2);
    CHECK(run_cli({"frobnicate"}).code == 2);
    CHECK(run_cli({"reduce", data_file("case1_triangular.json"), "--criterion", "optimistic"}).code == 2);
    CHECK(run_cli({"solve", data_file("case1_triangular.json"), "--gamma", "1.5"}).code == 3);
    CHECK(run_cli({"reduce", data_file("case1_triangular.json"), "--criterion", "optimistic", "--alpha", "0"}).code ==
          3);
    const std::string params = dir.file("params.json", R"({"variables": ["x"],
        "objective": [{"family": "tri", "params": [3, 2, 4], "theta_l": 0, "theta_r": 0, "exponents": {"x": 1}}],
        "constraints": []})");
    CHECK(run_cli({"solve", params, "--gamma", "0.5"}).code == 3);
    // Three monomials in three variables with no constraint: negative difficulty.
    const std::string negative = dir.file("negative.json", R"({"variables": ["x", "y", "z"],
        "objective": [
          {"family": "tri", "params": [1, 2, 3], "theta_l": 0, "theta_r": 0, "exponents": {"x": 1}},
          {"family": "tri", "params": [1, 2, 3], "theta_l": 0, "theta_r": 0, "exponents": {"y": 1}},
          {"family": "tri", "params": [1, 2, 3], "theta_l": 0, "theta_r": 0, "exponents": {"z": 1}}],
        "constraints": []})");
    const auto r = run_cli({"solve", negative, "--gamma", "0.5"});
    CHECK(r.code == 4);
    CHECK(r.err.find("DegreeOfDifficultyNegative") != std::string::npos);
    CHECK(run_cli({"--help"}).code == 0);
}

TEST_CASE("reduce writes every curve and passes through the worked value") {
    TempDir dir;
    const auto r = run_cli({"reduce", dir.file("one.json", kSingleTri), "--samples", "4"});
    REQUIRE(r.code == 0);
    const auto rows = parse_csv(r.out);
    REQUIRE(rows.size() == 5);
    CHECK(rows[0] == std::vector<std::string>{"obj1_x", "obj1_phi"});
    CHECK(std::stod(rows[1][0]) == 2.0);
    CHECK(std::stod(rows[2][0]) == 3.0);
    CHECK(std::stod(rows[2][1]) == near(0.175, 1e-15));
    CHECK(std::stod(rows[4][1]) == 1.0);

    const auto all = run_cli({"reduce", data_file("case1_triangular.json"), "--samples", "50"});
    REQUIRE(all.code == 0);
    const auto table = parse_csv(all.out);
    CHECK(table[0].size() == 8);
    CHECK(table[0][6] == "con1_1_x");
    CHECK(table.size() == 51);
}

TEST_CASE("reduce with zero degrees reproduces the base distribution") {
    TempDir dir;
    const auto r = run_cli({"reduce",
                            dir.file("flat.json", R"({"variables": ["x"], "objective": [{"family": "tri",
                                "params": [2, 4, 5], "theta_l": 0, "theta_r": 0, "exponents": {"x": 1}}]})"),
                            "--criterion", "pessimistic", "--alpha", "0.3", "--samples", "301"});
    REQUIRE(r.code == 0);
    const auto rows = parse_csv(r.out);
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const double x = std::stod(rows[i][0]);
        CHECK(std::stod(rows[i][1]) == near(oracle::tri_cdf(2, 4, 5, x), 1e-14));
    }
}

TEST_CASE("optimistic at one half matches the expected-value curve") {
    const auto file = data_file("case2_trapezoidal.json");
    const auto half = run_cli({"reduce", file, "--criterion", "optimistic", "--alpha", "0.5", "--samples", "200"});
    const auto exp = run_cli({"reduce", file, "--samples", "200"});
    REQUIRE(half.code == 0);
    const auto a = parse_csv(half.out);
    const auto b = parse_csv(exp.out);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 1; i < a.size(); ++i) {
        for (std::size_t j = 0; j < a[i].size(); ++j) CHECK(std::stod(a[i][j]) == near(std::stod(b[i][j]), 1e-12));
    }
}

TEST_CASE("solve prints the report and the result row") {
    TempDir dir;
    const std::string out = dir.file("row.csv");
    const auto r = run_cli({"solve", data_file("case1_triangular.json"), "--gamma", "0.1", "--coef-decimals", "3",
                            "-o", out});
    REQUIRE(r.code == 0);
    CHECK(r.out.find("x1* = ") != std::string::npos);
    CHECK(r.out.find("relative duality gap") != std::string::npos);
    const auto rows = parse_csv(slurp(out));
    REQUIRE(rows.size() == 2);
    CHECK(rows[0] == std::vector<std::string>{"gamma", "x1", "x2", "x3", "delta1", "delta2", "delta3", "delta4",
                                              "objective"});
    CHECK(std::stod(rows[1][8]) == near(oracle::triangular_table()[0][8], 1e-2));
}

TEST_CASE("an x + 1/x program solves to 2") {
    TempDir dir;
    const std::string file = dir.file("amgm.json", R"({"variables": ["x"], "objective": [
        {"family": "tri", "params": [1, 2, 3], "theta_l": 0.3, "theta_r": 0.3, "exponents": {"x": 1}},
        {"family": "tri", "params": [1, 2, 3], "theta_l": 0.3, "theta_r": 0.3, "exponents": {"x": -1}}]})");
    const auto r = run_cli({"solve", file, "--gamma", "0.5"});
    REQUIRE(r.code == 0);
    const auto rows = parse_csv(r.out.substr(r.out.find("gamma,")));
    CHECK(std::stod(rows[1][1]) == near(1.0, 1e-9));
    CHECK(std::stod(rows[1][4]) == near(4.0, 1e-9));
}

TEST_CASE("sweep output is deterministic and handles an empty grid") {
    const auto file = data_file("case2_trapezoidal.json");
    const auto a = run_cli({"sweep", file});
    const auto b = run_cli({"sweep", file});
    REQUIRE(a.code == 0);
    CHECK(a.out == b.out);
    const auto rows = parse_csv(a.out);
    CHECK(rows.size() == 10);
    const auto empty = run_cli({"sweep", file, "--gammas", ""});
    CHECK(empty.code == 0);
    CHECK(parse_csv(empty.out).size() == 1);
    const auto partial = run_cli({"sweep", file, "--gammas", "0.5,1.2"});
    CHECK(partial.code == 0);
    CHECK(partial.out.find("# gamma=1.2 error=AlphaOutOfRange") != std::string::npos);
    CHECK(run_cli({"sweep", file, "--gammas", "1.2"}).code == 3);
}

TEST_CASE("tables command writes both benchmark tables") {
    TempDir dir;
    const auto r = run_cli({"tables", "--outdir", dir.path().string()});
    REQUIRE(r.code == 0);
    const auto t1 = parse_csv(slurp((dir.path() / "table1.csv").string()));
    const auto t2 = parse_csv(slurp((dir.path() / "table2.csv").string()));
    REQUIRE(t1.size() == 10);
    REQUIRE(t2.size() == 10);
    for (std::size_t i = 0; i < 9; ++i) {
        CHECK(std::stod(t1[i + 1][8]) == near(oracle::triangular_table()[i][8], 1e-2));
    }
    CHECK(run_cli({"tables", "--outdir", dir.path().string(), "--coef-decimals", "99"}).code == 2);
}
