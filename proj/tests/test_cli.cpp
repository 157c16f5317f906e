#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "bcinv/cli.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

fs::path scratch(const std::string& name) {
    const auto dir = fs::temp_directory_path() / ("bcinv_cli_test_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

int invoke(std::initializer_list<std::string> args) {
    std::vector<std::string> owned{"bcinv"};
    owned.insert(owned.end(), args.begin(), args.end());
    std::vector<const char*> argv;
    for (const auto& a : owned) argv.push_back(a.c_str());
    std::ostringstream log;
    return bcinv::cli::main(static_cast<int>(argv.size()), argv.data(), log);
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
}

json read_json(const fs::path& p) { return json::parse(slurp(p)); }

struct Table {
    std::vector<std::string> comments;
    std::vector<std::vector<double>> rows;
};

Table read_csv(const fs::path& p) {
    Table t;
    std::istringstream in(slurp(p));
    std::string line;
    bool header = true;
    while (std::getline(in, line)) {
        if (line.starts_with("#")) {
            t.comments.push_back(line);
            continue;
        }
        if (header) {
            header = false;
            continue;
        }
        std::vector<double> row;
        std::istringstream cells(line);
        std::string cell;
        while (std::getline(cells, cell, ',')) row.push_back(std::stod(cell));
        t.rows.push_back(row);
    }
    return t;
}

}  // namespace

TEST_CASE("roundtrip with a constant potential") {
    const auto dir = scratch("roundtrip");
    REQUIRE(invoke({"roundtrip", "--potential", "const:1", "--L", "1", "--T", "1", "--n", "201", "--method", "bc",
                    "--out", dir.string()}) == bcinv::cli::kOk);
    const auto report = read_json(dir / "error_report.json");
    CHECK(report["linf_rel"].get<double>() <= 0.02);
    CHECK(fs::exists(dir / "q_hat.csv"));
    CHECK(fs::exists(dir / "diagnostics.json"));
    CHECK(read_json(dir / "diagnostics.json")["positivity"]["positive"].get<bool>());
}

TEST_CASE("forward with the zero potential writes r = 0") {
    const auto dir = scratch("forward_zero");
    REQUIRE(invoke({"forward", "--potential", "zero", "--out", dir.string()}) == bcinv::cli::kOk);
    const auto r = read_csv(dir / "r.csv");
    REQUIRE(r.rows.size() == 401);
    for (const auto& row : r.rows) CHECK(row[1] == 0.0);
    REQUIRE(!r.comments.empty());
    CHECK(r.comments.front().starts_with("# config_hash="));
    CHECK(fs::exists(dir / "w-kernel.csv"));
}

TEST_CASE("strict positivity on a sign-flipped response") {
    const auto dir = scratch("flipped");
    REQUIRE(invoke({"forward", "--potential", "const:1", "--T", "1", "--out", dir.string()}) == bcinv::cli::kOk);
    const auto r = read_csv(dir / "r.csv");
    {
        std::ofstream out(dir / "r_flipped.csv");
        out.precision(17);
        out << "t,value\n";
        for (const auto& row : r.rows) out << row[0] << ',' << -row[1] << '\n';
    }
    const int code = invoke({"invert", "--method", "bc", "--response", (dir / "r_flipped.csv").string(), "--T", "1",
                             "--strict-positivity", "--out", dir.string()});
    const auto diag = read_json(dir / "diagnostics.json");
    MESSAGE("flipped response: min_eig = " << diag["positivity"]["min_eig"].get<double>() << ", exit " << code);
    CHECK(code == bcinv::cli::kPositivityViolation);
}

TEST_CASE("configuration errors exit with 2") {
    const auto dir = scratch("bad_config");
    {
        std::ofstream(dir / "bad.json") << R"({"command": "forward", "bogus": 1})";
    }
    CHECK(invoke({"forward", "--config", (dir / "bad.json").string(), "--out", dir.string()}) ==
          bcinv::cli::kBadConfig);
    CHECK(invoke({"forward", "--potential", "nonsense", "--out", dir.string()}) == bcinv::cli::kBadConfig);
    CHECK(invoke({"launch", "--out", dir.string()}) == bcinv::cli::kBadConfig);
    CHECK(invoke({"invert", "--method", "magic", "--potential", "zero", "--out", dir.string()}) ==
          bcinv::cli::kBadConfig);
}

TEST_CASE("solver failures exit with 3 and serialize the error") {
    const auto dir = scratch("solver_failure");
    CHECK(invoke({"forward", "--potential", "const:10000", "--out", dir.string()}) == bcinv::cli::kSolverFailure);
    const auto err = read_json(dir / "error.json");
    CHECK(err.contains("module"));
}

TEST_CASE("runs are deterministic") {
    const auto a = scratch("det_a");
    const auto b = scratch("det_b");
    for (const auto& dir : {a, b}) {
        REQUIRE(invoke({"roundtrip", "--potential", "sine", "--n", "101", "--method", "gl", "--out", dir.string()}) ==
                bcinv::cli::kOk);
    }
    for (const char* file : {"r.csv", "q_hat.csv", "diagnostics.json", "error_report.json"}) {
        CHECK_MESSAGE(slurp(a / file) == slurp(b / file), file);
    }
}

TEST_CASE("flags override the JSON config") {
    const auto dir = scratch("override");
    {
        std::ofstream(dir / "cfg.json") << R"({"command": "forward", "potential": "const:1", "n": 101})";
    }
    REQUIRE(invoke({"forward", "--config", (dir / "cfg.json").string(), "--out", dir.string()}) == bcinv::cli::kOk);
    CHECK(read_csv(dir / "r.csv").rows.size() == 201);
    REQUIRE(invoke({"forward", "--config", (dir / "cfg.json").string(), "--n", "51", "--out", dir.string()}) ==
            bcinv::cli::kOk);
    CHECK(read_csv(dir / "r.csv").rows.size() == 101);

    bcinv::cli::RunConfig x;
    x.command = "forward";
    auto y = x;
    y.out = "elsewhere";
    CHECK(bcinv::cli::config_hash(x) == bcinv::cli::config_hash(y));
    y.n = 51;
    CHECK(bcinv::cli::config_hash(x) != bcinv::cli::config_hash(y));
}

TEST_CASE("spectral and compare commands") {
    const auto dir = scratch("spectral");
    REQUIRE(invoke({"spectral", "--potential", "const:1", "--n-max", "20", "--out", dir.string()}) == bcinv::cli::kOk);
    const auto sd = read_csv(dir / "spectral.csv");
    REQUIRE(sd.rows.size() == 20);
    CHECK(sd.rows[0][1] == doctest::Approx(3.141592653589793 * 3.141592653589793 + 1.0).epsilon(1e-8));
    CHECK(read_csv(dir / "m.csv").rows.size() == 16);
    CHECK(fs::exists(dir / "ct_spectral.csv"));

    CHECK(invoke({"compare", "--potential", "sine", "--out", dir.string()}) == bcinv::cli::kBadConfig);
    REQUIRE(invoke({"forward", "--potential", "sine", "--n", "101", "--out", dir.string()}) == bcinv::cli::kOk);
    REQUIRE(invoke({"compare", "--response", (dir / "r.csv").string(), "--T", "1", "--out", dir.string()}) ==
            bcinv::cli::kOk);
    const auto cmp = read_csv(dir / "compare.csv");
    CHECK(cmp.rows.size() == 101);
}
