#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "mintrace/cli.hpp"

namespace fs = std::filesystem;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result run(std::vector<std::string> args) {
    args.insert(args.begin(), "mintrace");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = mintrace::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
}

fs::path scratch(const std::string& name) {
    const auto dir = fs::temp_directory_path() / ("mintrace_cli_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::size_t line_count(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

}  // namespace

TEST_CASE("census writes one row per replication and kind") {
    const auto dir = scratch("census");
    const auto r = run({"census", "--p", "6", "--reps", "5", "--seed", "1", "--out", dir.string(), "--workers", "1"});
    REQUIRE(r.code == 0);
    const auto csv = slurp(dir / "census.csv");
    CHECK(line_count(csv) == 1 + 5 * 4);
    CHECK(csv.rfind("replication,kind,strict,weak,global_min_trace,n_global_optima\n", 0) == 0);
    const auto summary = nlohmann::json::parse(slurp(dir / "census_summary.json"));
    CHECK(summary["cells"].size() == 4);
    CHECK(summary["cells"]["ADJ"].contains("weak"));
}

TEST_CASE("census output is byte-identical across reruns and worker counts") {
    const auto a = scratch("det_a"), b = scratch("det_b");
    REQUIRE(run({"census", "--p", "6", "--reps", "9", "--out", a.string(), "--workers", "1"}).code == 0);
    REQUIRE(run({"census", "--p", "6", "--reps", "9", "--out", b.string(), "--workers", "3"}).code == 0);
    CHECK(slurp(a / "census.csv") == slurp(b / "census.csv"));
    CHECK(slurp(a / "census_summary.json") == slurp(b / "census_summary.json"));
}

TEST_CASE("config file with command-line override") {
    const auto dir = scratch("config");
    {
        std::ofstream os(dir / "cfg.json");
        os << R"({"p": 5, "reps": 4, "kinds": ["adj"], "out": ")" << dir.string() << R"("})";
    }
    const auto r = run({"census", "--config", (dir / "cfg.json").string(), "--reps", "2"});
    REQUIRE(r.code == 0);
    CHECK(line_count(slurp(dir / "census.csv")) == 1 + 2);

    {
        std::ofstream os(dir / "bad.json");
        os << R"({"p": 5, "colour": "blue"})";
    }
    CHECK(run({"census", "--config", (dir / "bad.json").string()}).code == 2);
}

TEST_CASE("exit codes") {
    CHECK(run({"census", "--p", "11", "--reps", "1", "--out", scratch("size").string()}).code == 3);
    CHECK(run({"census", "--bogus"}).code == 2);
    CHECK(run({}).code == 2);
    CHECK(run({"census", "--reps", "0"}).code == 2);
    CHECK(run({"census", "--kinds", "swap"}).code == 2);
    CHECK(run({"decompose"}).code == 2);

    const auto dir = scratch("degenerate");
    {
        std::ofstream os(dir / "s.csv");
        os << "1,1\n1,1\n";
    }
    const auto r = run({"decompose", "--sigma", (dir / "s.csv").string()});
    CHECK(r.code == 4);
    CHECK(!r.err.empty());
}

TEST_CASE("decompose prints the factorization") {
    const auto dir = scratch("decompose");
    {
        std::ofstream os(dir / "s.csv");
        os << "1,0.5\n0.5,1.25\n";
    }
    const auto r = run({"decompose", "--sigma", (dir / "s.csv").string(), "--order", "2,1"});
    REQUIRE(r.code == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["decomposition"]["trace"].get<double>() == doctest::Approx(2.05));
    CHECK(j["decomposition"]["omega_sigma"][0].get<double>() == doctest::Approx(0.8));
    CHECK(j["order"].dump() == "[2,1]");
}

TEST_CASE("climb is deterministic and reports the trace") {
    const auto a = run({"climb", "--p", "6", "--seed", "5"});
    const auto b = run({"climb", "--p", "6", "--seed", "5", "--workers", "3"});
    REQUIRE(a.code == 0);
    CHECK(a.out == b.out);
    const auto j = nlohmann::json::parse(a.out);
    CHECK(j["mode"] == "population");
    CHECK(j["trace"].contains("steps"));

    const auto s = run({"climb", "--p", "5", "--seed", "2", "--sample", "--n", "500", "--init", "5,4,3,2,1"});
    REQUIRE(s.code == 0);
    const auto js = nlohmann::json::parse(s.out);
    CHECK(js["mode"] == "sample");
    CHECK(js["trace"]["initial"].dump() == "[5,4,3,2,1]");
}

TEST_CASE("complexity and check write their tables") {
    const auto dir = scratch("complexity");
    REQUIRE(run({"complexity", "--p", "5,6", "--reps", "3", "--n", "300", "--out", dir.string()}).code == 0);
    CHECK(line_count(slurp(dir / "complexity.csv")) == 1 + 2 * 3);
    const auto summary = nlohmann::json::parse(slurp(dir / "complexity_summary.json"));
    CHECK(summary["cells"].size() == 2);
    CHECK(summary["cells"][0]["iterations"].contains("max"));

    REQUIRE(run({"check", "--p", "4,5", "--reps", "6", "--out", dir.string()}).code == 0);
    CHECK(line_count(slurp(dir / "check.csv")) == 1 + 6);
    const auto report = nlohmann::json::parse(slurp(dir / "check_report.json"));
    CHECK(report["models"] == 6);
    CHECK(report["passing_with_strict_r2r_optima"] == 0);
}
