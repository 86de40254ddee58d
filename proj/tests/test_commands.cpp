#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "wtime/commands.hpp"
#include "wtime/error.hpp"

using namespace wtime;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        std::random_device rd;
        path = fs::temp_directory_path() / ("wtime_test_" + std::to_string(rd()));
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
};

nlohmann::json read_json(const fs::path& p) {
    std::ifstream in(p);
    return nlohmann::json::parse(in);
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

// small verify config that keeps the deficiency study cheap
RunConfig quick(const fs::path& dir) {
    RunConfig cfg = parse_run_config({{"N", 2049}, {"nodes_per_unit", 1024.0}});
    cfg.output_dir = dir.string();
    return cfg;
}

}  // namespace

TEST_CASE("parse_run_config") {
    const RunConfig d = parse_run_config(nlohmann::json::object());
    CHECK(d.N == 4097);
    CHECK(d.order == 4);
    CHECK(d.construction == "conjugated");
    CHECK_THROWS_AS(parse_run_config({{"bogus", 1}}), Error);
    const RunConfig c = parse_run_config({{"L", 10.0}, {"checks", {"spectrum"}}, {"tolerances", {{"commutation", 1e-3}}}});
    CHECK(c.L == 10.0);
    CHECK(c.checks == std::vector<std::string>{"spectrum"});
    const RunConfig back = parse_run_config(to_json(c));
    CHECK(to_json(back) == to_json(c));
}

TEST_CASE("resolve names the offending field") {
    RunConfig cfg;
    cfg.N = 4096;
    try {
        resolve(cfg);
        FAIL("even N accepted");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Config);
        CHECK(std::string(e.what()).find("'N'") != std::string::npos);
    }
    cfg = RunConfig{};
    cfg.order = 3;
    CHECK_THROWS_AS(resolve(cfg), Error);
    cfg = RunConfig{};
    cfg.weight = {{"name", "nope"}};
    CHECK_THROWS_AS(resolve(cfg), Error);
    cfg = RunConfig{};
    cfg.tolerances = {{"unknown_tol", 1.0}};
    CHECK_THROWS_AS(resolve(cfg), Error);
}

TEST_CASE("validate command") {
    TempDir tmp;
    std::ostringstream log;
    RunConfig cfg;
    cfg.output_dir = tmp.path.string();
    CHECK(cmd_validate(cfg, log) == kExitOk);
    CHECK(read_json(tmp.path / "validation_report.json")["positivity"]["ok"] == true);

    cfg.weight = {{"name", "gaussian_violating"}};
    cfg.L = 10.0;
    CHECK(cmd_validate(cfg, log) == kExitCheckFailed);

    cfg = RunConfig{};
    cfg.output_dir = tmp.path.string();
    cfg.N = 4096;
    CHECK(cmd_validate(cfg, log) == kExitConfig);
}

TEST_CASE("verify command") {
    TempDir tmp;
    std::ostringstream log;

    SUBCASE("default checks pass for both constructions") {
        for (const char* k : {"conjugated", "direct"}) {
            RunConfig cfg = quick(tmp.path);
            cfg.construction = k;
            INFO(k << "\n" << log.str());
            CHECK(cmd_verify(cfg, log) == kExitOk);
            const auto doc = read_json(tmp.path / "verification_report.json");
            CHECK(doc["all_passed"] == true);
            for (const auto& r : doc["records"]) CHECK(r["passed"] == (r["value"] <= r["tolerance"]));
        }
        CHECK(fs::exists(tmp.path / "verification_report.txt"));
    }
    SUBCASE("check selection") {
        RunConfig cfg = quick(tmp.path);
        cfg.checks = {"spectrum"};
        CHECK(cmd_verify(cfg, log) == kExitOk);
        const auto doc = read_json(tmp.path / "verification_report.json");
        REQUIRE(doc["records"].size() == 1);
        CHECK(doc["records"][0]["name"] == "spectrum");
        cfg.checks = {"nonexistent"};
        CHECK(cmd_verify(cfg, log) == kExitConfig);
    }
    SUBCASE("identical runs give identical reports apart from metadata") {
        RunConfig cfg = quick(tmp.path);
        cfg.checks = {"hermiticity", "commutation", "propagator"};
        REQUIRE(cmd_verify(cfg, log) == kExitOk);
        auto first = read_json(tmp.path / "verification_report.json");
        REQUIRE(cmd_verify(cfg, log) == kExitOk);
        auto second = read_json(tmp.path / "verification_report.json");
        first.erase("metadata");
        second.erase("metadata");
        CHECK(first == second);
    }
    SUBCASE("inadmissible weight stops unless forced") {
        RunConfig cfg = quick(tmp.path);
        cfg.weight = {{"name", "gaussian_violating"}};
        cfg.L = 10.0;
        cfg.checks = {"spectrum"};
        CHECK(cmd_verify(cfg, log) == kExitCheckFailed);
        CHECK(read_json(tmp.path / "verification_report.json").contains("error"));
        cfg.force = true;
        CHECK(cmd_verify(cfg, log) == kExitOk);
    }
    SUBCASE("tampered tolerance fails") {
        RunConfig cfg = quick(tmp.path);
        cfg.checks = {"commutation"};
        cfg.tolerances = {{"commutation", 1e-30}};
        CHECK(cmd_verify(cfg, log) == kExitCheckFailed);
    }
}

TEST_CASE("propagate command") {
    TempDir tmp;
    std::ostringstream log;
    RunConfig cfg;
    cfg.output_dir = tmp.path.string();
    cfg.N = 4001;

    CHECK(cmd_propagate(cfg, log) == kExitOk);
    CHECK(slurp(tmp.path / "before.csv") == slurp(tmp.path / "after.csv"));

    // feed a previous output back in
    const fs::path input = tmp.path / "input.csv";
    fs::copy_file(tmp.path / "before.csv", input);
    cfg.input_csv = input.string();
    cfg.sigma = 1.0;
    CHECK(cmd_propagate(cfg, log) == kExitOk);
    const auto rep = read_json(tmp.path / "propagate_report.json");
    CHECK(rep["details"]["step"]["shift_nodes"] == 100);

    cfg.sigma = 19.0;
    CHECK(cmd_propagate(cfg, log) == kExitCheckFailed);

    cfg.sigma = 0.005;
    CHECK(cmd_propagate(cfg, log) == kExitCheckFailed);
    cfg.interpolate = true;
    CHECK(cmd_propagate(cfg, log) == kExitOk);

    cfg.input_csv = (tmp.path / "missing.csv").string();
    CHECK(cmd_propagate(cfg, log) == kExitIo);
}

TEST_CASE("unwritable output directory is an I/O error") {
    TempDir tmp;
    std::ofstream(tmp.path / "plain_file") << "x";
    std::ostringstream log;
    RunConfig cfg;
    cfg.output_dir = (tmp.path / "plain_file" / "sub").string();
    CHECK(cmd_validate(cfg, log) == kExitIo);
}

TEST_CASE("export-matrix command") {
    TempDir tmp;
    std::ostringstream log;
    RunConfig cfg;
    cfg.output_dir = tmp.path.string();
    cfg.N = 101;
    cfg.order = 2;
    CHECK(cmd_export_matrix(cfg, log) == kExitOk);
    const auto meta = read_json(tmp.path / "matrix.json");
    CHECK(meta["grid"]["N"] == 101);
    CHECK(slurp(tmp.path / "matrix.csv").rfind("row,col,re,im\n", 0) == 0);

    cfg.N = 9001;
    CHECK(cmd_export_matrix(cfg, log) == kExitCheckFailed);
}
