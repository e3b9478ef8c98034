#include "doctest.h"

#include "subwalk/cli.hpp"
#include "subwalk/io.hpp"

#include <nlohmann/json.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

using namespace subwalk;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

fs::path fresh_dir(const std::string& tag) {
    const fs::path dir = fs::temp_directory_path() / ("subwalk_test_" + tag);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

} // namespace

TEST_CASE("cli: weights for pure drift") {
    const fs::path dir = fresh_dir("wdrift");
    CHECK(run_cli({"weights", "--phi", "drift", "--out", dir.string()}) == 0);
    const std::string summary = slurp(dir / "summary.json");
    CHECK(summary.find("\"direct_atom\": 1.0") != std::string::npos);
    CHECK(summary.find("\"M\": 0") != std::string::npos);
    CHECK(slurp(dir / "weights.csv") == "m,w_m\n");
}

TEST_CASE("cli: weights for stable 0.5 starts at one half") {
    const fs::path dir = fresh_dir("whalf");
    CHECK(run_cli({"weights", "--phi", "stable:0.5", "--out", dir.string()}) == 0);
    std::istringstream csv(slurp(dir / "weights.csv"));
    std::string header, first;
    std::getline(csv, header);
    std::getline(csv, first);
    CHECK(header == "m,w_m");
    REQUIRE(first.rfind("1,", 0) == 0);
    CHECK(std::stod(first.substr(2)) == doctest::Approx(0.5).epsilon(1e-10));
}

TEST_CASE("cli: bad phi id exits 2") {
    const fs::path dir = fresh_dir("wbad");
    CHECK(run_cli({"weights", "--phi", "nope", "--out", dir.string()}) == 2);
}

TEST_CASE("cli: triplets pass and perturbed fail") {
    const fs::path dir = fresh_dir("trip");
    CHECK(run_cli({"triplets", "--phi", "drift", "--d", "1", "--out", dir.string()}) == 0);
    CHECK(slurp(dir / "comparison.json").find("\"verdict\": \"pass\"") !=
          std::string::npos);

    const fs::path dir2 = fresh_dir("tripfail");
    CHECK(run_cli({"triplets", "--phi", "drift", "--d", "1", "--perturb-nu", "1e-3",
                   "--out", dir2.string()}) == 1);
    CHECK(slurp(dir2 / "comparison.json").find("\"verdict\": \"fail\"") !=
          std::string::npos);
}

TEST_CASE("cli: converge requires a nonempty n list") {
    const fs::path dir = fresh_dir("convempty");
    CHECK(run_cli({"converge", "--phi", "stable:0.5", "--out", dir.string()}) == 2);

    const fs::path dir2 = fresh_dir("conv");
    CHECK(run_cli({"converge", "--phi", "stable:0.5", "--n", "100,1000,10000", "--out",
                   dir2.string()}) == 0);
    const std::string json = slurp(dir2 / "convergence.json");
    CHECK(json.find("\"monotone_flag\": true") != std::string::npos);
}

TEST_CASE("cli: simulate writes the requested path files") {
    const fs::path dir = fresh_dir("sim");
    CHECK(run_cli({"simulate", "--phi", "stable:0.5", "--n", "1000", "--t", "1",
                   "--steps", "20", "--num-paths", "5", "--seed", "7", "--out",
                   dir.string()}) == 0);
    for (int p = 0; p < 5; ++p) {
        char name[32];
        std::snprintf(name, sizeof(name), "path_%03d.csv", p);
        CHECK(fs::exists(dir / name));
    }

    // t-grid {0}: a single all-zero row
    const fs::path dir2 = fresh_dir("simzero");
    CHECK(run_cli({"simulate", "--phi", "drift", "--t", "0", "--num-paths", "1",
                   "--out", dir2.string()}) == 0);
    CHECK(slurp(dir2 / "path_000.csv") == "time,x1\n0,0\n");
}

TEST_CASE("cli: simulate is byte-identical for a fixed seed") {
    const fs::path a = fresh_dir("repa"), b = fresh_dir("repb");
    const std::vector<std::string> base{"simulate", "--phi", "stable:0.5", "--n", "500",
                                        "--t",      "1",     "--steps",    "50",
                                        "--num-paths", "2",  "--seed",     "11"};
    auto run_into = [&](const fs::path& dir) {
        auto args = base;
        args.push_back("--out");
        args.push_back(dir.string());
        CHECK(run_cli(args) == 0);
    };
    run_into(a);
    run_into(b);
    CHECK(slurp(a / "path_000.csv") == slurp(b / "path_000.csv"));
    CHECK(slurp(a / "path_001.csv") == slurp(b / "path_001.csv"));
}

TEST_CASE("cli: unknown check name exits 2") {
    const fs::path dir = fresh_dir("chkbad");
    CHECK(run_cli({"check", "--only", "nonsense", "--out", dir.string()}) == 2);
}

TEST_CASE("cli: zero tolerance fails the rv check") {
    const fs::path dir = fresh_dir("chkzero");
    CHECK(run_cli({"check", "--only", "rv", "--tol", "rv=0", "--out", dir.string()}) ==
          1);
    CHECK(slurp(dir / "check.json").find("\"pass\": false") != std::string::npos);
}

TEST_CASE("cli: rv subcommand emits the estimate") {
    const fs::path dir = fresh_dir("rv");
    CHECK(run_cli({"rv", "--phi", "stable:0.5", "--inverse", "--out", dir.string()}) ==
          0);
    const std::string json = slurp(dir / "rv.json");
    CHECK(json.find("\"index_hat\": 0.5") != std::string::npos);
    CHECK(json.find("inverse_index") != std::string::npos);
}

TEST_CASE("cli: no subcommand is a usage error") {
    CHECK(run_cli({}) == 2);
}

TEST_CASE("cli: flat key=value config file, flags still win") {
    const fs::path dir = fresh_dir("cfg");
    const fs::path cfg = dir / "run.cfg";
    {
        std::ofstream out(cfg);
        out << "phi=drift\n";
        out << "out=" << (dir / "from_config").string() << "\n";
    }
    CHECK(run_cli({"weights", "--config", cfg.string()}) == 0);
    CHECK(fs::exists(dir / "from_config" / "summary.json"));

    // a command-line flag overrides the config value
    CHECK(run_cli({"weights", "--config", cfg.string(), "--out",
                   (dir / "flag_wins").string()}) == 0);
    CHECK(fs::exists(dir / "flag_wins" / "summary.json"));
}

TEST_CASE("lattice distribution serialization shapes") {
    LatticeDistribution law(2, 1);
    law.at({1, 0}) = 0.25;
    law.at({0, -1}) = 0.75;
    law.set_captured_mass(1.0);

    CHECK(to_csv(law) == "z1,z2,mass\n0,-1,0.75\n1,0,0.25\n");
    const nlohmann::json j = to_json(law);
    CHECK(j["d"] == 2);
    CHECK(j["radius"] == 1);
    CHECK(j["captured_mass"] == 1.0);
    CHECK(j["entries"].size() == 2);
    CHECK(j["entries"][0]["z"] == nlohmann::json::array({0, -1}));
}

TEST_CASE("cli: SUBWALK_SEED environment variable sets the seed") {
    const fs::path a = fresh_dir("enva"), b = fresh_dir("envb"), c = fresh_dir("envc");
    setenv("SUBWALK_SEED", "77", 1);
    CHECK(run_cli({"simulate", "--phi", "drift", "--n", "100", "--t", "1", "--steps",
                   "10", "--out", a.string()}) == 0);
    CHECK(run_cli({"simulate", "--phi", "drift", "--n", "100", "--t", "1", "--steps",
                   "10", "--out", b.string()}) == 0);
    unsetenv("SUBWALK_SEED");
    CHECK(run_cli({"simulate", "--phi", "drift", "--n", "100", "--t", "1", "--steps",
                   "10", "--seed", "78", "--out", c.string()}) == 0);
    CHECK(slurp(a / "path_000.csv") == slurp(b / "path_000.csv"));
    CHECK(slurp(a / "path_000.csv") != slurp(c / "path_000.csv"));
}
