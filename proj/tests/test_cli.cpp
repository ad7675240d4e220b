#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

const fs::path kWork = fs::temp_directory_path() / "coopradar-cli-test";

int run(const std::string& args) {
    const std::string cmd = std::string(COOPRADAR_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path write_config(const std::string& name, const std::string& body) {
    fs::create_directories(kWork);
    const fs::path p = kWork / name;
    std::ofstream(p) << body;
    return p;
}

// small array and coarse grids keep the CLI runs fast
const char* kBaseConfig = R"({
  "array": {"layers": 5, "per_layer": 16},
  "register": {"r_s": [4.0], "cell": 0.25, "mode": "ideal"},
  "roc": {"trials": 20000, "n_thresholds": 20},
  "sweep": {"p_f": 0.1, "rho": 0.05, "r_s_min": 2.0, "r_s_max": 6.0, "r_s_step": 1.0},
  "beampattern": {"step_deg": 1.0, "span_factor": 4.0}
})";

} // namespace

TEST_CASE("register subcommand writes plan, overlap, power map, manifest") {
    const fs::path cfg = write_config("base.json", kBaseConfig);
    const fs::path out = kWork / "reg";
    REQUIRE(run("register --config " + cfg.string() + " --out " + out.string()) == 0);
    for (const char* f :
         {"manifest.json", "plan_r4.json", "overlap_r4.json", "power_r4.csv", "p_dfc_vs_r_s.json"})
        CHECK(fs::exists(out / f));
    const std::string overlap = slurp(out / "overlap_r4.json");
    CHECK(overlap.find("p_dfc") != std::string::npos);
    const std::string power = slurp(out / "power_r4.csv");
    CHECK(power.rfind("x_m,y_m,power_linear\n", 0) == 0);
    const std::string manifest = slurp(out / "manifest.json");
    CHECK(manifest.find("config_hash") != std::string::npos);
    CHECK(manifest.find("\"command\": \"register\"") != std::string::npos);
}

TEST_CASE("sweep subcommand reports an argmax") {
    const fs::path cfg = write_config("base.json", kBaseConfig);
    const fs::path out = kWork / "sweep";
    REQUIRE(run("sweep --config " + cfg.string() + " --out " + out.string()) == 0);
    CHECK(slurp(out / "p_d_vs_r_s.csv").rfind("r_s_m,p_d\n", 0) == 0);
    CHECK(slurp(out / "sweep_summary.json").find("argmax_r_s") != std::string::npos);
}

TEST_CASE("roc subcommand emits all four methods for single and fused") {
    const fs::path cfg = write_config("base.json", kBaseConfig);
    const fs::path out = kWork / "roc";
    REQUIRE(run("roc --config " + cfg.string() + " --out " + out.string() + " --seed 5") == 0);
    for (const char* who : {"single", "fused"})
        for (const char* m : {"numeric", "case1", "case2", "monte_carlo"}) {
            const fs::path f = out / ("roc_" + std::string(who) + "_" + m + ".csv");
            REQUIRE(fs::exists(f));
            CHECK(slurp(f).rfind("threshold,p_f,p_d,method\n", 0) == 0);
        }
}

TEST_CASE("identical config and seed give byte-identical outputs") {
    const fs::path cfg = write_config("base.json", kBaseConfig);
    const fs::path out1 = kWork / "det1";
    const fs::path out2 = kWork / "det2";
    REQUIRE(run("roc --config " + cfg.string() + " --out " + out1.string() + " --seed 9") == 0);
    REQUIRE(run("roc --config " + cfg.string() + " --out " + out2.string() + " --seed 9") == 0);
    CHECK(slurp(out1 / "roc_fused_monte_carlo.csv") == slurp(out2 / "roc_fused_monte_carlo.csv"));
    CHECK(slurp(out1 / "roc_single_numeric.csv") == slurp(out2 / "roc_single_numeric.csv"));
}

TEST_CASE("unknown config keys are rejected with exit code 2") {
    const fs::path cfg = write_config("typo.json", R"({"arrray": {"layers": 5}})");
    CHECK(run("sweep --config " + cfg.string() + " --out " + (kWork / "x").string()) == 2);
}

TEST_CASE("invalid scenario values are rejected with exit code 2") {
    const fs::path cfg =
        write_config("sunk.json", R"({"rsus": [{"x": 0, "y": 0, "height_h": -1}]})");
    CHECK(run("sweep --config " + cfg.string() + " --out " + (kWork / "y").string()) == 2);
}

TEST_CASE("malformed json is rejected") {
    const fs::path cfg = write_config("broken.json", "{ not json");
    CHECK(run("sweep --config " + cfg.string() + " --out " + (kWork / "z").string()) == 2);
}

TEST_CASE("missing config file is rejected") {
    CHECK(run("sweep --config /nonexistent.json --out " + (kWork / "w").string()) == 2);
}

TEST_CASE("roc csv round-trips numerically") {
    const fs::path cfg = write_config("base.json", kBaseConfig);
    const fs::path out = kWork / "rt";
    REQUIRE(run("roc --config " + cfg.string() + " --out " + out.string()) == 0);
    std::ifstream in(out / "roc_single_case1.csv");
    std::string header;
    std::getline(in, header);
    CHECK(header == "threshold,p_f,p_d,method");
    std::string line;
    int rows = 0;
    while (std::getline(in, line)) {
        std::istringstream ls(line);
        std::string eta, pf, pd, method;
        REQUIRE(std::getline(ls, eta, ','));
        REQUIRE(std::getline(ls, pf, ','));
        REQUIRE(std::getline(ls, pd, ','));
        REQUIRE(std::getline(ls, method, ','));
        const double pfv = std::stod(pf);
        const double pdv = std::stod(pd);
        CHECK(pfv >= 0.0);
        CHECK(pfv <= 1.0);
        CHECK(pdv >= pfv - 1e-9);
        CHECK(method == "case1");
        ++rows;
    }
    CHECK(rows == 99);
}
