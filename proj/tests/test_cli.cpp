#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

int run_cli(const std::string& args) {
    const std::string cmd = std::string(SQC_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

const std::string kNominalConfig = std::string(SQC_CONFIG_DIR) + "/nominal.json";

} // namespace

TEST_CASE("malformed config exits with the config error code") {
    const fs::path dir = fs::temp_directory_path() / "sqc_cli_bad";
    fs::create_directories(dir);
    const fs::path bad = dir / "bad.json";
    std::ofstream(bad) << "{ not json";
    CHECK(run_cli("find-off --config " + bad.string() + " --out " + dir.string()) == 1);

    const fs::path missing = dir / "missing_field.json";
    std::ofstream(missing) << R"({"schema_version": 1, "circuit": {"EJ1_GHz": 11.5}})";
    CHECK(run_cli("find-off --config " + missing.string() + " --out " + dir.string()) == 1);

    CHECK(run_cli("find-off --config " + (dir / "nonexistent.json").string()) == 1);
    fs::remove_all(dir);
}

TEST_CASE("unknown experiment is a usage error") {
    CHECK(run_cli("no-such-experiment --config " + kNominalConfig) == 1);
}

TEST_CASE("physics failures map to the physics exit code") {
    const fs::path dir = fs::temp_directory_path() / "sqc_cli_phys";
    fs::create_directories(dir);
    // oversized coupler capacitance has no idle flux
    const fs::path cfg = dir / "no_idle.json";
    std::ofstream(cfg) << R"({
      "schema_version": 1,
      "circuit": {"EJ1_GHz": 11.5, "EJ2_GHz": 20.0, "C1_fF": 77.5, "C2_fF": 69.2,
                  "EJC1_GHz": 0.40, "EJC2_GHz": 0.40, "CC1_fF": 4.0, "CC2_fF": 4.0}
    })";
    CHECK(run_cli("find-off --config " + cfg.string() + " --out " + dir.string()) == 2);
    fs::remove_all(dir);
}

TEST_CASE("find-off emits the idle point artifact and manifest") {
    const fs::path dir = fs::temp_directory_path() / "sqc_cli_findoff";
    fs::remove_all(dir);
    REQUIRE(run_cli("find-off --config " + kNominalConfig + " --out " + dir.string()) == 0);
    const std::string json = slurp(dir / "find_off.json");
    CHECK(json.find("\"phi_off\": 0.5156") != std::string::npos);
    CHECK(fs::exists(dir / "manifest.json"));
    const std::string manifest = slurp(dir / "manifest.json");
    CHECK(manifest.find("\"experiment\": \"find-off\"") != std::string::npos);
    fs::remove_all(dir);
}

TEST_CASE("zz-sweep reruns are byte identical") {
    const fs::path a = fs::temp_directory_path() / "sqc_cli_sweep_a";
    const fs::path b = fs::temp_directory_path() / "sqc_cli_sweep_b";
    fs::remove_all(a);
    fs::remove_all(b);
    const std::string common =
        "zz-sweep --config " + kNominalConfig + " --points 7 --stop 0.55 --threads 2 --out ";
    REQUIRE(run_cli(common + a.string()) == 0);
    REQUIRE(run_cli(common + b.string()) == 0);
    const std::string csv_a = slurp(a / "zz_sweep.csv");
    const std::string csv_b = slurp(b / "zz_sweep.csv");
    CHECK(!csv_a.empty());
    CHECK(csv_a == csv_b);
    CHECK(csv_a.find("flux,zeta_GHz,hybridization,eig_0") == 0);
    fs::remove_all(a);
    fs::remove_all(b);
}

TEST_CASE("spectrum experiment emits labeled levels") {
    const fs::path dir = fs::temp_directory_path() / "sqc_cli_spectrum";
    fs::remove_all(dir);
    REQUIRE(run_cli("spectrum --config " + kNominalConfig + " --phi 0.3 --out " +
                    dir.string()) == 0);
    const std::string csv = slurp(dir / "spectrum.csv");
    CHECK(csv.find("index,energy_GHz,transition_GHz,bare_m1,bare_m2,overlap") == 0);
    fs::remove_all(dir);
}
