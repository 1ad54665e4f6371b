#include <doctest.h>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#ifndef GKCAT_CLI_PATH
#error "GKCAT_CLI_PATH must point at the CLI binary"
#endif

namespace {

namespace fs = std::filesystem;

struct RunResult {
    int exit_code;
    std::string stdout_text;
};

RunResult run_cli(const std::string& args) {
    const fs::path dir = fs::temp_directory_path() / "gkcat_cli_test";
    fs::create_directories(dir);
    static int counter = 0;
    const fs::path out = dir / ("out" + std::to_string(counter++) + ".txt");
    const std::string cmd = std::string(GKCAT_CLI_PATH) + " " + args + " > " +
                            out.string() + " 2>/dev/null";
    const int raw = std::system(cmd.c_str());
    std::ifstream in(out);
    std::stringstream buf;
    buf << in.rdbuf();
    return {WEXITSTATUS(raw), buf.str()};
}

}  // namespace

TEST_CASE("solve prints the genus-1 H3 root as JSON") {
    const auto r = run_cli("solve --k 1 --lambda 2 --target h3");
    REQUIRE(r.exit_code == 0);
    const auto doc = nlohmann::json::parse(r.stdout_text);
    CHECK(std::abs(doc["c_star"].get<double>() - (-0.0467552)) <= 2e-4);
    CHECK(std::abs(doc["h"].get<double>() - (-6.91432)) <= 1e-2);
    CHECK(doc["ambient"] == "h3");
    CHECK(doc["gap_residual"].get<double>() <= 1e-8);
    CHECK(doc["membership_residual"].get<double>() <= 1e-6);
}

TEST_CASE("solve exit codes") {
    // bracket without a sign change
    CHECK(run_cli("solve --k 1 --lambda 2 --target ds-elliptic --bracket 0.1 0.2")
              .exit_code == 2);
    // invalid parameters are a usage error
    CHECK(run_cli("solve --k 0 --lambda 2 --target h3").exit_code == 1);
    CHECK(run_cli("solve --k 1 --lambda 0.5 --target h3").exit_code == 1);
    // unknown flags are rejected
    CHECK(run_cli("solve --k 1 --lambda 2 --target h3 --bogus 1").exit_code != 0);
}

TEST_CASE("solve output is deterministic") {
    const auto a = run_cli("solve --k 1 --lambda 2 --target ds-hyperbolic");
    const auto b = run_cli("solve --k 1 --lambda 2 --target ds-hyperbolic");
    REQUIRE(a.exit_code == 0);
    CHECK(a.stdout_text == b.stdout_text);
}

TEST_CASE("table reproduces the genus-1 row") {
    const auto r = run_cli("table --k-max 1 --lambda 2");
    REQUIRE(r.exit_code == 0);
    std::stringstream ss(r.stdout_text);
    std::string header, row;
    std::getline(ss, header);
    std::getline(ss, row);
    CHECK(header ==
          "k,c_h3,h_h3,c_ell,h_ell,c_hyp,h_hyp,diagnostics");
    double c1, h1, c2, h2, c3, h3;
    REQUIRE(std::sscanf(row.c_str(), "1,%lf,%lf,%lf,%lf,%lf,%lf", &c1, &h1, &c2,
                        &h2, &c3, &h3) == 6);
    CHECK(std::abs(c1 - (-0.0467552)) <= 1e-5);
    CHECK(std::abs(h1 - (-6.91432)) <= 1e-3);
    CHECK(std::abs(c2 - (-0.557726)) <= 1e-5);
    CHECK(std::abs(h2 - 0.130869) <= 1e-4);
    CHECK(std::abs(c3 - 0.704094) <= 1e-5);
    CHECK(std::abs(h3 - 0.221228) <= 1e-4);
}

TEST_CASE("table rejects nonsense") {
    CHECK(run_cli("table --k-max 0").exit_code == 1);
}

TEST_CASE("scan emits CSV with a header") {
    const auto r = run_cli("scan --k 1 --lambda 2 --min -0.06 --max -0.03 --steps 8");
    REQUIRE(r.exit_code == 0);
    std::stringstream ss(r.stdout_text);
    std::string line;
    std::getline(ss, line);
    CHECK(line == "c,h1,h2,gap,status");
    int rows = 0;
    while (std::getline(ss, line))
        if (!line.empty()) ++rows;
    CHECK(rows == 8);
}

TEST_CASE("scan emits parseable JSON with brackets") {
    const auto r = run_cli(
        "scan --k 1 --lambda 2 --min -0.06 --max -0.03 --steps 12 --format json");
    REQUIRE(r.exit_code == 0);
    const auto doc = nlohmann::json::parse(r.stdout_text);
    CHECK(doc["samples"].size() == 12);
    REQUIRE(doc["brackets"].size() >= 1);
    const double lo = doc["brackets"][0][0].get<double>();
    const double hi = doc["brackets"][0][1].get<double>();
    CHECK(lo <= -0.0467552);
    CHECK(-0.0467552 <= hi);
}

TEST_CASE("verify passes at a root and fails off it") {
    const auto good = run_cli("verify --k 1 --lambda 2 --c -0.0467552441920853");
    CHECK(good.exit_code == 0);
    const auto doc = nlohmann::json::parse(good.stdout_text);
    CHECK(doc["pass"] == true);
    CHECK(doc["ambient"] == "h3");
    CHECK(doc["checks"]["det_drift"]["pass"] == true);

    const auto bad = run_cli("verify --k 1 --lambda 2 --c 0.3");
    CHECK(bad.exit_code == 1);
    const auto bad_doc = nlohmann::json::parse(bad.stdout_text);
    CHECK(bad_doc["pass"] == false);
    CHECK(bad_doc["checks"]["closing_gap"]["pass"] == false);
    // structural checks still pass away from roots
    CHECK(bad_doc["checks"]["det_drift"]["pass"] == true);
    CHECK(bad_doc["checks"]["mirror_symmetry"]["pass"] == true);

    CHECK(run_cli("verify --k 1 --lambda 2 --c 0").exit_code == 1);
}

TEST_CASE("mesh command guards and output") {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "gkcat_cli_test";
    fs::create_directories(dir);
    const std::string obj = (dir / "cli_mesh.obj").string();

    // non-root input refuses without --force
    CHECK(run_cli("mesh --k 1 --lambda 2 --c 0.3 --space h3 --out " + obj)
              .exit_code == 2);
    // wrong extension
    CHECK(run_cli("mesh --k 1 --lambda 2 --c -0.0467552441920853 --space h3 "
                  "--out " +
                  (dir / "m.stl").string())
              .exit_code == 1);
    // a real root produces a file plus sidecar
    const auto ok = run_cli(
        "mesh --k 1 --lambda 2 --c -0.0467552441920853 --space h3 --radial 10 "
        "--angular 12 --out " +
        obj);
    REQUIRE(ok.exit_code == 0);
    CHECK(fs::exists(obj));
    CHECK(fs::exists(obj + ".json"));
    const auto meta = nlohmann::json::parse(ok.stdout_text);
    CHECK(meta["vertex_count"].get<int>() == 2 * 10 * 12);
    // --force meshes anyway
    const auto forced = run_cli("mesh --k 1 --lambda 2 --c 0.3 --space h3 "
                                "--radial 8 --angular 8 --force --out " +
                                obj);
    CHECK(forced.exit_code == 0);
}

TEST_CASE("period wrapper") {
    const auto r =
        run_cli("period --k 1 --lambda 2 --c 1 --loop gamma1 --variant minimal");
    REQUIRE(r.exit_code == 0);
    const auto doc = nlohmann::json::parse(r.stdout_text);
    CHECK(doc["norm"].get<double>() <= 1e-8);

    const auto cross =
        run_cli("period --k 1 --lambda 2 --c 1 --loop gamma2 --variant minimal");
    REQUIRE(cross.exit_code == 0);
    CHECK(nlohmann::json::parse(cross.stdout_text)["norm"].get<double>() > 1e-3);
}
