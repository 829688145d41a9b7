#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "bubblelab/params.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string binary() {
    const char* env = std::getenv("BUBBLELAB_BIN");
    REQUIRE_MESSAGE(env != nullptr, "BUBBLELAB_BIN must point at the CLI");
    return env;
}

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("bubblelab_test_" + std::to_string(::getpid()) + "_" +
                std::to_string(counter++));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    static inline int counter = 0;
};

int run(const std::string& cmd) {
    const int rc = std::system(cmd.c_str());
    return WEXITSTATUS(rc);
}

json base_config() {
    return json{
        {"params",
         {{"sigma", 1.0},
          {"sigma_bar", 1.0},
          {"mu_l", 1.0},
          {"rho_l", 1.0},
          {"kappa", 1.0},
          {"c_g", 3.0},
          {"R_spec", 2.0},
          {"T_inf", 1.0},
          {"M", 1.0},
          {"V", 1.0}}},
        {"solver",
         {{"N", 12}, {"rtol", 1e-8}, {"atol", 1e-13}, {"t_end", 0.5},
          {"output_dt", 0.05}}},
        {"ic", {{"eps", 1e-3}, {"delta", 5e-4}, {"shape", "parabolic"}}},
        {"seed", 42}};
}

void write_config(const fs::path& p, const json& j) {
    std::ofstream out(p);
    out << j.dump(2);
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("equilibrium subcommand writes a valid report") {
    TempDir dir;
    write_config(dir.path / "cfg.json", base_config());
    const int rc = run(binary() + " equilibrium --config " +
                       (dir.path / "cfg.json").string() + " --out " +
                       dir.path.string() + " > /dev/null 2>&1");
    CHECK(rc == 0);
    const json rep = json::parse(slurp(dir.path / "equilibrium.json"));
    CHECK(rep["R_star"].get<double>() ==
          doctest::Approx(0.388464800066147).epsilon(1e-12));
    CHECK(rep["residual"].get<double>() <= 1e-12);
    CHECK(rep["bracket"][0].get<double>() < rep["R_star"].get<double>());
    CHECK(rep["bracket"][1].get<double>() > rep["R_star"].get<double>());
}

TEST_CASE("missing keys exit with code 2 and name the key") {
    TempDir dir;
    json cfg = base_config();
    cfg["params"].erase("sigma");
    write_config(dir.path / "bad.json", cfg);
    const int rc = run(binary() + " equilibrium --config " +
                       (dir.path / "bad.json").string() + " --out " +
                       dir.path.string() + " > /dev/null 2> " +
                       (dir.path / "err.txt").string());
    CHECK(rc == 2);
    const std::string err = slurp(dir.path / "err.txt");
    CHECK(err.find("sigma") != std::string::npos);
    CHECK(err.find("\"code\":2") != std::string::npos);
}

TEST_CASE("unknown params keys are rejected") {
    TempDir dir;
    json cfg = base_config();
    cfg["params"]["surface_tension"] = 1.0;
    write_config(dir.path / "bad.json", cfg);
    const int rc = run(binary() + " equilibrium --config " +
                       (dir.path / "bad.json").string() + " --out " +
                       dir.path.string() + " > /dev/null 2>&1");
    CHECK(rc == 2);
}

TEST_CASE("simulate then audit round trip; byte-identical reruns") {
    TempDir dir;
    write_config(dir.path / "cfg.json", base_config());
    const std::string base_cmd =
        binary() + " simulate --config " + (dir.path / "cfg.json").string();
    CHECK(run(base_cmd + " --out " + (dir.path / "a").string() +
              " > /dev/null 2>&1") == 0);
    CHECK(run(base_cmd + " --out " + (dir.path / "b").string() +
              " > /dev/null 2>&1") == 0);

    const std::string traj_a = slurp(dir.path / "a" / "trajectory.csv");
    CHECK(traj_a == slurp(dir.path / "b" / "trajectory.csv"));
    std::string header = traj_a.substr(0, traj_a.find('\n'));
    CHECK(header ==
          "t,rho2,delta_R,dR,mass_drift,energy,dissipation,znorm,"
          "theta_1,theta_2,theta_3,theta_4,theta_5,theta_6,theta_7,theta_8");

    const int rc = run(binary() + " audit " +
                       (dir.path / "a" / "trajectory.csv").string() +
                       " --config " + (dir.path / "cfg.json").string() +
                       " --out " + (dir.path / "a").string() +
                       " > /dev/null 2>&1");
    CHECK(rc == 0);
    const json verdict = json::parse(slurp(dir.path / "a" / "audit.json"));
    CHECK(verdict["monotone"].get<bool>());
    const std::string audit_csv = slurp(dir.path / "a" / "audit.csv");
    CHECK(audit_csv.substr(0, audit_csv.find('\n')) ==
          "t,E,D,dEdt,residual,gap,quad_form");
}

TEST_CASE("spectrum subcommand reports roots and constants") {
    TempDir dir;
    json cfg = base_config();
    cfg["spectrum"] = {{"N", 32}};
    write_config(dir.path / "cfg.json", cfg);
    const int rc = run(binary() + " spectrum --config " +
                       (dir.path / "cfg.json").string() + " --out " +
                       dir.path.string() + " > /dev/null 2>&1");
    CHECK(rc == 0);
    const json rep = json::parse(slurp(dir.path / "spectrum.json"));
    CHECK(!rep["roots"].empty());
    CHECK(rep["abscissa"].get<double>() < 0.0);
    CHECK(rep["constants"]["Theta1"].get<double>() > 0.0);
    CHECK(rep["constants"]["varpi"].get<double>() > 0.0);
    CHECK(!rep["matrix_eigs_window"].empty());
}

TEST_CASE("sweep over M orders the abscissa as the paper predicts") {
    TempDir dir;
    json cfg = base_config();
    cfg["params"]["V"] = 2e-4;  // small liquid volume
    write_config(dir.path / "cfg.json", cfg);
    const int rc = run(binary() + " sweep --config " +
                       (dir.path / "cfg.json").string() +
                       " --axis M --values 0.25,1,4 --workers 2 --out " +
                       dir.path.string() + " > /dev/null 2>&1");
    CHECK(rc == 0);
    std::ifstream in(dir.path / "sweep.csv");
    std::string line;
    std::getline(in, line);
    CHECK(line == "M,R_star,rho_star,kappa_bar,abscissa,varpi");
    std::vector<double> abscissa;
    while (std::getline(in, line)) {
        std::stringstream ss(line);
        std::string cell;
        std::vector<double> row;
        while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
        REQUIRE(row.size() == 6);
        abscissa.push_back(row[4]);
    }
    REQUIRE(abscissa.size() == 3);
    // decreasing magnitude as the mass grows
    CHECK(std::abs(abscissa[0]) > std::abs(abscissa[1]));
    CHECK(std::abs(abscissa[1]) > std::abs(abscissa[2]));
}

TEST_CASE("fd backend runs through the cli") {
    TempDir dir;
    json cfg = base_config();
    cfg["solver"]["backend"] = "fd";
    cfg["solver"]["grid"] = 128;
    write_config(dir.path / "cfg.json", cfg);
    const int rc = run(binary() + " simulate --config " +
                       (dir.path / "cfg.json").string() + " --out " +
                       dir.path.string() + " > /dev/null 2>&1");
    CHECK(rc == 0);
    const json summary = json::parse(slurp(dir.path / "summary.json"));
    CHECK(summary["status"].get<std::string>() == "done");
}
