#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/wait.h>

#include "gaugelens/config.hpp"

using namespace gaugelens;
namespace fs = std::filesystem;

namespace {

fs::path bin_dir() {
    const char* e = std::getenv("GAUGELENS_BIN_DIR");
    REQUIRE(e != nullptr);
    return fs::path(e);
}

fs::path config_dir() {
    const char* e = std::getenv("GAUGELENS_CONFIG_DIR");
    REQUIRE(e != nullptr);
    return fs::path(e);
}

fs::path fresh_out(const std::string& name) {
    const char* e = std::getenv("GAUGELENS_TEST_OUT");
    const fs::path base = e ? fs::path(e) : fs::temp_directory_path() / "gaugelens_runs";
    const fs::path p = base / name;
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

int run_cmd(const std::string& cmd) {
    const int rc = std::system(cmd.c_str());
    if (rc == -1) return -1;
    if (WIFEXITED(rc)) return WEXITSTATUS(rc);
    return -2;
}

fs::path only_subdir(const fs::path& dir) {
    REQUIRE(fs::is_directory(dir));
    fs::path found;
    int count = 0;
    for (const auto& entry : fs::directory_iterator(dir)) {
        ++count;
        found = entry.path();
    }
    REQUIRE(count == 1);
    return found;
}

}  // namespace

TEST_CASE("simulate runs a scenario end to end") {
    const auto out = fresh_out("cli_verify");
    std::ostringstream cmd;
    cmd << (bin_dir() / "simulate") << " --scenario verify_fields --config "
        << (config_dir() / "verify_fields.cfg") << " --out " << out << " > " << (out / "stdout.txt");
    CHECK(run_cmd(cmd.str()) == 0);

    const auto run_dir = only_subdir(out / "verify_fields");
    CHECK(fs::exists(run_dir / "manifest"));
    CHECK(fs::exists(run_dir / "report.txt"));
    CHECK(fs::exists(run_dir / "trajectory.csv"));

    std::ifstream log(out / "stdout.txt");
    std::ostringstream captured;
    captured << log.rdbuf();
    CHECK(captured.str().find("run directory:") != std::string::npos);
    CHECK(captured.str().find("PASS") != std::string::npos);
}

TEST_CASE("grid and time step overrides land in the manifest") {
    const auto out = fresh_out("cli_override");
    const fs::path cfg_path = out / "short_above.cfg";
    {
        std::ofstream cfg(cfg_path);
        cfg << "[grid]\nn_xi = 128\nn_eta = 128\n"
               "xi_min = -3pi\nxi_max = 3pi\neta_min = -3pi\neta_max = 3pi\n"
               "[model]\ndelta = 24\nbeta = 2\n"
               "[flux]\nkind = constant\nphi = 6\n"
               "[run]\ndtau = 1e-4\nn_steps = 600\nsample_stride = 40\n"
               "[packet]\nxi0 = -4\nk_xi = 12\nchannel = g\n"
               "[output]\nsnapshots = false\n";
    }
    std::ostringstream cmd;
    cmd << (bin_dir() / "simulate") << " --scenario above_threshold --config " << cfg_path
        << " --out " << out << " --grid-n 256 --dt 2e-4 > /dev/null";
    CHECK(run_cmd(cmd.str()) == 0);

    const auto manifest =
        Config::from_file((only_subdir(out / "above_threshold") / "manifest").string());
    CHECK(manifest.get_int("resolved.n_xi") == 256);
    CHECK(manifest.get_int("resolved.n_eta") == 256);
    CHECK(manifest.get_double("resolved.dtau") == 2e-4);
    // the file keeps the values the user wrote; only resolved.* reflects flags
    CHECK(manifest.get_int("grid.n_xi") == 128);
}

TEST_CASE("simulate distinguishes bad input from failed checks") {
    const auto out = fresh_out("cli_errors");

    std::ostringstream unknown;
    unknown << (bin_dir() / "simulate") << " --scenario warp_drive --config "
            << (config_dir() / "verify_fields.cfg") << " --out " << out << " 2> /dev/null";
    CHECK(run_cmd(unknown.str()) == 2);

    std::ostringstream missing;
    missing << (bin_dir() / "simulate") << " --scenario verify_fields --config "
            << (out / "does_not_exist.cfg") << " --out " << out << " 2> /dev/null";
    CHECK(run_cmd(missing.str()) == 2);

    // a precondition violation inside the scenario also maps to 2
    const fs::path bad_cfg = out / "bad.cfg";
    {
        std::ofstream cfg(bad_cfg);
        cfg << "[model]\ndelta = 10\n[run]\nn_steps = 100\n[packet]\nk_xi = 12\n";
    }
    std::ostringstream precon;
    precon << (bin_dir() / "simulate") << " --scenario below_threshold --config " << bad_cfg
           << " --out " << out << " 2> /dev/null";
    CHECK(run_cmd(precon.str()) == 2);
}

TEST_CASE("verify tool runs with built-in parameters") {
    const auto out = fresh_out("cli_verify_tool");
    std::ostringstream cmd;
    cmd << (bin_dir() / "verify") << " --out " << out << " > /dev/null";
    CHECK(run_cmd(cmd.str()) == 0);
    const auto run_dir = only_subdir(out / "verify_fields");
    const std::ifstream report(run_dir / "report.txt");
    CHECK(report.good());
}
