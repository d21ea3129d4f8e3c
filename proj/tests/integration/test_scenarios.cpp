#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "gaugelens/scenario.hpp"

using namespace gaugelens;
namespace fs = std::filesystem;

namespace {

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

Config smoke(const std::string& name) {
    return Config::from_file((config_dir() / "smoke" / name).string());
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<std::string> lines_of(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream ss(text);
    for (std::string l; std::getline(ss, l);) out.push_back(l);
    return out;
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

}  // namespace

TEST_CASE("below_threshold smoke run produces the full artifact set") {
    const auto out = fresh_out("below_smoke");
    const auto res =
        run_scenario(ScenarioKind::below_threshold, smoke("below_threshold.cfg"), out, {});
    INFO(res.report);
    CHECK(res.exit_code == 0);

    const auto manifest = Config::from_file((res.run_dir / "manifest").string());
    CHECK(manifest.get_int("resolved.n_xi") == 128);
    CHECK(manifest.get_string("resolved.scenario") == "below_threshold");
    CHECK(manifest.get_int("resolved.n_steps") == 3000);
    CHECK(manifest.get_string("resolved.absorber") == "off");

    const auto traj = lines_of(slurp(res.run_dir / "trajectory.csv"));
    REQUIRE(traj.size() >= 2);
    CHECK(traj[0] == "tau,norm_f,norm_g,xi_f,eta_f,xi_g,eta_g,xi_tot,eta_tot");
    // samples at step 0, every 40th step and the final step
    CHECK(traj.size() == 1 + 3000 / 40 + 1);
    double prev_tau = -1.0;
    for (std::size_t i = 1; i < traj.size(); ++i) {
        const auto cells = split_csv(traj[i]);
        REQUIRE(cells.size() == 9);
        const double tau = std::stod(cells[0]);
        CHECK(tau > prev_tau);
        prev_tau = tau;
        const double nf = std::stod(cells[1]), ng = std::stod(cells[2]);
        CHECK(nf >= 0.0);
        CHECK(ng >= 0.0);
        CHECK(nf + ng <= 1.0 + 1e-9);
    }

    const auto classical = lines_of(slurp(res.run_dir / "classical.csv"));
    CHECK(classical[0] == "tau,xi,eta,vxi,veta");
    CHECK(classical.size() > 10);

    const std::string report = slurp(res.run_dir / "report.txt");
    CHECK(report.find("scenario: below_threshold") != std::string::npos);
    CHECK(report.find("PASS  tan_theta") != std::string::npos);
    CHECK(report.find("FAIL") == std::string::npos);

    // snapshots: sequential indices, one pair of raw density files each
    CHECK(fs::exists(res.run_dir / "snapshots" / "000000_f2.bin"));
    CHECK(fs::exists(res.run_dir / "snapshots" / "000000_g2.bin"));
    CHECK(fs::exists(res.run_dir / "snapshots" / "000001_f2.bin"));
    CHECK(fs::file_size(res.run_dir / "snapshots" / "000000_f2.bin") == 128 * 128 * 8);
    const std::string side = slurp(res.run_dir / "snapshots" / "000000.txt");
    CHECK(side.find("n_xi = 128") != std::string::npos);
    CHECK(side.find("dtype = float64 little-endian") != std::string::npos);
}

TEST_CASE("identical configs give byte-identical artifacts") {
    const auto out = fresh_out("determinism");
    const auto cfg = smoke("below_threshold.cfg");
    const auto r1 = run_scenario(ScenarioKind::below_threshold, cfg, out, {});
    const auto r2 = run_scenario(ScenarioKind::below_threshold, cfg, out, {});
    REQUIRE(r1.exit_code == 0);
    REQUIRE(r2.exit_code == 0);
    REQUIRE(r1.run_dir != r2.run_dir);
    CHECK(slurp(r1.run_dir / "trajectory.csv") == slurp(r2.run_dir / "trajectory.csv"));
    CHECK(slurp(r1.run_dir / "classical.csv") == slurp(r2.run_dir / "classical.csv"));
    CHECK(slurp(r1.run_dir / "snapshots" / "000000_f2.bin") ==
          slurp(r2.run_dir / "snapshots" / "000000_f2.bin"));
}

TEST_CASE("sweep results do not depend on the worker count") {
    const auto out = fresh_out("table_workers");
    const auto cfg = smoke("table1.cfg");
    CliOverrides one, three;
    one.workers = 1;
    three.workers = 3;
    const auto r1 = run_scenario(ScenarioKind::table1_sweep, cfg, out, one);
    const auto r3 = run_scenario(ScenarioKind::table1_sweep, cfg, out, three);
    INFO(r1.report);
    CHECK(r1.exit_code == 0);
    CHECK(r3.exit_code == 0);

    const std::string t1 = slurp(r1.run_dir / "table.csv");
    CHECK(t1 == slurp(r3.run_dir / "table.csv"));

    const auto rows = lines_of(t1);
    REQUIRE(rows.size() == 3);
    CHECK(rows[0] == "two_delta_over_k2,phi_over_k,tan_theta_measured,tan_theta_analytic");
    CHECK(fs::exists(r1.run_dir / "cell_delta200_phi6" / "trajectory.csv"));
    CHECK(fs::exists(r1.run_dir / "cell_delta200_phi3" / "trajectory.csv"));

    // per-cell trajectories must agree byte for byte too
    CHECK(slurp(r1.run_dir / "cell_delta200_phi6" / "trajectory.csv") ==
          slurp(r3.run_dir / "cell_delta200_phi6" / "trajectory.csv"));
}

TEST_CASE("above_threshold smoke run splits the packet") {
    const auto out = fresh_out("above_smoke");
    const auto res =
        run_scenario(ScenarioKind::above_threshold, smoke("above_threshold.cfg"), out, {});
    INFO(res.report);
    CHECK(res.exit_code == 0);
    const std::string report = slurp(res.run_dir / "report.txt");
    CHECK(report.find("transmitted f") != std::string::npos);
    CHECK(report.find("PASS  transmitted_f") != std::string::npos);
    CHECK(fs::exists(res.run_dir / "trajectory.csv"));
}

TEST_CASE("lens_rays smoke run writes per-ray artifacts and crossings") {
    const auto out = fresh_out("rays_smoke");
    const auto res = run_scenario(ScenarioKind::lens_rays, smoke("lens_rays.cfg"), out, {});
    INFO(res.report);
    CHECK(res.exit_code == 0);

    const auto rays = lines_of(slurp(res.run_dir / "rays.csv"));
    REQUIRE(rays.size() == 3);
    CHECK(rays[0] == "b,tan_theta_measured,tan_theta_classical,tan_theta_paraxial");
    for (std::size_t i = 1; i < rays.size(); ++i) {
        const auto cells = split_csv(rays[i]);
        REQUIRE(cells.size() == 4);
        // quantum and classical slopes land close for a narrow packet
        const double q = std::stod(cells[1]), c = std::stod(cells[2]);
        CHECK(q < 0.0);
        CHECK(std::abs(q - c) < 0.1);
    }

    const auto cross = lines_of(slurp(res.run_dir / "crossings.csv"));
    REQUIRE(cross.size() == 2);  // one pair of rays, one crossing
    CHECK(cross[0] == "xi,eta");

    CHECK(fs::exists(res.run_dir / "ray_b1" / "trajectory.csv"));
    CHECK(fs::exists(res.run_dir / "ray_b1" / "classical.csv"));
    CHECK(fs::exists(res.run_dir / "ray_b2" / "trajectory.csv"));
}

TEST_CASE("lens_slab smoke run narrows the beam") {
    const auto out = fresh_out("slab_smoke");
    const auto res = run_scenario(ScenarioKind::lens_slab, smoke("lens_slab.cfg"), out, {});
    INFO(res.report);
    CHECK(res.exit_code == 0);

    const auto widths = lines_of(slurp(res.run_dir / "widths.csv"));
    REQUIRE(widths.size() > 10);
    CHECK(widths[0] == "tau,xi_tot,rms_width,fwhm");
    const double w0 = std::stod(split_csv(widths[1])[2]);
    double wmin = w0;
    for (std::size_t i = 1; i < widths.size(); ++i)
        wmin = std::min(wmin, std::stod(split_csv(widths[i])[2]));
    CHECK(wmin < 0.8 * w0);
    CHECK(slurp(res.run_dir / "report.txt").find("FAIL") == std::string::npos);
}

TEST_CASE("interferometer smoke run fits a fringe per flux scaling") {
    const auto out = fresh_out("interf_smoke");
    const auto res =
        run_scenario(ScenarioKind::interferometer, smoke("interferometer.cfg"), out, {});
    INFO(res.report);
    CHECK(res.exit_code == 0);

    const auto fr = lines_of(slurp(res.run_dir / "fringes.csv"));
    REQUIRE(fr.size() == 3);
    CHECK(fr[0] == "scale,freq,phase,contrast,enclosed_flux");
    const auto row1 = split_csv(fr[1]);
    const auto row2 = split_csv(fr[2]);
    REQUIRE(row1.size() == 5);
    REQUIRE(row2.size() == 5);
    CHECK(std::stod(row1[0]) == 1.0);
    CHECK(std::stod(row2[0]) == 0.9);
    for (const auto& row : {row1, row2}) {
        CHECK(std::stod(row[1]) > 0.0);   // fringe frequency
        CHECK(std::stod(row[3]) > 0.05);  // contrast
    }
    // a weaker lens bends the arms less, so they cross at a shallower angle
    // and the fringes coarsen
    CHECK(std::stod(row1[1]) > std::stod(row2[1]));
    // mirror arms enclose zero net induction (the lens induction is odd in
    // eta), so the fringe shift and the flux difference both vanish together
    const double dphi = std::stod(row1[2]) - std::stod(row2[2]);
    CHECK(std::abs(std::remainder(dphi, 2.0 * pi)) <= 1e-6);
    const double fl1 = std::stod(row1[4]), fl2 = std::stod(row2[4]);
    CHECK(std::abs(fl1 - fl2) <= 1e-10);

    CHECK(fs::exists(res.run_dir / "scale_1" / "trajectory.csv"));
    CHECK(fs::exists(res.run_dir / "scale_0.9" / "trajectory.csv"));
    CHECK(fs::exists(res.run_dir / "snapshots" / "000000_f2.bin"));
}

TEST_CASE("verify_fields passes its identity checks") {
    const auto out = fresh_out("verify_smoke");
    const auto cfg = Config::from_file((config_dir() / "verify_fields.cfg").string());
    const auto res = run_scenario(ScenarioKind::verify_fields, cfg, out, {});
    INFO(res.report);
    CHECK(res.exit_code == 0);
    CHECK(res.report.find("FAIL") == std::string::npos);
    CHECK(res.report.find("PASS") != std::string::npos);

    // header-only trajectory: the scenario propagates nothing
    const auto traj = lines_of(slurp(res.run_dir / "trajectory.csv"));
    REQUIRE(traj.size() == 1);
    CHECK(traj[0] == "tau,norm_f,norm_g,xi_f,eta_f,xi_g,eta_g,xi_tot,eta_tot");
}

TEST_CASE("scenario preconditions reject inconsistent configs") {
    const auto out = fresh_out("precondition");
    auto cfg = smoke("below_threshold.cfg");
    cfg.set("model.delta", "10");  // k^2 = 144 is above 2*delta = 20
    CHECK_THROWS_AS(run_scenario(ScenarioKind::below_threshold, cfg, out, {}),
                    std::invalid_argument);
    CHECK_THROWS_AS(parse_scenario("bogus"), std::invalid_argument);
}
