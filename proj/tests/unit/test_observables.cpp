#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>

#include "gaugelens/observables.hpp"

using namespace gaugelens;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

GridSpec box(int n = 64) {
    GridSpec gs;
    gs.n_xi = n;
    gs.n_eta = n;
    gs.xi_min = -3.0 * pi;
    gs.xi_max = 3.0 * pi;
    gs.eta_min = -3.0 * pi;
    gs.eta_max = 3.0 * pi;
    return gs;
}

std::size_t at(const Grid& g, int i, int j) { return std::size_t(i) * g.n_eta() + j; }

}  // namespace

TEST_CASE("channel norms and centroids on a hand-built field") {
    const Grid grid(box());
    SpinorField fld = SpinorField::zeros(grid);

    // two point masses in g, 3:1, and nothing in f
    const int i1 = 40, j1 = 10, i2 = 20, j2 = 50;
    fld.g[at(grid, i1, j1)] = cplx(std::sqrt(3.0), 0.0);
    fld.g[at(grid, i2, j2)] = cplx(0.0, 1.0);

    const auto n = channel_norms(fld, grid);
    CHECK_THAT(n.g, WithinRel(4.0 * grid.cell_area(), 1e-12));
    CHECK(n.f == 0.0);
    CHECK_THAT(n.total(), WithinRel(n.g, 1e-15));

    CHECK_FALSE(channel_centroid(fld, grid, Channel::f).has_value());
    const auto c = channel_centroid(fld, grid, Channel::g);
    REQUIRE(c.has_value());
    const double wx = (3.0 * grid.xi()[i1] + 1.0 * grid.xi()[i2]) / 4.0;
    const double wy = (3.0 * grid.eta()[j1] + 1.0 * grid.eta()[j2]) / 4.0;
    CHECK_THAT(c->xi, WithinAbs(wx, 1e-12));
    CHECK_THAT(c->eta, WithinAbs(wy, 1e-12));

    const auto t = total_centroid(fld, grid);
    REQUIRE(t.has_value());
    CHECK_THAT(t->xi, WithinAbs(wx, 1e-12));

    // below the norm floor the centroid reads undefined
    SpinorField faint = SpinorField::zeros(grid);
    faint.f[at(grid, 5, 5)] = cplx(1e-6, 0.0);
    CHECK_FALSE(channel_centroid(faint, grid, Channel::f).has_value());
    CHECK_FALSE(total_centroid(faint, grid).has_value());
}

TEST_CASE("deflection fit recovers a synthetic centroid line") {
    Trajectory traj;
    const double slope = -0.577, icept = 0.9;
    for (int s = 0; s <= 40; ++s) {
        TrajectoryRecord r;
        r.tau = 0.01 * s;
        r.norm_f = 0.5;
        r.norm_g = 0.5;
        const double xi = -1.0 + 0.15 * s;
        r.f = Centroid{xi, icept + slope * xi};
        traj.records.push_back(r);
    }
    traj.validate();

    const auto fit = fit_deflection(traj, Channel::f, 1.5);
    CHECK(fit.n_samples == 24);
    CHECK_THAT(fit.tan_theta, WithinAbs(slope, 1e-12));
    CHECK_THAT(fit.intercept, WithinAbs(icept, 1e-12));
    CHECK_THAT(fit.residual_rms, WithinAbs(0.0, 1e-12));
    CHECK(fit.xi_first > 1.5);
    CHECK(fit.xi_last == Catch::Approx(5.0));
    CHECK(fit.tau_last == Catch::Approx(0.4));

    CHECK_THROWS_AS(fit_deflection(traj, Channel::f, 4.5), std::runtime_error);
    CHECK_THROWS_AS(fit_deflection(traj, Channel::g, 1.5), std::runtime_error);
    CHECK_NOTHROW(fit_deflection(traj, Channel::f, 4.5, 3));
}

TEST_CASE("trajectory validation rejects bad series") {
    Trajectory traj;
    TrajectoryRecord a, b;
    a.tau = 0.0;
    b.tau = 0.0;  // not strictly increasing
    traj.records = {a, b};
    CHECK_THROWS_AS(traj.validate(), std::logic_error);

    traj.records[1].tau = 0.1;
    CHECK_NOTHROW(traj.validate());

    traj.records[1].norm_f = 0.9;
    traj.records[1].norm_g = 0.2;  // overfull
    CHECK_THROWS_AS(traj.validate(), std::logic_error);
}

TEST_CASE("transmission split partitions the norm at the cut") {
    const Grid grid(box());
    SpinorField fld = SpinorField::zeros(grid);
    // xi() index 32 is the first point with xi >= 0 on this box
    fld.f[at(grid, 10, 3)] = cplx(1.0, 0.0);   // left
    fld.f[at(grid, 50, 3)] = cplx(2.0, 0.0);   // right
    fld.g[at(grid, 31, 60)] = cplx(1.0, 0.0);  // left, one cell shy of the cut
    fld.g[at(grid, 32, 60)] = cplx(3.0, 0.0);  // right, exactly on the cut

    const auto s = transmission_split(fld, grid, 0.0);
    const double ca = grid.cell_area();
    CHECK_THAT(s.f_left, WithinRel(1.0 * ca, 1e-12));
    CHECK_THAT(s.f_right, WithinRel(4.0 * ca, 1e-12));
    CHECK_THAT(s.g_left, WithinRel(1.0 * ca, 1e-12));
    CHECK_THAT(s.g_right, WithinRel(9.0 * ca, 1e-12));
}

TEST_CASE("eta width of a gaussian marginal") {
    const Grid grid(box(128));
    PacketSpec sp;
    sp.sigma_eta = 0.85;
    sp.sigma_xi = 0.5;
    const SpinorField fld = make_packet(grid, sp, Channel::g);

    const auto w = eta_width(fld, grid);
    CHECK_THAT(w.rms, WithinRel(0.85, 1e-3));
    // FWHM of a gaussian density with rms sigma, up to one grid cell
    CHECK_THAT(w.fwhm, WithinAbs(2.3548 * 0.85, 2.0 * grid.h_eta()));

    CHECK_THROWS_AS(eta_width(SpinorField::zeros(grid), grid), std::runtime_error);
}

TEST_CASE("spectral momentum mean reads back the carrier") {
    const Grid grid(box(128));
    PacketSpec sp;
    sp.k_xi = 4.0;
    sp.k_eta = 1.0;
    const SpinorField fld = make_packet(grid, sp, Channel::f);

    const auto mk = momentum_mean(fld, grid, Channel::f);
    REQUIRE(mk.has_value());
    CHECK_THAT(mk->k_xi, WithinAbs(4.0, 1e-6));
    CHECK_THAT(mk->k_eta, WithinAbs(1.0, 1e-6));
    CHECK_THAT(mk->angle, WithinAbs(std::atan2(1.0, 4.0), 1e-6));
    CHECK_FALSE(momentum_mean(fld, grid, Channel::g).has_value());
}

TEST_CASE("fringe profile recovers frequency, phase, and contrast") {
    const Grid grid(box(128));
    SpinorField fld = SpinorField::zeros(grid);
    const double L = grid.spec().eta_max - grid.spec().eta_min;
    const double q0 = 24.0 * 2.0 * pi / L;  // exactly on a grid frequency
    const double phi0 = 0.8;

    for (int i = 0; i < grid.n_xi(); ++i) {
        const double x = grid.xi()[i];
        const double envx = std::exp(-x * x / 8.0);
        for (int j = 0; j < grid.n_eta(); ++j) {
            const double y = grid.eta()[j];
            const double env = envx * std::exp(-y * y / 8.0);
            const double dens = env * (1.0 + std::cos(q0 * y + phi0));
            fld.g[at(grid, i, j)] = cplx(std::sqrt(dens), 0.0);
        }
    }

    const auto fr = fringe_profile(fld, grid, Axis::eta, -2.0, 2.0, 2.0);
    CHECK_THAT(fr.freq, WithinAbs(q0, 1e-12));
    CHECK_THAT(fr.phase, WithinAbs(phi0, 1e-3));
    CHECK(fr.contrast > 0.8);
    CHECK(int(fr.profile.size()) == grid.n_eta());

    // flat density has no fringe to find
    SpinorField flat = SpinorField::zeros(grid);
    for (int i = 0; i < grid.n_xi(); ++i)
        for (int j = 0; j < grid.n_eta(); ++j)
            flat.g[at(grid, i, j)] = cplx(
                std::exp(-(grid.xi()[i] * grid.xi()[i] + grid.eta()[j] * grid.eta()[j]) / 8.0),
                0.0);
    CHECK_THROWS_AS(fringe_profile(flat, grid, Axis::eta, -2.0, 2.0, 2.0), std::runtime_error);
    CHECK_THROWS_AS(fringe_profile(fld, grid, Axis::eta, 2.0, -2.0), std::invalid_argument);
}
