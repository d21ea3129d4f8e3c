#pragma once
// Measurements on fields and trajectories: channel norms and centroids,
// deflection slope fits, transmission splits, widths, fringe analysis and a
// spectral momentum cross-check.

#include <algorithm>
#include <cmath>
#include <complex>
#include <optional>
#include <stdexcept>
#include <vector>

#include "gaugelens/fft.hpp"
#include "gaugelens/field.hpp"
#include "gaugelens/grid.hpp"
#include "gaugelens/stepper.hpp"

namespace gaugelens {

// Channel norms below this are treated as "no packet here": centroids and
// derived quantities are reported as undefined rather than as noise.
inline constexpr double centroid_norm_floor = 1e-8;

namespace detail {

// Kahan-compensated accumulator; the norm budgets in this library sit at
// 1e-10 where naive 2^18-term sums already contribute.
struct Acc {
    double s = 0.0, c = 0.0;
    void add(double x) {
        const double y = x - c;
        const double t = s + y;
        c = (t - s) - y;
        s = t;
    }
};

}  // namespace detail

struct ChannelNorms {
    double f = 0.0, g = 0.0;
    double total() const { return f + g; }
};

inline ChannelNorms channel_norms(const SpinorField& fld, const Grid& grid) {
    detail::Acc af, ag;
    for (const auto& z : fld.f) af.add(std::norm(z));
    for (const auto& z : fld.g) ag.add(std::norm(z));
    return {af.s * grid.cell_area(), ag.s * grid.cell_area()};
}

struct Centroid {
    double xi = 0.0, eta = 0.0;
};

// Norm-weighted position mean of one channel; nullopt when the channel holds
// less than centroid_norm_floor of probability.
inline std::optional<Centroid> channel_centroid(const SpinorField& fld, const Grid& grid,
                                                Channel ch) {
    const cvec& a = fld.channel(ch);
    const int nx = grid.n_xi(), ny = grid.n_eta();
    detail::Acc n, sx, sy;
    for (int i = 0; i < nx; ++i) {
        const cplx* row = a.data() + std::size_t(i) * ny;
        detail::Acc rn, ry;
        for (int j = 0; j < ny; ++j) {
            const double w = std::norm(row[j]);
            rn.add(w);
            ry.add(w * grid.eta()[j]);
        }
        n.add(rn.s);
        sx.add(rn.s * grid.xi()[i]);
        sy.add(ry.s);
    }
    const double total = n.s * grid.cell_area();
    if (total < centroid_norm_floor) return std::nullopt;
    return Centroid{sx.s / n.s, sy.s / n.s};
}

// Combined-density centroid over both channels (gauge invariant).
inline std::optional<Centroid> total_centroid(const SpinorField& fld, const Grid& grid) {
    const int nx = grid.n_xi(), ny = grid.n_eta();
    detail::Acc n, sx, sy;
    for (int i = 0; i < nx; ++i) {
        const cplx* pf = fld.f.data() + std::size_t(i) * ny;
        const cplx* pg = fld.g.data() + std::size_t(i) * ny;
        detail::Acc rn, ry;
        for (int j = 0; j < ny; ++j) {
            const double w = std::norm(pf[j]) + std::norm(pg[j]);
            rn.add(w);
            ry.add(w * grid.eta()[j]);
        }
        n.add(rn.s);
        sx.add(rn.s * grid.xi()[i]);
        sy.add(ry.s);
    }
    const double total = n.s * grid.cell_area();
    if (total < centroid_norm_floor) return std::nullopt;
    return Centroid{sx.s / n.s, sy.s / n.s};
}

struct TrajectoryRecord {
    double tau = 0.0;
    double norm_f = 0.0, norm_g = 0.0;
    std::optional<Centroid> f;
    std::optional<Centroid> g;
    std::optional<Centroid> total;
};

struct Trajectory {
    std::vector<TrajectoryRecord> records;

    void validate() const {
        for (std::size_t i = 0; i < records.size(); ++i) {
            const auto& r = records[i];
            if (i > 0 && !(r.tau > records[i - 1].tau))
                throw std::logic_error("Trajectory: taus must be strictly increasing");
            if (r.norm_f + r.norm_g > 1.0 + 1e-9)
                throw std::logic_error("Trajectory: total norm exceeds 1 + 1e-9");
        }
    }
};

// Observer that appends one record per sample.
inline Observer record_observer(Trajectory& traj, const Grid& grid) {
    return [&traj, &grid](int, const SpinorField& fld) {
        TrajectoryRecord r;
        r.tau = fld.tau;
        const auto n = channel_norms(fld, grid);
        r.norm_f = n.f;
        r.norm_g = n.g;
        r.f = channel_centroid(fld, grid, Channel::f);
        r.g = channel_centroid(fld, grid, Channel::g);
        r.total = total_centroid(fld, grid);
        traj.records.push_back(r);
    };
}

struct DeflectionResult {
    double tan_theta = 0.0;  // signed slope d eta / d xi of the fitted line
    double intercept = 0.0;
    double residual_rms = 0.0;
    int n_samples = 0;
    Channel channel = Channel::f;
    double tau_first = 0.0, tau_last = 0.0;  // fit window in time
    double xi_first = 0.0, xi_last = 0.0;    // and in mean position
};

// Least-squares line through the late-time channel centroid path, using only
// samples with mean xi past the gate (default 3/beta clears the wall).
inline DeflectionResult fit_deflection(const Trajectory& traj, Channel ch, double xi_gate,
                                       int min_samples = 10) {
    std::vector<double> xs, ys, ts;
    for (const auto& r : traj.records) {
        const auto& c = (ch == Channel::f) ? r.f : r.g;
        if (c && c->xi > xi_gate) {
            xs.push_back(c->xi);
            ys.push_back(c->eta);
            ts.push_back(r.tau);
        }
    }
    if (int(xs.size()) < min_samples)
        throw std::runtime_error("fit_deflection: fewer than the required samples past "
                                 "the gate; propagate longer or lower the gate");
    const int n = int(xs.size());
    double mx = 0.0, my = 0.0;
    for (int i = 0; i < n; ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0;
    for (int i = 0; i < n; ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
    }
    if (sxx <= 0.0) throw std::runtime_error("fit_deflection: degenerate xi samples");
    DeflectionResult out;
    out.tan_theta = sxy / sxx;
    out.intercept = my - out.tan_theta * mx;
    double ss = 0.0;
    for (int i = 0; i < n; ++i) {
        const double e = ys[i] - (out.intercept + out.tan_theta * xs[i]);
        ss += e * e;
    }
    out.residual_rms = std::sqrt(ss / n);
    out.n_samples = n;
    out.channel = ch;
    out.tau_first = ts.front();
    out.tau_last = ts.back();
    out.xi_first = xs.front();
    out.xi_last = xs.back();
    return out;
}

struct TransmissionSplit {
    double f_left = 0.0, f_right = 0.0;
    double g_left = 0.0, g_right = 0.0;
};

// Probability on either side of the wall (xi < cut vs xi >= cut), per channel.
inline TransmissionSplit transmission_split(const SpinorField& fld, const Grid& grid,
                                            double xi_cut = 0.0) {
    const int nx = grid.n_xi(), ny = grid.n_eta();
    TransmissionSplit out;
    detail::Acc fl, fr, gl, gr;
    for (int i = 0; i < nx; ++i) {
        const bool right = grid.xi()[i] >= xi_cut;
        const cplx* pf = fld.f.data() + std::size_t(i) * ny;
        const cplx* pg = fld.g.data() + std::size_t(i) * ny;
        detail::Acc rf, rg;
        for (int j = 0; j < ny; ++j) {
            rf.add(std::norm(pf[j]));
            rg.add(std::norm(pg[j]));
        }
        (right ? fr : fl).add(rf.s);
        (right ? gr : gl).add(rg.s);
    }
    out.f_left = fl.s * grid.cell_area();
    out.f_right = fr.s * grid.cell_area();
    out.g_left = gl.s * grid.cell_area();
    out.g_right = gr.s * grid.cell_area();
    return out;
}

struct EtaWidth {
    double rms = 0.0;   // sqrt of the norm-weighted eta variance
    double fwhm = 0.0;  // full width at half maximum of the eta marginal
};

// Transverse width of the combined density.
inline EtaWidth eta_width(const SpinorField& fld, const Grid& grid) {
    const int nx = grid.n_xi(), ny = grid.n_eta();
    std::vector<double> marg(ny, 0.0);
    for (int i = 0; i < nx; ++i) {
        const cplx* pf = fld.f.data() + std::size_t(i) * ny;
        const cplx* pg = fld.g.data() + std::size_t(i) * ny;
        for (int j = 0; j < ny; ++j) marg[j] += std::norm(pf[j]) + std::norm(pg[j]);
    }
    double n = 0.0, m1 = 0.0;
    for (int j = 0; j < ny; ++j) {
        n += marg[j];
        m1 += marg[j] * grid.eta()[j];
    }
    if (n <= 0.0) throw std::runtime_error("eta_width: empty field");
    m1 /= n;
    double m2 = 0.0;
    for (int j = 0; j < ny; ++j)
        m2 += marg[j] * (grid.eta()[j] - m1) * (grid.eta()[j] - m1);
    EtaWidth out;
    out.rms = std::sqrt(m2 / n);
    const double half = 0.5 * *std::max_element(marg.begin(), marg.end());
    int lo = 0, hi = ny - 1;
    while (lo < ny && marg[lo] < half) ++lo;
    while (hi >= 0 && marg[hi] < half) --hi;
    out.fwhm = (hi > lo) ? grid.eta()[hi] - grid.eta()[lo] : 0.0;
    return out;
}

struct MomentumSample {
    double k_xi = 0.0, k_eta = 0.0;
    double angle = 0.0;  // atan2(k_eta, k_xi)
};

// Spectral mean momentum of one channel; cross-check for fitted slopes.
inline std::optional<MomentumSample> momentum_mean(const SpinorField& fld, const Grid& grid,
                                                   Channel ch) {
    const cvec& a = fld.channel(ch);
    detail::Acc nr;
    for (const auto& z : a) nr.add(std::norm(z));
    if (nr.s * grid.cell_area() < centroid_norm_floor) return std::nullopt;
    cvec work(a.begin(), a.end());
    Fft2D fft(grid.n_xi(), grid.n_eta());
    fft.forward(work);
    const int nx = grid.n_xi(), ny = grid.n_eta();
    detail::Acc n, skx, sky;
    for (int i = 0; i < nx; ++i) {
        const cplx* row = work.data() + std::size_t(i) * ny;
        detail::Acc rn, rky;
        for (int j = 0; j < ny; ++j) {
            const double w = std::norm(row[j]);
            rn.add(w);
            rky.add(w * grid.k_eta()[j]);
        }
        n.add(rn.s);
        skx.add(rn.s * grid.k_xi()[i]);
        sky.add(rky.s);
    }
    MomentumSample out;
    out.k_xi = skx.s / n.s;
    out.k_eta = sky.s / n.s;
    out.angle = std::atan2(out.k_eta, out.k_xi);
    return out;
}

enum class Axis { xi, eta };

struct FringeResult {
    double freq = 0.0;      // dominant spatial frequency along the axis
    double phase = 0.0;     // arg of the spectral amplitude at the peak
    double contrast = 0.0;  // 2|S(q*)| / S(0)
    std::vector<double> profile;
};

// 1D interference profile: combined density integrated across `band` on the
// transverse coordinate, then scanned for its dominant oscillation. Fails
// when no fringe rises above 5% contrast. q_min keeps the envelope's own
// spectral lobe out of the peak search.
inline FringeResult fringe_profile(const SpinorField& fld, const Grid& grid, Axis axis,
                                   double band_lo, double band_hi, double q_min = 2.0) {
    if (!(band_hi > band_lo)) throw std::invalid_argument("fringe_profile: empty band");
    const int nx = grid.n_xi(), ny = grid.n_eta();
    const int np = (axis == Axis::eta) ? ny : nx;
    const auto& coord = (axis == Axis::eta) ? grid.eta() : grid.xi();
    const auto& tcoord = (axis == Axis::eta) ? grid.xi() : grid.eta();
    std::vector<double> prof(np, 0.0);
    for (int i = 0; i < nx; ++i) {
        const cplx* pf = fld.f.data() + std::size_t(i) * ny;
        const cplx* pg = fld.g.data() + std::size_t(i) * ny;
        for (int j = 0; j < ny; ++j) {
            const double w = std::norm(pf[j]) + std::norm(pg[j]);
            const int p = (axis == Axis::eta) ? j : i;
            const int tr = (axis == Axis::eta) ? i : j;
            if (tcoord[tr] >= band_lo && tcoord[tr] <= band_hi) prof[p] += w;
        }
    }
    // direct DFT of the profile at the grid's own frequencies
    const double L = coord.back() - coord.front() +
                     ((axis == Axis::eta) ? grid.h_eta() : grid.h_xi());
    const double dq = 2.0 * pi / L;
    double s0 = 0.0;
    for (double v : prof) s0 += v;
    if (s0 <= 0.0) throw std::runtime_error("fringe_profile: empty band");
    double best_q = 0.0, best_mag = 0.0;
    cplx best_s(0.0, 0.0);
    for (int m = 1; m <= np / 2; ++m) {
        const double q = m * dq;
        if (q < q_min) continue;
        cplx s(0.0, 0.0);
        for (int p = 0; p < np; ++p)
            s += prof[p] * std::polar(1.0, -q * coord[p]);
        if (std::abs(s) > best_mag) {
            best_mag = std::abs(s);
            best_q = q;
            best_s = s;
        }
    }
    FringeResult out;
    out.freq = best_q;
    out.phase = std::arg(best_s);
    out.contrast = 2.0 * best_mag / s0;
    out.profile = std::move(prof);
    if (out.contrast < 0.05)
        throw std::runtime_error("fringe_profile: no detectable fringe (contrast < 0.05)");
    return out;
}

}  // namespace gaugelens
