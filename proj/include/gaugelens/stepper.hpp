#pragma once
// Strang-split spectral propagator for the two-channel field:
//   psi(tau + dtau) = K(dtau/2) V(dtau) K(dtau/2) psi(tau)
// with K applied in Fourier space (factor exp(-i kappa^2 dtau)) and V the
// closed-form pointwise kick. Between observer samples the adjacent half
// kinetic factors are fused into whole steps; the state handed to observers
// always has its half step completed.
//
// The kick factorizes into per-row angle terms and a per-column flux phase,
// so each step costs one forward/backward FFT pair per channel plus O(n^2)
// scalar work. Hot loops spell out complex arithmetic to keep the compiler
// out of the library multiply call.

#include <cmath>
#include <complex>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "gaugelens/fft.hpp"
#include "gaugelens/field.hpp"
#include "gaugelens/grid.hpp"
#include "gaugelens/model.hpp"

namespace gaugelens {

struct AbsorberSpec {
    bool enabled = false;
    double width = 0.5;  // margin width at every edge
};

struct RunConfig {
    double dtau = 1e-4;
    int n_steps = 0;
    int snapshot_stride = 1;  // observer cadence in steps
    AbsorberSpec absorber;
};

using Observer = std::function<void(int step, const SpinorField&)>;

namespace detail {

struct StepTables {
    cvec kin_full, kin_half;             // spectral factors, 1/N folded in
    std::vector<cplx> d1, d2;            // kick diagonal per xi row
    std::vector<double> off;             // kick off-diagonal magnitude per row
    std::vector<cplx> mip, mipc;         // -i p(eta), -i conj(p(eta)) per column
    std::vector<double> mask;            // absorber, empty when disabled

    StepTables(const Grid& grid, const ModelParams& m, const RunConfig& rc) {
        const int nx = grid.n_xi(), ny = grid.n_eta();
        const double invn = 1.0 / (double(nx) * double(ny));
        kin_full.resize(grid.size());
        kin_half.resize(grid.size());
        for (int i = 0; i < nx; ++i) {
            const double kx2 = grid.k_xi()[i] * grid.k_xi()[i];
            for (int j = 0; j < ny; ++j) {
                const double k2 = kx2 + grid.k_eta()[j] * grid.k_eta()[j];
                const std::size_t idx = std::size_t(i) * ny + j;
                kin_full[idx] = std::polar(invn, -k2 * rc.dtau);
                kin_half[idx] = std::polar(invn, -k2 * rc.dtau * 0.5);
            }
        }
        d1.resize(nx);
        d2.resize(nx);
        off.resize(nx);
        const double cd = std::cos(m.delta * rc.dtau);
        const double sd = std::sin(m.delta * rc.dtau);
        for (int i = 0; i < nx; ++i) {
            const double om2 = 2.0 * mixing_angle(grid.xi()[i], m.beta);
            d1[i] = cplx(cd, -std::cos(om2) * sd);
            d2[i] = cplx(cd, +std::cos(om2) * sd);
            off[i] = std::sin(om2) * sd;
        }
        mip.resize(ny);
        mipc.resize(ny);
        for (int j = 0; j < ny; ++j) {
            const cplx p = std::polar(1.0, -flux_chi(m.flux, grid.eta()[j]));
            mip[j] = cplx(0.0, -1.0) * p;
            mipc[j] = cplx(0.0, -1.0) * std::conj(p);
        }
        if (rc.absorber.enabled) {
            if (rc.absorber.width <= 0.0)
                throw std::invalid_argument("absorber width must be > 0");
            mask.resize(grid.size());
            auto edge = [&](double d) {
                if (d >= rc.absorber.width) return 1.0;
                const double s = std::sin(0.5 * pi * d / rc.absorber.width);
                const double s2 = s * s;
                return s2 * s2 * s2 * s2;  // cos^8 ramp measured from the edge
            };
            const auto& gs = grid.spec();
            for (int i = 0; i < nx; ++i) {
                const double mxi = edge(std::min(grid.xi()[i] - gs.xi_min,
                                                 gs.xi_max - grid.xi()[i]));
                for (int j = 0; j < ny; ++j) {
                    const double meta = edge(std::min(grid.eta()[j] - gs.eta_min,
                                                      gs.eta_max - grid.eta()[j]));
                    mask[std::size_t(i) * ny + j] = mxi * meta;
                }
            }
        }
    }
};

inline void spectral_multiply(cvec& x, const cvec& t) {
    const std::size_t n = x.size();
    for (std::size_t idx = 0; idx < n; ++idx) {
        const double ar = x[idx].real(), ai = x[idx].imag();
        const double br = t[idx].real(), bi = t[idx].imag();
        x[idx] = cplx(ar * br - ai * bi, ar * bi + ai * br);
    }
}

inline void apply_kinetic(SpinorField& fld, const Fft2D& fft, const cvec& table) {
    fft.forward(fld.f);
    spectral_multiply(fld.f, table);
    fft.backward(fld.f);
    fft.forward(fld.g);
    spectral_multiply(fld.g, table);
    fft.backward(fld.g);
}

inline void apply_kick(SpinorField& fld, const StepTables& t, int nx, int ny) {
    for (int i = 0; i < nx; ++i) {
        const double o = t.off[i];
        const double d1r = t.d1[i].real(), d1i = t.d1[i].imag();
        const double d2r = t.d2[i].real(), d2i = t.d2[i].imag();
        cplx* pf = fld.f.data() + std::size_t(i) * ny;
        cplx* pg = fld.g.data() + std::size_t(i) * ny;
        for (int j = 0; j < ny; ++j) {
            const double fr = pf[j].real(), fi = pf[j].imag();
            const double gr = pg[j].real(), gi = pg[j].imag();
            const double ur = o * t.mip[j].real(), ui = o * t.mip[j].imag();
            const double vr = o * t.mipc[j].real(), vi = o * t.mipc[j].imag();
            pf[j] = cplx(d1r * fr - d1i * fi + ur * gr - ui * gi,
                         d1r * fi + d1i * fr + ur * gi + ui * gr);
            pg[j] = cplx(vr * fr - vi * fi + d2r * gr - d2i * gi,
                         vr * fi + vi * fr + d2r * gi + d2i * gr);
        }
    }
}

inline void apply_mask(SpinorField& fld, const std::vector<double>& mask) {
    const std::size_t n = mask.size();
    for (std::size_t idx = 0; idx < n; ++idx) {
        fld.f[idx] *= mask[idx];
        fld.g[idx] *= mask[idx];
    }
}

inline void check_finite(const SpinorField& fld, int step) {
    double acc = 0.0;
    for (const auto& z : fld.f) acc += std::norm(z);
    for (const auto& z : fld.g) acc += std::norm(z);
    if (!std::isfinite(acc))
        throw std::runtime_error("propagate: field diverged (non-finite norm at step " +
                                 std::to_string(step) + ")");
}

}  // namespace detail

// One Strang step K/2 V K/2, no fusion. Mostly useful in tests; propagate()
// composes the same operators with the half factors merged between samples.
inline void step(SpinorField& fld, const Grid& grid, const ModelParams& m, double dtau) {
    if (fld.gauge != Gauge::diabatic)
        throw std::invalid_argument("step: propagation runs in the diabatic gauge");
    RunConfig rc;
    rc.dtau = dtau;
    detail::StepTables t(grid, m, rc);
    Fft2D fft(grid.n_xi(), grid.n_eta());
    detail::apply_kinetic(fld, fft, t.kin_half);
    detail::apply_kick(fld, t, grid.n_xi(), grid.n_eta());
    detail::apply_kinetic(fld, fft, t.kin_half);
    fld.tau += dtau;
}

// Advance n_steps, invoking the observer on the initial state, every
// snapshot_stride-th step and the final step. The observed field always has
// whole Strang steps behind it.
inline void propagate(SpinorField& fld, const Grid& grid, const ModelParams& m,
                      const RunConfig& rc, const Observer& observer = {}) {
    if (fld.gauge != Gauge::diabatic)
        throw std::invalid_argument("propagate: field must be in the diabatic gauge");
    if (fld.n_xi != grid.n_xi() || fld.n_eta != grid.n_eta())
        throw std::invalid_argument("propagate: grid mismatch");
    if (rc.dtau <= 0.0) throw std::invalid_argument("propagate: dtau must be > 0");
    if (rc.n_steps < 0) throw std::invalid_argument("propagate: n_steps must be >= 0");
    if (rc.snapshot_stride < 1)
        throw std::invalid_argument("propagate: snapshot_stride must be >= 1");
    m.validate();

    detail::StepTables t(grid, m, rc);
    Fft2D fft(grid.n_xi(), grid.n_eta());
    const int nx = grid.n_xi(), ny = grid.n_eta();
    const double tau0 = fld.tau;

    if (observer) observer(0, fld);

    if (rc.absorber.enabled) {
        // The mask acts in position space after every step, which pins the
        // half factors to each step; nothing to fuse.
        for (int s = 1; s <= rc.n_steps; ++s) {
            detail::apply_kinetic(fld, fft, t.kin_half);
            detail::apply_kick(fld, t, nx, ny);
            detail::apply_kinetic(fld, fft, t.kin_half);
            detail::apply_mask(fld, t.mask);
            fld.tau = tau0 + s * rc.dtau;
            if (s % rc.snapshot_stride == 0 || s == rc.n_steps) {
                detail::check_finite(fld, s);
                if (observer) observer(s, fld);
            }
        }
        return;
    }

    int s = 0;
    while (s < rc.n_steps) {
        const int chunk = std::min(rc.snapshot_stride, rc.n_steps - s);
        detail::apply_kinetic(fld, fft, t.kin_half);
        for (int c = 0; c < chunk; ++c) {
            detail::apply_kick(fld, t, nx, ny);
            detail::apply_kinetic(fld, fft, c + 1 < chunk ? t.kin_full : t.kin_half);
        }
        s += chunk;
        fld.tau = tau0 + s * rc.dtau;
        detail::check_finite(fld, s);
        if (observer) observer(s, fld);
    }
}

}  // namespace gaugelens
