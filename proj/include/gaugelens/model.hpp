#pragma once
// Closed-form layer of the two-channel gauge model: mixing angle, diabatic
// potential matrix, split-operator kick, adiabatic connection, effective
// induction and the analytic deflection law. Pure algebra on (xi, eta);
// no grids or fields here.
//
// Conventions used throughout the library:
//   i d_tau psi = (-laplacian + H) psi, so a plane wave e^{i k xi} moves with
//   group speed 2k and the spectral kinetic factor is exp(-i kappa^2 dtau).
//   The off-diagonal coupling carries exp(-i chi(eta)), chi(eta) = eta*Phi(eta).
//   With Phi > 0 the projected induction B is positive inside the wall and a
//   +xi moving packet swerves toward -eta (dv/dtau = 2 v x B zhat).

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace gaugelens {

using cplx = std::complex<double>;
inline constexpr double pi = std::numbers::pi;

// Minimal dense 2x2 complex matrix; enough for kicks, connections, holonomies.
struct Mat2 {
    cplx a11{0.0}, a12{0.0}, a21{0.0}, a22{0.0};

    static Mat2 identity() { return {1.0, 0.0, 0.0, 1.0}; }

    Mat2 operator*(const Mat2& o) const {
        return {a11 * o.a11 + a12 * o.a21, a11 * o.a12 + a12 * o.a22,
                a21 * o.a11 + a22 * o.a21, a21 * o.a12 + a22 * o.a22};
    }
    Mat2 adjoint() const {
        return {std::conj(a11), std::conj(a21), std::conj(a12), std::conj(a22)};
    }
    double max_abs_diff(const Mat2& o) const {
        return std::max(std::max(std::abs(a11 - o.a11), std::abs(a12 - o.a12)),
                        std::max(std::abs(a21 - o.a21), std::abs(a22 - o.a22)));
    }
};

enum class FluxKind { constant, lens };

// Transverse flux profile Phi(eta). The coupling phase is chi = eta*Phi(eta);
// the quantity that actually drives the induction is D = d chi / d eta.
struct FluxProfile {
    FluxKind kind = FluxKind::constant;
    double phi = 0.0;    // constant: the flux value
    double k = 0.0;      // lens: carrier wavenumber
    double f = 0.0;      // lens: focal parameter
    double gamma = 1.0;  // lens: shape constant, > 0
    double scale = 1.0;  // global multiplier on Phi (interferometer sweeps)

    static FluxProfile make_constant(double phi_) {
        FluxProfile p;
        p.kind = FluxKind::constant;
        p.phi = phi_;
        return p;
    }
    static FluxProfile make_lens(double k_, double gamma_, double f_) {
        if (gamma_ <= 0.0) throw std::invalid_argument("lens flux: gamma must be > 0");
        if (f_ <= 0.0) throw std::invalid_argument("lens flux: f must be > 0");
        FluxProfile p;
        p.kind = FluxKind::lens;
        p.k = k_;
        p.gamma = gamma_;
        p.f = f_;
        return p;
    }
    FluxProfile with_scale(double s) const {
        FluxProfile p = *this;
        p.scale = s;
        return p;
    }
};

// Lens profile value Phi(eta) = eta k / sqrt(eta^2 + 4 gamma f^2).
inline double lens_flux(double eta, double k, double gamma, double f) {
    if (gamma <= 0.0) throw std::invalid_argument("lens_flux: gamma must be > 0");
    if (f <= 0.0) throw std::invalid_argument("lens_flux: f must be > 0");
    return eta * k / std::sqrt(eta * eta + 4.0 * gamma * f * f);
}

inline double flux_value(const FluxProfile& p, double eta) {
    switch (p.kind) {
        case FluxKind::constant: return p.scale * p.phi;
        case FluxKind::lens: return p.scale * lens_flux(eta, p.k, p.gamma, p.f);
    }
    throw std::logic_error("flux_value: bad kind");
}

// chi(eta) = eta * Phi(eta), the coupling phase.
inline double flux_chi(const FluxProfile& p, double eta) {
    return eta * flux_value(p, eta);
}

// D(eta) = d chi / d eta. Constant profile: D = Phi. Lens:
// D = k eta (eta^2 + 8 gamma f^2) / (eta^2 + 4 gamma f^2)^{3/2}.
inline double flux_D(const FluxProfile& p, double eta) {
    switch (p.kind) {
        case FluxKind::constant: return p.scale * p.phi;
        case FluxKind::lens: {
            const double r2 = eta * eta + 4.0 * p.gamma * p.f * p.f;
            return p.scale * p.k * eta * (eta * eta + 8.0 * p.gamma * p.f * p.f) /
                   (r2 * std::sqrt(r2));
        }
    }
    throw std::logic_error("flux_D: bad kind");
}

struct ModelParams {
    double delta = 0.0;  // channel splitting; eigenvalues of the potential are +/- delta
    double beta = 2.0;   // wall steepness, > 0
    FluxProfile flux;

    void validate() const {
        if (beta <= 0.0) throw std::invalid_argument("ModelParams: beta must be > 0");
        if (delta < 0.0) throw std::invalid_argument("ModelParams: delta must be >= 0");
    }
};

// Mixing angle Omega(xi) = (pi/4)(1 + tanh(beta xi)); 0 at -inf, pi/2 at +inf.
inline double mixing_angle(double xi, double beta) {
    return 0.25 * pi * (1.0 + std::tanh(beta * xi));
}

inline double mixing_angle_deriv(double xi, double beta) {
    const double c = std::cosh(beta * xi);
    return 0.25 * pi * beta / (c * c);
}

// Diabatic potential matrix, Hermitian with eigenvalues +/- delta everywhere:
//   [  delta cos2Omega         delta sin2Omega e^{-i chi} ]
//   [  delta sin2Omega e^{i chi}   -delta cos2Omega       ]
inline Mat2 diabatic_potential(double xi, double eta, const ModelParams& m) {
    const double om2 = 2.0 * mixing_angle(xi, m.beta);
    const double v = m.delta * std::cos(om2);
    const cplx ph = std::polar(1.0, -flux_chi(m.flux, eta));
    const cplx v12 = m.delta * std::sin(om2) * ph;
    return {v, v12, std::conj(v12), -v};
}

// One potential kick exp(-i H dtau), written out in closed form. Unitary.
inline Mat2 kick_matrix(double xi, double eta, const ModelParams& m, double dtau) {
    const double om2 = 2.0 * mixing_angle(xi, m.beta);
    const double cd = std::cos(m.delta * dtau);
    const double sd = std::sin(m.delta * dtau);
    const double c2 = std::cos(om2), s2 = std::sin(om2);
    const cplx ph = std::polar(1.0, -flux_chi(m.flux, eta));
    const cplx mi(0.0, -1.0);
    return {cplx(cd, -c2 * sd), mi * ph * (s2 * sd),
            mi * std::conj(ph) * (s2 * sd), cplx(cd, c2 * sd)};
}

// Adiabatic-frame connection a_mu = i W d_mu W^dagger, W the frame rotation
// (f~ = f cosOmega + e^{-i chi} sinOmega g, g~ = g cosOmega - e^{i chi} sinOmega f).
// Both components are traceless Hermitian; a_xi has zero diagonal, so the
// projected Abelian piece is a~ = (0, D(eta) sin^2 Omega).
struct ConnectionSample {
    Mat2 a_xi;
    Mat2 a_eta;
};

inline ConnectionSample connection(double xi, double eta, const ModelParams& m) {
    const double om = mixing_angle(xi, m.beta);
    const double dom = mixing_angle_deriv(xi, m.beta);
    const double s = std::sin(om), c = std::cos(om);
    const double D = flux_D(m.flux, eta);
    const cplx ph = std::polar(1.0, -flux_chi(m.flux, eta));
    const cplx i1(0.0, 1.0);
    ConnectionSample out;
    out.a_xi = {0.0, -i1 * dom * ph, i1 * dom * std::conj(ph), 0.0};
    out.a_eta = {-D * s * s, -D * s * c * ph, -D * s * c * std::conj(ph), D * s * s};
    return out;
}

// Projected (Abelian) induction B = d_xi [ D(eta) sin^2 Omega(xi) ].
inline double effective_B(double xi, double eta, const ModelParams& m) {
    const double om = mixing_angle(xi, m.beta);
    return flux_D(m.flux, eta) * mixing_angle_deriv(xi, m.beta) * std::sin(2.0 * om);
}

// Scalar (off-diagonal) potential b = |a_xi,12|^2 + |a_eta,12|^2.
inline double scalar_potential(double xi, double eta, const ModelParams& m) {
    const double om = mixing_angle(xi, m.beta);
    const double dom = mixing_angle_deriv(xi, m.beta);
    const double s = std::sin(om), c = std::cos(om);
    const double D = flux_D(m.flux, eta);
    return dom * dom + D * D * s * s * c * c;
}

// Straight-line deflection law |tan theta| = |Phi| / sqrt(k^2 - Phi^2).
// Only meaningful while the transverse kick stays below the carrier.
inline double analytic_deflection(double k, double phi) {
    if (std::abs(phi) >= std::abs(k))
        throw std::domain_error(
            "analytic_deflection: |Phi| >= k, no transmitted straight-line asymptote");
    return std::abs(phi) / std::sqrt(k * k - phi * phi);
}

// exp(-i M) for traceless Hermitian M = [[a, w], [conj w, -a]] in closed form:
// exp(-iM) = cos|c| I - i sinc(|c|) M with |c|^2 = a^2 + |w|^2.
inline Mat2 exp_minus_i_traceless(const Mat2& m) {
    const double a = m.a11.real();
    const double c = std::sqrt(a * a + std::norm(m.a12));
    const double cs = std::cos(c);
    const double sn = (c > 1e-30) ? std::sin(c) / c : 1.0 - c * c / 6.0;
    const cplx mi(0.0, -1.0);
    return {cs + mi * sn * m.a11, mi * sn * m.a12, mi * sn * m.a21, cs + mi * sn * m.a22};
}

struct LoopPoint {
    double xi, eta;
};

// Path-ordered product of exp(+i a . dr) over the closed polyline, the
// transport whose open-path value telescopes to W(end) W(start)^dagger for a
// pure-gauge connection. The connection is evaluated at segment midpoints;
// later segments multiply from the left. Around any closed loop the product
// tends to the identity as the segmentation refines.
inline Mat2 holonomy_loop(const std::vector<LoopPoint>& loop, const ModelParams& m) {
    if (loop.size() < 4)
        throw std::invalid_argument("holonomy_loop: need at least 3 segments");
    const auto& first = loop.front();
    const auto& last = loop.back();
    if (std::abs(first.xi - last.xi) > 1e-12 || std::abs(first.eta - last.eta) > 1e-12)
        throw std::invalid_argument("holonomy_loop: loop is not closed");
    Mat2 out = Mat2::identity();
    for (std::size_t i = 0; i + 1 < loop.size(); ++i) {
        const double dxi = loop[i + 1].xi - loop[i].xi;
        const double deta = loop[i + 1].eta - loop[i].eta;
        const double mx = 0.5 * (loop[i].xi + loop[i + 1].xi);
        const double my = 0.5 * (loop[i].eta + loop[i + 1].eta);
        const ConnectionSample cs = connection(mx, my, m);
        // exp(+i a.dr) via exp(-i M) with M = -a.dr
        const Mat2 seg{-(cs.a_xi.a11 * dxi + cs.a_eta.a11 * deta),
                       -(cs.a_xi.a12 * dxi + cs.a_eta.a12 * deta),
                       -(cs.a_xi.a21 * dxi + cs.a_eta.a21 * deta),
                       -(cs.a_xi.a22 * dxi + cs.a_eta.a22 * deta)};
        out = exp_minus_i_traceless(seg) * out;
    }
    return out;
}

// Holonomy of the projected Abelian connection, the upper diagonal of a_eta:
// a~_eta = -D sin^2 Omega. Same exp(+i a . dr) transport as holonomy_loop,
// reduced to a scalar phase; by Stokes this is e^{-i (enclosed flux)}.
inline cplx projected_holonomy_phase(const std::vector<LoopPoint>& loop, const ModelParams& m) {
    if (loop.size() < 4)
        throw std::invalid_argument("projected_holonomy_phase: need at least 3 segments");
    const auto& first = loop.front();
    const auto& last = loop.back();
    if (std::abs(first.xi - last.xi) > 1e-12 || std::abs(first.eta - last.eta) > 1e-12)
        throw std::invalid_argument("projected_holonomy_phase: loop is not closed");
    double theta = 0.0;
    for (std::size_t i = 0; i + 1 < loop.size(); ++i) {
        const double deta = loop[i + 1].eta - loop[i].eta;
        if (deta == 0.0) continue;
        const double mx = 0.5 * (loop[i].xi + loop[i + 1].xi);
        const double my = 0.5 * (loop[i].eta + loop[i + 1].eta);
        const double om = mixing_angle(mx, m.beta);
        const double s = std::sin(om);
        theta += flux_D(m.flux, my) * s * s * deta;
    }
    return std::polar(1.0, -theta);
}

}  // namespace gaugelens
