#pragma once
// Two-channel field storage, Gaussian packet construction, and the pointwise
// unitary rotation between diabatic and adiabatic frames.

#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "gaugelens/fft.hpp"
#include "gaugelens/grid.hpp"
#include "gaugelens/model.hpp"

namespace gaugelens {

enum class Gauge { diabatic, adiabatic };
enum class Channel { f, g };

struct SpinorField {
    int n_xi = 0, n_eta = 0;
    cvec f, g;
    Gauge gauge = Gauge::diabatic;
    double tau = 0.0;

    static SpinorField zeros(const Grid& grid) {
        SpinorField out;
        out.n_xi = grid.n_xi();
        out.n_eta = grid.n_eta();
        out.f.assign(grid.size(), cplx(0.0, 0.0));
        out.g.assign(grid.size(), cplx(0.0, 0.0));
        return out;
    }

    cvec& channel(Channel c) { return c == Channel::f ? f : g; }
    const cvec& channel(Channel c) const { return c == Channel::f ? f : g; }
};

// Gaussian packet N exp(-(xi-xi0)^2/(4 sx^2) - (eta-eta0)^2/(4 sy^2)) e^{i k.r}.
// sigma is the rms width of the density |psi|^2.
struct PacketSpec {
    double xi0 = 0.0, eta0 = 0.0;
    double k_xi = 0.0, k_eta = 0.0;
    double sigma_xi = 0.5, sigma_eta = 0.5;
    double weight = 1.0;  // relative amplitude inside a superposition
};

// Boundary tails above this fraction of the peak amplitude abort packet
// construction: on a periodic box such a packet would overlap its own images.
inline constexpr double packet_tail_tol = 1e-12;

namespace detail {

inline void check_packet(const Grid& grid, const PacketSpec& sp) {
    if (sp.sigma_xi <= 0.0 || sp.sigma_eta <= 0.0)
        throw std::invalid_argument("make_packet: widths must be > 0");
    const auto& s = grid.spec();
    const double mx = std::min(sp.xi0 - s.xi_min, s.xi_max - sp.xi0);
    const double my = std::min(sp.eta0 - s.eta_min, s.eta_max - sp.eta0);
    if (mx < 0.0 || my < 0.0)
        throw std::invalid_argument("make_packet: center outside the domain");
    const double ax = std::exp(-mx * mx / (4.0 * sp.sigma_xi * sp.sigma_xi));
    const double ay = std::exp(-my * my / (4.0 * sp.sigma_eta * sp.sigma_eta));
    if (std::max(ax, ay) > packet_tail_tol)
        throw std::invalid_argument(
            "make_packet: boundary tail above 1e-12 of peak; widen the domain or "
            "narrow the packet");
}

inline void add_packet(const Grid& grid, const PacketSpec& sp, cvec& dst) {
    const int nx = grid.n_xi(), ny = grid.n_eta();
    std::vector<cplx> colx(nx);
    std::vector<cplx> coly(ny);
    for (int i = 0; i < nx; ++i) {
        const double d = grid.xi()[i] - sp.xi0;
        colx[i] = std::polar(std::exp(-d * d / (4.0 * sp.sigma_xi * sp.sigma_xi)),
                             sp.k_xi * grid.xi()[i]);
    }
    for (int j = 0; j < ny; ++j) {
        const double d = grid.eta()[j] - sp.eta0;
        coly[j] = std::polar(std::exp(-d * d / (4.0 * sp.sigma_eta * sp.sigma_eta)),
                             sp.k_eta * grid.eta()[j]);
    }
    for (int i = 0; i < nx; ++i) {
        const cplx cx = sp.weight * colx[i];
        cplx* row = dst.data() + std::size_t(i) * ny;
        for (int j = 0; j < ny; ++j) row[j] += cx * coly[j];
    }
}

inline void normalize_total(SpinorField& fld, const Grid& grid) {
    long double acc = 0.0L;
    for (const auto& z : fld.f) acc += std::norm(z);
    for (const auto& z : fld.g) acc += std::norm(z);
    const double total = double(acc) * grid.cell_area();
    if (total <= 0.0) throw std::invalid_argument("make_packet: empty field");
    const double s = 1.0 / std::sqrt(total);
    for (auto& z : fld.f) z *= s;
    for (auto& z : fld.g) z *= s;
}

}  // namespace detail

// Single normalized packet placed in one channel of a fresh diabatic field.
inline SpinorField make_packet(const Grid& grid, const PacketSpec& sp, Channel ch) {
    detail::check_packet(grid, sp);
    SpinorField out = SpinorField::zeros(grid);
    detail::add_packet(grid, sp, out.channel(ch));
    detail::normalize_total(out, grid);
    return out;
}

struct SourceTerm {
    PacketSpec spec;
    Channel channel = Channel::g;
};

// Coherent superposition of several packets, normalized as a whole.
inline SpinorField make_superposition(const Grid& grid, const std::vector<SourceTerm>& src) {
    if (src.empty()) throw std::invalid_argument("make_superposition: no packets");
    SpinorField out = SpinorField::zeros(grid);
    for (const auto& s : src) {
        detail::check_packet(grid, s.spec);
        detail::add_packet(grid, s.spec, out.channel(s.channel));
    }
    detail::normalize_total(out, grid);
    return out;
}

// Frame rotation between the channel basis and the basis that diagonalizes
// the potential: f~ = f cosOmega + e^{-i chi} g sinOmega,
//                g~ = g cosOmega - e^{+i chi} f sinOmega,
// and the exact inverse on the way back. Pointwise unitary, so norms and
// densities summed over channels are preserved exactly.
inline SpinorField adiabatic_transform(const SpinorField& in, const Grid& grid,
                                       const ModelParams& m, Gauge target) {
    if (in.gauge == target)
        throw std::invalid_argument("adiabatic_transform: field already in target gauge");
    if (in.n_xi != grid.n_xi() || in.n_eta != grid.n_eta())
        throw std::invalid_argument("adiabatic_transform: grid mismatch");
    const int nx = grid.n_xi(), ny = grid.n_eta();
    std::vector<double> cs(nx), sn(nx);
    std::vector<cplx> ph(ny);
    for (int i = 0; i < nx; ++i) {
        const double om = mixing_angle(grid.xi()[i], m.beta);
        cs[i] = std::cos(om);
        sn[i] = std::sin(om);
    }
    for (int j = 0; j < ny; ++j) ph[j] = std::polar(1.0, -flux_chi(m.flux, grid.eta()[j]));

    SpinorField out = in;
    out.gauge = target;
    const bool to_adiabatic = (target == Gauge::adiabatic);
    for (int i = 0; i < nx; ++i) {
        const double c = cs[i], s = sn[i];
        cplx* pf = out.f.data() + std::size_t(i) * ny;
        cplx* pg = out.g.data() + std::size_t(i) * ny;
        for (int j = 0; j < ny; ++j) {
            const cplx p = ph[j];
            const cplx f0 = pf[j], g0 = pg[j];
            if (to_adiabatic) {
                pf[j] = c * f0 + s * p * g0;
                pg[j] = c * g0 - s * std::conj(p) * f0;
            } else {
                pf[j] = c * f0 - s * p * g0;
                pg[j] = c * g0 + s * std::conj(p) * f0;
            }
        }
    }
    return out;
}

}  // namespace gaugelens
