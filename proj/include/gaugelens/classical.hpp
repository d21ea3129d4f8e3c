#pragma once
// Classical rays in the effective magnetic field: with dispersion omega = k^2
// a packet moves at 2k, and the curvature-induced force reads
//   d v_xi / d tau = +2 v_eta B,   d v_eta / d tau = -2 v_xi B.
// Speed is conserved; only the direction turns. Fixed-step RK4 is plenty at
// the step sizes used here and keeps runs bit-reproducible.

#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

#include "gaugelens/model.hpp"

namespace gaugelens {

struct ClassicalState {
    double xi = 0.0, eta = 0.0;
    double v_xi = 0.0, v_eta = 0.0;

    double speed() const { return std::hypot(v_xi, v_eta); }
};

using FieldFn = std::function<double(double xi, double eta)>;

namespace detail {

struct Deriv {
    double dxi, deta, dvxi, dveta;
};

inline Deriv rhs(const ClassicalState& s, const FieldFn& field) {
    const double b = field(s.xi, s.eta);
    return {s.v_xi, s.v_eta, 2.0 * s.v_eta * b, -2.0 * s.v_xi * b};
}

inline ClassicalState advance(const ClassicalState& s, const Deriv& d, double h) {
    return {s.xi + h * d.dxi, s.eta + h * d.deta, s.v_xi + h * d.dvxi,
            s.v_eta + h * d.dveta};
}

}  // namespace detail

inline ClassicalState rk4_step(const ClassicalState& s, double h, const FieldFn& field) {
    const auto k1 = detail::rhs(s, field);
    const auto k2 = detail::rhs(detail::advance(s, k1, 0.5 * h), field);
    const auto k3 = detail::rhs(detail::advance(s, k2, 0.5 * h), field);
    const auto k4 = detail::rhs(detail::advance(s, k3, h), field);
    ClassicalState out;
    out.xi = s.xi + h / 6.0 * (k1.dxi + 2 * k2.dxi + 2 * k3.dxi + k4.dxi);
    out.eta = s.eta + h / 6.0 * (k1.deta + 2 * k2.deta + 2 * k3.deta + k4.deta);
    out.v_xi = s.v_xi + h / 6.0 * (k1.dvxi + 2 * k2.dvxi + 2 * k3.dvxi + k4.dvxi);
    out.v_eta = s.v_eta + h / 6.0 * (k1.dveta + 2 * k2.dveta + 2 * k3.dveta + k4.dveta);
    return out;
}

struct ClassicalPath {
    std::vector<double> tau, xi, eta, v_xi, v_eta;

    void push(double t, const ClassicalState& s) {
        tau.push_back(t);
        xi.push_back(s.xi);
        eta.push_back(s.eta);
        v_xi.push_back(s.v_xi);
        v_eta.push_back(s.v_eta);
    }
    std::size_t size() const { return tau.size(); }
};

inline ClassicalPath integrate_ray(ClassicalState s, double h, int n_steps,
                                   const FieldFn& field, int record_stride = 1) {
    if (!(h > 0.0)) throw std::invalid_argument("integrate_ray: h must be positive");
    if (n_steps < 0) throw std::invalid_argument("integrate_ray: negative step count");
    if (record_stride < 1) throw std::invalid_argument("integrate_ray: bad stride");
    ClassicalPath path;
    path.push(0.0, s);
    for (int n = 1; n <= n_steps; ++n) {
        s = rk4_step(s, h, field);
        if (n % record_stride == 0 || n == n_steps) path.push(n * h, s);
    }
    return path;
}

inline FieldFn effective_field_fn(const ModelParams& m) {
    return [m](double xi, double eta) { return effective_B(xi, eta, m); };
}

// Slope of the outgoing straight segment, fitted over samples with xi past
// the gate. Mirrors the quantum-side centroid fit.
struct RaySlope {
    double slope = 0.0;
    double intercept = 0.0;
    int n_samples = 0;
};

inline RaySlope fit_ray_slope(const ClassicalPath& path, double xi_gate,
                              int min_samples = 10) {
    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < path.size(); ++i)
        if (path.xi[i] > xi_gate) {
            xs.push_back(path.xi[i]);
            ys.push_back(path.eta[i]);
        }
    if (int(xs.size()) < min_samples)
        throw std::runtime_error("fit_ray_slope: too few samples past the gate");
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
    if (sxx <= 0.0) throw std::runtime_error("fit_ray_slope: degenerate xi samples");
    RaySlope out;
    out.slope = sxy / sxx;
    out.intercept = my - out.slope * mx;
    out.n_samples = n;
    return out;
}

// Pairwise crossing points of outgoing straight-line fits; used to locate a
// focus and quantify its blur.
struct CrossingCloud {
    std::vector<double> xi, eta;
    double centroid_xi = 0.0, centroid_eta = 0.0;
    double max_radius = 0.0;
};

inline CrossingCloud ray_crossings(const std::vector<RaySlope>& fits) {
    CrossingCloud out;
    for (std::size_t a = 0; a < fits.size(); ++a)
        for (std::size_t b = a + 1; b < fits.size(); ++b) {
            const double dm = fits[a].slope - fits[b].slope;
            if (std::abs(dm) < 1e-12) continue;
            const double x = (fits[b].intercept - fits[a].intercept) / dm;
            out.xi.push_back(x);
            out.eta.push_back(fits[a].intercept + fits[a].slope * x);
        }
    if (out.xi.empty()) throw std::runtime_error("ray_crossings: no crossings (parallel rays)");
    for (std::size_t i = 0; i < out.xi.size(); ++i) {
        out.centroid_xi += out.xi[i];
        out.centroid_eta += out.eta[i];
    }
    out.centroid_xi /= double(out.xi.size());
    out.centroid_eta /= double(out.xi.size());
    for (std::size_t i = 0; i < out.xi.size(); ++i)
        out.max_radius = std::max(out.max_radius,
                                  std::hypot(out.xi[i] - out.centroid_xi,
                                             out.eta[i] - out.centroid_eta));
    return out;
}

}  // namespace gaugelens
