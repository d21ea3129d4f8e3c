#pragma once
// Periodic 2D grid: cell coordinates and FFT-ordered wavenumbers.
// Row-major storage everywhere: index (i, j) = i * n_eta + j, i along xi.

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace gaugelens {

struct GridSpec {
    int n_xi = 512;
    int n_eta = 512;
    double xi_min = -2.0 * std::numbers::pi;
    double xi_max = 2.0 * std::numbers::pi;
    double eta_min = -2.0 * std::numbers::pi;
    double eta_max = 2.0 * std::numbers::pi;
};

namespace detail {
inline bool power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }
}  // namespace detail

class Grid {
  public:
    explicit Grid(const GridSpec& spec) : spec_(spec) {
        if (!detail::power_of_two(spec.n_xi) || spec.n_xi < 16 ||
            !detail::power_of_two(spec.n_eta) || spec.n_eta < 16)
            throw std::invalid_argument("Grid: n_xi and n_eta must be powers of two >= 16");
        if (!(spec.xi_max > spec.xi_min) || !(spec.eta_max > spec.eta_min))
            throw std::invalid_argument("Grid: empty coordinate range");
        xi_.resize(spec.n_xi);
        eta_.resize(spec.n_eta);
        kxi_.resize(spec.n_xi);
        keta_.resize(spec.n_eta);
        const double lx = spec.xi_max - spec.xi_min;
        const double ly = spec.eta_max - spec.eta_min;
        hx_ = lx / spec.n_xi;
        hy_ = ly / spec.n_eta;
        for (int i = 0; i < spec.n_xi; ++i) xi_[i] = spec.xi_min + i * hx_;
        for (int j = 0; j < spec.n_eta; ++j) eta_[j] = spec.eta_min + j * hy_;
        // FFT ordering: 0..n/2-1 positive, then -n/2..-1
        const double fx = 2.0 * std::numbers::pi / lx;
        const double fy = 2.0 * std::numbers::pi / ly;
        for (int i = 0; i < spec.n_xi; ++i)
            kxi_[i] = fx * (i < spec.n_xi / 2 ? i : i - spec.n_xi);
        for (int j = 0; j < spec.n_eta; ++j)
            keta_[j] = fy * (j < spec.n_eta / 2 ? j : j - spec.n_eta);
    }

    const GridSpec& spec() const { return spec_; }
    int n_xi() const { return spec_.n_xi; }
    int n_eta() const { return spec_.n_eta; }
    std::size_t size() const { return std::size_t(spec_.n_xi) * spec_.n_eta; }
    double h_xi() const { return hx_; }
    double h_eta() const { return hy_; }
    double cell_area() const { return hx_ * hy_; }
    const std::vector<double>& xi() const { return xi_; }
    const std::vector<double>& eta() const { return eta_; }
    const std::vector<double>& k_xi() const { return kxi_; }
    const std::vector<double>& k_eta() const { return keta_; }

  private:
    GridSpec spec_;
    double hx_ = 0.0, hy_ = 0.0;
    std::vector<double> xi_, eta_, kxi_, keta_;
};

}  // namespace gaugelens
