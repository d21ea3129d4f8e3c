#pragma once
// Run artifacts: timestamped output directories, manifest, trajectory and
// classical-path CSVs, and raw binary density snapshots with text sidecars.
// CSV numbers use %.17g so identical runs are byte-identical.

#include <bit>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "gaugelens/classical.hpp"
#include "gaugelens/config.hpp"
#include "gaugelens/field.hpp"
#include "gaugelens/grid.hpp"
#include "gaugelens/observables.hpp"

namespace gaugelens {

inline std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

// <out>/<scenario>/<timestamp>/ with snapshots/ inside; a suffix is appended
// if two runs land on the same second.
struct RunDirs {
    std::filesystem::path root;
    std::filesystem::path snapshots;
};

inline RunDirs make_run_dirs(const std::filesystem::path& out_root,
                             const std::string& scenario) {
    const auto now = std::chrono::system_clock::now();
    const std::time_t tt = std::chrono::system_clock::to_time_t(now);
    std::tm tm_utc{};
    gmtime_r(&tt, &tm_utc);
    char stamp[32];
    std::strftime(stamp, sizeof stamp, "%Y%m%d-%H%M%S", &tm_utc);
    const auto base = out_root / scenario;
    std::filesystem::path dir = base / stamp;
    for (int suffix = 2; std::filesystem::exists(dir); ++suffix)
        dir = base / (std::string(stamp) + "-" + std::to_string(suffix));
    RunDirs out{dir, dir / "snapshots"};
    std::filesystem::create_directories(out.snapshots);
    return out;
}

inline void write_text_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
    out << text;
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

// Manifest = resolved config plus run metadata, in config syntax, so a run
// can be replayed by pointing simulate at its own manifest.
inline void write_manifest(const std::filesystem::path& path, const Config& resolved) {
    write_text_file(path, resolved.dump());
}

inline void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& traj) {
    std::ostringstream out;
    out << "tau,norm_f,norm_g,xi_f,eta_f,xi_g,eta_g,xi_tot,eta_tot\n";
    auto cell = [&out](const std::optional<Centroid>& c, bool trailing_comma) {
        if (c) out << format_double(c->xi) << "," << format_double(c->eta);
        else out << ",";
        if (trailing_comma) out << ",";
    };
    for (const auto& r : traj.records) {
        out << format_double(r.tau) << "," << format_double(r.norm_f) << ","
            << format_double(r.norm_g) << ",";
        cell(r.f, true);
        cell(r.g, true);
        cell(r.total, false);
        out << "\n";
    }
    write_text_file(path, out.str());
}

inline void write_classical_csv(const std::filesystem::path& path, const ClassicalPath& p) {
    std::ostringstream out;
    out << "tau,xi,eta,vxi,veta\n";
    for (std::size_t i = 0; i < p.size(); ++i)
        out << format_double(p.tau[i]) << "," << format_double(p.xi[i]) << ","
            << format_double(p.eta[i]) << "," << format_double(p.v_xi[i]) << ","
            << format_double(p.v_eta[i]) << "\n";
    write_text_file(path, out.str());
}

namespace detail {

inline void write_le_doubles(std::ofstream& out, const std::vector<double>& data) {
    static_assert(sizeof(double) == 8);
    if constexpr (std::endian::native == std::endian::little) {
        out.write(reinterpret_cast<const char*>(data.data()),
                  std::streamsize(data.size() * 8));
    } else {
        for (double x : data) {
            std::uint64_t u;
            std::memcpy(&u, &x, 8);
            char b[8];
            for (int i = 0; i < 8; ++i) b[i] = char((u >> (8 * i)) & 0xff);
            out.write(b, 8);
        }
    }
}

inline void write_density_file(const std::filesystem::path& path, const cvec& amp) {
    std::vector<double> dens(amp.size());
    for (std::size_t i = 0; i < amp.size(); ++i) dens[i] = std::norm(amp[i]);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
    write_le_doubles(out, dens);
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

}  // namespace detail

// One snapshot: |f|^2 and |g|^2 as flat row-major little-endian doubles
// (xi index outer, eta inner), optionally the adiabatic-frame pair, plus a
// sidecar naming the files and the grid geometry.
inline void write_snapshot(const std::filesystem::path& snapshots_dir, int index,
                           const SpinorField& fld, const Grid& grid, const ModelParams& m,
                           bool store_adiabatic) {
    char tag[16];
    std::snprintf(tag, sizeof tag, "%06d", index);
    const std::string base(tag);
    detail::write_density_file(snapshots_dir / (base + "_f2.bin"), fld.f);
    detail::write_density_file(snapshots_dir / (base + "_g2.bin"), fld.g);
    std::ostringstream side;
    side << "tau = " << format_double(fld.tau) << "\n"
         << "n_xi = " << grid.n_xi() << "\n"
         << "n_eta = " << grid.n_eta() << "\n"
         << "xi_min = " << format_double(grid.spec().xi_min) << "\n"
         << "xi_max = " << format_double(grid.spec().xi_max) << "\n"
         << "eta_min = " << format_double(grid.spec().eta_min) << "\n"
         << "eta_max = " << format_double(grid.spec().eta_max) << "\n"
         << "layout = row-major, xi outer, eta inner\n"
         << "dtype = float64 little-endian\n"
         << "file_f2 = " << base << "_f2.bin\n"
         << "file_g2 = " << base << "_g2.bin\n";
    if (store_adiabatic) {
        const SpinorField ad = adiabatic_transform(fld, grid, m, Gauge::adiabatic);
        detail::write_density_file(snapshots_dir / (base + "_fa2.bin"), ad.f);
        detail::write_density_file(snapshots_dir / (base + "_ga2.bin"), ad.g);
        side << "file_fa2 = " << base << "_fa2.bin\n"
             << "file_ga2 = " << base << "_ga2.bin\n";
    }
    write_text_file(snapshots_dir / (base + ".txt"), side.str());
}

}  // namespace gaugelens
