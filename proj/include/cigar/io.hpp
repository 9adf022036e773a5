#pragma once

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "charts.hpp"
#include "errors.hpp"
#include "geodesics.hpp"
#include "soliton.hpp"

namespace cigar {

// Shortest-round-trip decimal form; all numeric table output goes through
// here so files are bit-stable across runs.
inline std::string fmt_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

// Write via a sibling temp file and rename, so readers never see a torn file.
inline void atomic_write(const std::filesystem::path& path, const std::string& content) {
    namespace fs = std::filesystem;
    const fs::path dir = path.has_parent_path() ? path.parent_path() : fs::path(".");
    std::error_code ec;
    fs::create_directories(dir, ec);
    const fs::path tmp = dir / (path.filename().string() + ".tmp");
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("atomic_write: cannot open " + tmp.string());
        out << content;
        if (!out.flush()) throw IoError("atomic_write: short write to " + tmp.string());
    }
    fs::rename(tmp, path, ec);
    if (ec) throw IoError("atomic_write: rename to " + path.string() + " failed: " + ec.message());
}

inline std::string residual_csv(const std::vector<SolitonResidualEntry>& rows, double rho,
                                double t) {
    std::ostringstream out;
    out << "chart,c1,c2,rho,t,res_11,res_12,res_22,frobenius\n";
    for (const auto& e : rows) {
        out << to_string(e.point.kind) << ',' << fmt_g17(e.point.c1) << ','
            << fmt_g17(e.point.c2) << ',' << fmt_g17(rho) << ',' << fmt_g17(t) << ','
            << fmt_g17(e.residual.a11) << ',' << fmt_g17(e.residual.a12) << ','
            << fmt_g17(e.residual.a22) << ',' << fmt_g17(e.norm) << '\n';
    }
    return out.str();
}

inline std::string trace_csv(const GeodesicTrace& tr) {
    std::ostringstream out;
    out << "sigma,s,theta,s_dot,theta_dot,ell,k,r\n";
    const double sqE = std::sqrt(tr.params.E);
    for (const auto& e : tr.entries) {
        out << fmt_g17(e.state.sigma) << ',' << fmt_g17(e.state.s) << ','
            << fmt_g17(e.state.theta) << ',' << fmt_g17(e.state.s_dot) << ','
            << fmt_g17(e.state.theta_dot) << ',' << fmt_g17(e.conserved.ell) << ','
            << fmt_g17(e.conserved.k) << ',' << fmt_g17(sqE * std::sinh(e.state.s)) << '\n';
    }
    return out.str();
}

inline std::string rigidity_csv(const RigidityProfile& pr) {
    std::ostringstream out;
    out << "r,h,h_closed,defect\n";
    for (std::size_t i = 0; i < pr.r.size(); ++i) {
        const double closed = rigidity_closed_form(pr.A, pr.r[i]);
        out << fmt_g17(pr.r[i]) << ',' << fmt_g17(pr.h[i]) << ',' << fmt_g17(closed) << ','
            << fmt_g17(pr.h[i] - closed) << '\n';
    }
    return out.str();
}

// Minimal standalone SVG: fixed viewport, light axes, one path per trace,
// optional point markers.
struct SvgOptions {
    int size = 640;
    double pad = 0.08;
};

inline std::string svg_plot(const std::vector<std::vector<std::pair<double, double>>>& traces,
                            const std::vector<std::pair<double, double>>& markers = {},
                            const SvgOptions& opt = {}) {
    double lo_x = 1e300, hi_x = -1e300, lo_y = 1e300, hi_y = -1e300;
    for (const auto& t : traces)
        for (const auto& [x, y] : t) {
            lo_x = std::min(lo_x, x); hi_x = std::max(hi_x, x);
            lo_y = std::min(lo_y, y); hi_y = std::max(hi_y, y);
        }
    for (const auto& [x, y] : markers) {
        lo_x = std::min(lo_x, x); hi_x = std::max(hi_x, x);
        lo_y = std::min(lo_y, y); hi_y = std::max(hi_y, y);
    }
    if (lo_x > hi_x) { lo_x = -1; hi_x = 1; lo_y = -1; hi_y = 1; }
    const double span = std::max(hi_x - lo_x, hi_y - lo_y) * (1.0 + 2.0 * opt.pad) + 1e-12;
    const double cx = 0.5 * (lo_x + hi_x), cy = 0.5 * (lo_y + hi_y);
    const double scale = opt.size / span;
    auto px = [&](double x) { return (x - cx) * scale + opt.size / 2.0; };
    auto py = [&](double y) { return opt.size / 2.0 - (y - cy) * scale; };
    auto num = [](double v) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.2f", v);
        return std::string(buf);
    };

    static const char* colors[] = {"#2266cc", "#cc4422", "#22aa66", "#9944bb", "#886600"};
    std::ostringstream out;
    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << opt.size << "\" height=\""
        << opt.size << "\" viewBox=\"0 0 " << opt.size << " " << opt.size << "\">\n"
        << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
        << "<line x1=\"" << num(px(lo_x)) << "\" y1=\"" << num(py(0)) << "\" x2=\""
        << num(px(hi_x)) << "\" y2=\"" << num(py(0))
        << "\" stroke=\"#cccccc\" stroke-width=\"1\"/>\n"
        << "<line x1=\"" << num(px(0)) << "\" y1=\"" << num(py(lo_y)) << "\" x2=\""
        << num(px(0)) << "\" y2=\"" << num(py(hi_y))
        << "\" stroke=\"#cccccc\" stroke-width=\"1\"/>\n";
    int ci = 0;
    for (const auto& t : traces) {
        out << "<path fill=\"none\" stroke=\"" << colors[ci++ % 5]
            << "\" stroke-width=\"1.5\" d=\"";
        for (std::size_t i = 0; i < t.size(); ++i)
            out << (i == 0 ? "M" : " L") << num(px(t[i].first)) << ' ' << num(py(t[i].second));
        out << "\"/>\n";
    }
    for (const auto& [x, y] : markers)
        out << "<circle cx=\"" << num(px(x)) << "\" cy=\"" << num(py(y))
            << "\" r=\"3\" fill=\"#222222\"/>\n";
    out << "</svg>\n";
    return out.str();
}

// Geodesic trace as a curve in the flat plane backing the cartesian chart.
inline std::vector<std::pair<double, double>> trace_xy(const GeodesicTrace& tr) {
    std::vector<std::pair<double, double>> xy;
    xy.reserve(tr.entries.size());
    const double sqE = std::sqrt(tr.params.E);
    for (const auto& e : tr.entries) {
        const double r = sqE * std::sinh(e.state.s);
        xy.emplace_back(r * std::cos(e.state.theta), r * std::sin(e.state.theta));
    }
    return xy;
}

} // namespace cigar
