#include "cstrbio/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace cstrbio {

namespace {

std::string g12(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

} // namespace

void atomic_write_file(const std::string& path, const std::string& contents) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open '" + tmp + "' for writing");
        out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
        if (!out) throw std::runtime_error("write failed for '" + tmp + "'");
    }
    std::filesystem::rename(tmp, path);
}

std::string trajectory_csv(const Trajectory& traj) {
    std::ostringstream out;
    out << "t,h,S,Q,u0,flux\n";
    for (const auto& s : traj.samples) {
        out << g12(s.t) << ',' << g12(s.h) << ',' << g12(s.S) << ',' << g12(s.Q) << ','
            << g12(s.u0) << ',' << g12(s.flux) << '\n';
    }
    return out.str();
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
    std::ostringstream out;
    out << "sstar,found,h_star,S_star,Q_star,lambda_plus_washout,verdict\n";
    for (const auto& r : rows) {
        out << g12(r.sstar) << ',' << (r.found ? 1 : 0) << ',' << g12(r.h_star) << ','
            << g12(r.S_star) << ',' << g12(r.Q_star) << ',' << g12(r.lambda_plus_washout)
            << ',' << r.verdict << '\n';
    }
    return out.str();
}

namespace {

constexpr int kPanelW = 800;
constexpr int kPanelH = 600;
constexpr double kMarginL = 72, kMarginR = 24, kMarginT = 42, kMarginB = 56;

const char* kPalette[6] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

struct Axis {
    double lo = 0.0, hi = 1.0;
    double map(double v, double pix_lo, double pix_hi) const {
        const double f = (v - lo) / (hi - lo);
        return pix_lo + f * (pix_hi - pix_lo);
    }
};

std::string svg_num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

std::string tick_label(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4g", v);
    return buf;
}

void draw_panel(std::ostringstream& out, int panel, const char* title,
                const std::vector<Trajectory>& trajs, const double* guide) {
    const double y_off = static_cast<double>(panel) * kPanelH;
    auto value_of = [panel](const TrajectorySample& s) {
        return panel == 0 ? s.h : panel == 1 ? s.S : s.Q;
    };

    Axis x, y;
    x.lo = 0.0;
    x.hi = 1.0;
    double v_lo = std::numeric_limits<double>::infinity();
    double v_hi = -std::numeric_limits<double>::infinity();
    for (const auto& tr : trajs) {
        for (const auto& s : tr.samples) {
            x.hi = std::max(x.hi, s.t);
            v_lo = std::min(v_lo, value_of(s));
            v_hi = std::max(v_hi, value_of(s));
        }
    }
    if (guide) {
        v_lo = std::min(v_lo, guide[panel]);
        v_hi = std::max(v_hi, guide[panel]);
    }
    if (!std::isfinite(v_lo)) { v_lo = 0.0; v_hi = 1.0; }
    double pad = 0.05 * (v_hi - v_lo);
    if (pad <= 0.0) pad = std::max(0.5, std::abs(v_hi) * 0.1);
    y.lo = v_lo - pad;
    y.hi = v_hi + pad;

    const double px_l = kMarginL, px_r = kPanelW - kMarginR;
    const double px_t = y_off + kMarginT, px_b = y_off + kPanelH - kMarginB;

    out << "<rect x=\"" << svg_num(px_l) << "\" y=\"" << svg_num(px_t) << "\" width=\""
        << svg_num(px_r - px_l) << "\" height=\"" << svg_num(px_b - px_t)
        << "\" fill=\"none\" stroke=\"#333\" stroke-width=\"1\"/>\n";
    out << "<text x=\"" << svg_num(px_l) << "\" y=\"" << svg_num(y_off + 26)
        << "\" font-family=\"sans-serif\" font-size=\"18\" fill=\"#111\">" << title
        << "</text>\n";

    for (int i = 0; i <= 5; ++i) {
        const double tx = x.lo + (x.hi - x.lo) * i / 5.0;
        const double px = x.map(tx, px_l, px_r);
        out << "<line x1=\"" << svg_num(px) << "\" y1=\"" << svg_num(px_b) << "\" x2=\""
            << svg_num(px) << "\" y2=\"" << svg_num(px_b + 5)
            << "\" stroke=\"#333\" stroke-width=\"1\"/>\n";
        out << "<text x=\"" << svg_num(px) << "\" y=\"" << svg_num(px_b + 20)
            << "\" font-family=\"sans-serif\" font-size=\"12\" fill=\"#333\" "
               "text-anchor=\"middle\">"
            << tick_label(tx) << "</text>\n";
        const double ty = y.lo + (y.hi - y.lo) * i / 5.0;
        const double py = y.map(ty, px_b, px_t);
        out << "<line x1=\"" << svg_num(px_l - 5) << "\" y1=\"" << svg_num(py) << "\" x2=\""
            << svg_num(px_l) << "\" y2=\"" << svg_num(py)
            << "\" stroke=\"#333\" stroke-width=\"1\"/>\n";
        out << "<text x=\"" << svg_num(px_l - 8) << "\" y=\"" << svg_num(py + 4)
            << "\" font-family=\"sans-serif\" font-size=\"12\" fill=\"#333\" "
               "text-anchor=\"end\">"
            << tick_label(ty) << "</text>\n";
    }
    out << "<text x=\"" << svg_num(0.5 * (px_l + px_r)) << "\" y=\""
        << svg_num(y_off + kPanelH - 16)
        << "\" font-family=\"sans-serif\" font-size=\"14\" fill=\"#111\" "
           "text-anchor=\"middle\">t</text>\n";

    if (guide) {
        const double py = y.map(guide[panel], px_b, px_t);
        out << "<line x1=\"" << svg_num(px_l) << "\" y1=\"" << svg_num(py) << "\" x2=\""
            << svg_num(px_r) << "\" y2=\"" << svg_num(py)
            << "\" stroke=\"#b8860b\" stroke-width=\"1.5\" stroke-dasharray=\"6 4\"/>\n";
    }

    for (std::size_t k = 0; k < trajs.size(); ++k) {
        out << "<polyline fill=\"none\" stroke=\"" << kPalette[k % 6]
            << "\" stroke-width=\"1.5\" points=\"";
        for (const auto& s : trajs[k].samples) {
            out << svg_num(x.map(s.t, px_l, px_r)) << ',' << svg_num(y.map(value_of(s), px_b, px_t))
                << ' ';
        }
        out << "\"/>\n";
    }
}

} // namespace

std::string trajectory_svg(const std::vector<Trajectory>& trajectories,
                           const double* equilibrium_hsq) {
    std::ostringstream out;
    const int total_h = 3 * kPanelH;
    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kPanelW << "\" height=\""
        << total_h << "\" viewBox=\"0 0 " << kPanelW << ' ' << total_h << "\">\n";
    out << "<rect width=\"" << kPanelW << "\" height=\"" << total_h << "\" fill=\"white\"/>\n";
    const char* titles[3] = {"biofilm thickness h", "bulk substrate S", "suspended biomass Q"};
    for (int p = 0; p < 3; ++p) draw_panel(out, p, titles[p], trajectories, equilibrium_hsq);
    out << "</svg>\n";
    return out.str();
}

} // namespace cstrbio
