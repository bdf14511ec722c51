#include <cmath>
#include <cstdio>
#include <fstream>

#include "tomocal/harness.hpp"

namespace tomocal::harness {

namespace {

constexpr double kPi = std::numbers::pi;

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

// linear three-stop map: blue -> teal -> yellow
std::string color_for(double t) {
    t = std::clamp(t, 0.0, 1.0);
    const double stops[3][3] = {{44, 62, 149}, {38, 166, 154}, {245, 230, 66}};
    const double pos = t * 2.0;
    const int seg = pos < 1.0 ? 0 : 1;
    const double f = pos - seg;
    char buf[16];
    std::snprintf(buf, sizeof buf, "#%02x%02x%02x",
                  static_cast<int>(stops[seg][0] + f * (stops[seg + 1][0] - stops[seg][0])),
                  static_cast<int>(stops[seg][1] + f * (stops[seg + 1][1] - stops[seg][1])),
                  static_cast<int>(stops[seg][2] + f * (stops[seg + 1][2] - stops[seg][2])));
    return buf;
}

void open_file(std::ofstream& out, const std::filesystem::path& file) {
    out.open(file, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write figure: " + file.string());
}

void svg_header(std::ofstream& out, int w, int h, const std::string& title) {
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h
        << "\" viewBox=\"0 0 " << w << " " << h << "\">\n"
        << "<rect width=\"" << w << "\" height=\"" << h << "\" fill=\"white\"/>\n"
        << "<text x=\"" << w / 2 << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\""
        << " font-size=\"16\">" << title << "</text>\n";
}

void color_legend(std::ofstream& out, int x, int y, double lo, double hi) {
    for (int i = 0; i < 100; ++i) {
        out << "<rect x=\"" << x + 2 * i << "\" y=\"" << y << "\" width=\"2\" height=\"12\" fill=\""
            << color_for(i / 99.0) << "\"/>\n";
    }
    out << "<text x=\"" << x << "\" y=\"" << y + 26 << "\" font-family=\"sans-serif\""
        << " font-size=\"11\">" << fmt(lo) << "</text>\n"
        << "<text x=\"" << x + 200 << "\" y=\"" << y + 26 << "\" text-anchor=\"end\""
        << " font-family=\"sans-serif\" font-size=\"11\">" << fmt(hi) << "</text>\n";
}

}  // namespace

void write_purity_map_svg(const std::filesystem::path& file,
                          const std::vector<SpherePoint>& points, double lo, double hi,
                          const std::string& title) {
    std::ofstream out;
    open_file(out, file);
    const int w = 800, h = 480;
    const double cx = w / 2.0, cy = 240.0, scale = 125.0;
    svg_header(out, w, h, title);

    // projection boundary: the full meridians at longitude +-pi
    out << "<path d=\"M";
    for (int side = 0; side < 2; ++side) {
        for (int i = 0; i <= 90; ++i) {
            const double colat = side == 0 ? i * kPi / 90 : (90 - i) * kPi / 90;
            const auto [u, v] = hammer_project(colat, side == 0 ? kPi : -kPi + 1e-9);
            out << (side == 0 && i == 0 ? "" : " L") << fmt(cx + u * scale) << ' '
                << fmt(cy - v * scale);
        }
    }
    out << " Z\" fill=\"none\" stroke=\"#888\"/>\n";

    const double span = hi > lo ? hi - lo : 1.0;
    for (const auto& p : points) {
        const auto [u, v] = hammer_project(p.theta, p.phi);
        out << "<circle cx=\"" << fmt(cx + u * scale) << "\" cy=\"" << fmt(cy - v * scale)
            << "\" r=\"7\" stroke=\"#333\" stroke-width=\"0.5\" fill=\""
            << color_for((p.value - lo) / span) << "\"/>\n";
    }
    color_legend(out, w / 2 - 100, h - 50, lo, hi);
    out << "</svg>\n";
}

void write_heatmap_svg(const std::filesystem::path& file, const LandscapeGrid& grid,
                       bool logScale, const std::string& title) {
    std::ofstream out;
    open_file(out, file);
    const std::size_t rows = grid.axes[0].values.size();
    const std::size_t cols = grid.axes.size() == 2 ? grid.axes[1].values.size() : 1;
    const int w = 640, h = 560;
    const double px = 60, py = 50, pw = 520, ph = 420;
    svg_header(out, w, h, title);

    auto norm = [&](double v) { return logScale ? std::log10(v + 1e-12) : v; };
    double lo = 1e300, hi = -1e300;
    for (double v : grid.values) {
        lo = std::min(lo, norm(v));
        hi = std::max(hi, norm(v));
    }
    const double span = hi > lo ? hi - lo : 1.0;
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < cols; ++c) {
            const double v = norm(grid.values[r * cols + c]);
            out << "<rect x=\"" << fmt(px + c * pw / cols) << "\" y=\""
                << fmt(py + r * ph / rows) << "\" width=\"" << fmt(pw / cols + 0.5)
                << "\" height=\"" << fmt(ph / rows + 0.5) << "\" fill=\""
                << color_for((v - lo) / span) << "\"/>\n";
        }
    out << "<text x=\"" << w / 2 << "\" y=\"" << h - 60 << "\" text-anchor=\"middle\""
        << " font-family=\"sans-serif\" font-size=\"12\">"
        << (grid.axes.size() == 2 ? grid.axes[1].name : grid.axes[0].name) << "</text>\n"
        << "<text x=\"18\" y=\"" << py + ph / 2 << "\" font-family=\"sans-serif\""
        << " font-size=\"12\" transform=\"rotate(-90 18 " << py + ph / 2 << ")\">"
        << grid.axes[0].name << "</text>\n";
    color_legend(out, w / 2 - 100, h - 40, lo, hi);
    out << "</svg>\n";
}

void write_curve_svg(const std::filesystem::path& file, const std::vector<double>& x,
                     const std::vector<double>& y, const std::string& xLabel,
                     const std::string& yLabel, const std::string& title) {
    if (x.size() != y.size() || x.size() < 2)
        throw std::invalid_argument("write_curve_svg: need matched series of >= 2 points");
    std::ofstream out;
    open_file(out, file);
    const int w = 640, h = 420;
    const double px = 70, py = 50, pw = 520, ph = 300;
    svg_header(out, w, h, title);

    const auto [xloIt, xhiIt] = std::minmax_element(x.begin(), x.end());
    const auto [yloIt, yhiIt] = std::minmax_element(y.begin(), y.end());
    const double xlo = *xloIt, xspan = *xhiIt - *xloIt > 0 ? *xhiIt - *xloIt : 1.0;
    const double ylo = *yloIt, yspan = *yhiIt - *yloIt > 0 ? *yhiIt - *yloIt : 1.0;

    out << "<rect x=\"" << px << "\" y=\"" << py << "\" width=\"" << pw << "\" height=\"" << ph
        << "\" fill=\"none\" stroke=\"#444\"/>\n<polyline fill=\"none\" stroke=\"#2c3e95\""
        << " stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < x.size(); ++i)
        out << fmt(px + (x[i] - xlo) / xspan * pw) << ',' << fmt(py + ph - (y[i] - ylo) / yspan * ph)
            << ' ';
    out << "\"/>\n"
        << "<text x=\"" << px + pw / 2 << "\" y=\"" << py + ph + 34 << "\" text-anchor=\"middle\""
        << " font-family=\"sans-serif\" font-size=\"12\">" << xLabel << "</text>\n"
        << "<text x=\"20\" y=\"" << py + ph / 2 << "\" font-family=\"sans-serif\" font-size=\"12\""
        << " transform=\"rotate(-90 20 " << py + ph / 2 << ")\">" << yLabel << "</text>\n"
        << "<text x=\"" << px - 6 << "\" y=\"" << py + ph + 4 << "\" text-anchor=\"end\""
        << " font-family=\"sans-serif\" font-size=\"11\">" << fmt(ylo) << "</text>\n"
        << "<text x=\"" << px - 6 << "\" y=\"" << py + 8 << "\" text-anchor=\"end\""
        << " font-family=\"sans-serif\" font-size=\"11\">" << fmt(ylo + yspan) << "</text>\n"
        << "<text x=\"" << px << "\" y=\"" << py + ph + 18 << "\" font-family=\"sans-serif\""
        << " font-size=\"11\">" << fmt(xlo) << "</text>\n"
        << "<text x=\"" << px + pw << "\" y=\"" << py + ph + 18 << "\" text-anchor=\"end\""
        << " font-family=\"sans-serif\" font-size=\"11\">" << fmt(xlo + xspan) << "</text>\n"
        << "</svg>\n";
}

}  // namespace tomocal::harness
