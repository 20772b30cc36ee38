#include "svg.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

namespace oamsim
{
namespace
{
constexpr double W = 720, H = 440, left = 78, right = 150, top = 40, bottom = 58;
constexpr std::array<const char *, 6> palette{"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"};

std::string esc(const std::string &s)
{
    std::string out;
    for (char c : s) {
        switch (c) {
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '&': out += "&amp;"; break;
        default: out += c;
        }
    }
    return out;
}

// roughly five ticks at 1/2/5 multiples
std::vector<double> ticks(double lo, double hi)
{
    const double span = hi - lo;
    if (!(span > 0.0)) {
        return {lo};
    }
    const double raw = span / 5.0;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    double step = mag;
    for (double m : {1.0, 2.0, 5.0, 10.0}) {
        if (m * mag >= raw) {
            step = m * mag;
            break;
        }
    }
    std::vector<double> out;
    for (double t = std::ceil(lo / step) * step; t <= hi + 1e-9 * span; t += step) {
        out.push_back(std::abs(t) < 1e-12 * step ? 0.0 : t);
    }
    return out;
}

struct Frame
{
    double x0, x1, y0, y1;
    double px(double x) const { return left + (x - x0) / (x1 - x0) * (W - left - right); }
    double py(double y) const { return H - bottom - (y - y0) / (y1 - y0) * (H - top - bottom); }
};

void axes(std::string &s, const Frame &f, const std::string &title, const std::string &xl, const std::string &yl)
{
    s += fmt::format(R"(<rect x="{}" y="{}" width="{}" height="{}" fill="none" stroke="#333"/>)"
                     "\n",
                     left, top, W - left - right, H - top - bottom);
    for (double t : ticks(f.x0, f.x1)) {
        const double x = f.px(t);
        s += fmt::format(R"(<line x1="{0:.2f}" y1="{1}" x2="{0:.2f}" y2="{2}" stroke="#333"/>)"
                         R"(<text x="{0:.2f}" y="{3}" text-anchor="middle">{4:g}</text>)"
                         "\n",
                         x, H - bottom, H - bottom + 5, H - bottom + 20, t);
    }
    for (double t : ticks(f.y0, f.y1)) {
        const double y = f.py(t);
        s += fmt::format(R"(<line x1="{0}" y1="{2:.2f}" x2="{1}" y2="{2:.2f}" stroke="#333"/>)"
                         R"(<text x="{3}" y="{4:.2f}" text-anchor="end">{5:g}</text>)"
                         "\n",
                         left - 5, left, y, left - 8, y + 4, t);
    }
    s += fmt::format(R"(<text x="{}" y="24" text-anchor="middle" font-size="15">{}</text>)"
                     "\n",
                     left + 0.5 * (W - left - right), esc(title));
    s += fmt::format(R"(<text x="{}" y="{}" text-anchor="middle">{}</text>)"
                     "\n",
                     left + 0.5 * (W - left - right), H - 14, esc(xl));
    s += fmt::format(R"svg(<text x="18" y="{0}" text-anchor="middle" transform="rotate(-90 18 {0})">{1}</text>)svg"
                     "\n",
                     top + 0.5 * (H - top - bottom), esc(yl));
}

std::string header()
{
    return fmt::format(R"(<svg xmlns="http://www.w3.org/2000/svg" width="{0}" height="{1}" viewBox="0 0 {0} {1}" )"
                       R"(font-family="sans-serif" font-size="12">)"
                       "\n"
                       R"(<rect width="100%" height="100%" fill="white"/>)"
                       "\n",
                       W, H);
}

// viridis-like ramp, t in [0, 1]
std::string colour(double t)
{
    static constexpr std::array<std::array<double, 3>, 5> stops{
        {{68, 1, 84}, {59, 82, 139}, {33, 145, 140}, {94, 201, 98}, {253, 231, 37}}};
    t = std::clamp(t, 0.0, 1.0) * (stops.size() - 1);
    const auto i = std::min(static_cast<std::size_t>(t), stops.size() - 2);
    const double u = t - static_cast<double>(i);
    std::array<int, 3> c{};
    for (std::size_t k = 0; k < 3; ++k) {
        c[k] = static_cast<int>(std::lround(stops[i][k] + u * (stops[i + 1][k] - stops[i][k])));
    }
    return fmt::format("#{:02x}{:02x}{:02x}", c[0], c[1], c[2]);
}
} // namespace

std::string render(const LinePlot &plot)
{
    double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
    for (const auto &s : plot.series) {
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (std::isfinite(s.x[i]) && std::isfinite(s.y[i])) {
                x0 = std::min(x0, s.x[i]);
                x1 = std::max(x1, s.x[i]);
                y0 = std::min(y0, s.y[i]);
                y1 = std::max(y1, s.y[i]);
            }
        }
    }
    if (plot.y_lo < plot.y_hi) {
        y0 = plot.y_lo;
        y1 = plot.y_hi;
    }
    if (!(x1 > x0)) {
        x0 -= 0.5;
        x1 += 0.5;
    }
    if (!(y1 > y0)) {
        y0 -= 0.5;
        y1 += 0.5;
    }
    const double pad = 0.04 * (y1 - y0);
    const Frame f{x0, x1, plot.y_lo < plot.y_hi ? y0 : y0 - pad, plot.y_lo < plot.y_hi ? y1 : y1 + pad};

    std::string s = header();
    axes(s, f, plot.title, plot.x_label, plot.y_label);
    for (std::size_t k = 0; k < plot.series.size(); ++k) {
        const auto &ser = plot.series[k];
        std::string pts;
        for (std::size_t i = 0; i < ser.x.size(); ++i) {
            if (!std::isfinite(ser.y[i])) {
                continue;
            }
            const double y = std::clamp(ser.y[i], f.y0, f.y1);
            pts += fmt::format("{:.2f},{:.2f} ", f.px(ser.x[i]), f.py(y));
        }
        const char *c = palette[k % palette.size()];
        s += fmt::format(R"(<polyline fill="none" stroke="{}" stroke-width="1.6" points="{}"/>)"
                         "\n",
                         c, pts);
        const double ly = top + 14 + 18 * static_cast<double>(k);
        s += fmt::format(R"(<line x1="{0}" y1="{1}" x2="{2}" y2="{1}" stroke="{3}" stroke-width="2"/>)"
                         R"(<text x="{4}" y="{5}">{6}</text>)"
                         "\n",
                         W - right + 10, ly, W - right + 30, c, W - right + 35, ly + 4, esc(ser.label));
    }
    s += "</svg>\n";
    return s;
}

std::string render(const Heatmap &map)
{
    if (map.x.empty() || map.y.empty()) {
        return header() + "</svg>\n";
    }
    const double dy = map.y.size() > 1 ? map.y[1] - map.y[0] : 1.0;
    const Frame f{map.x.front(), map.x.size() > 1 ? map.x.back() : map.x.front() + 1.0, map.y.front() - 0.5 * dy,
                  map.y.back() + 0.5 * dy};
    double vmax = 0.0;
    for (const auto &row : map.values) {
        for (double v : row) {
            vmax = std::max(vmax, v);
        }
    }
    if (!(vmax > 0.0)) {
        vmax = 1.0;
    }

    std::string s = header();
    for (std::size_t r = 0; r < map.values.size(); ++r) {
        const double xa = f.px(map.x[r]);
        const double xb = r + 1 < map.x.size() ? f.px(map.x[r + 1]) : f.px(f.x1);
        for (std::size_t c = 0; c < map.values[r].size(); ++c) {
            const double ya = f.py(map.y[c] + 0.5 * dy);
            const double yb = f.py(map.y[c] - 0.5 * dy);
            s += fmt::format(R"(<rect x="{:.2f}" y="{:.2f}" width="{:.2f}" height="{:.2f}" fill="{}"/>)", xa, ya,
                             std::max(xb - xa, 0.5) + 0.3, yb - ya + 0.3, colour(map.values[r][c] / vmax));
        }
        s += "\n";
    }
    axes(s, f, map.title, map.x_label, map.y_label);
    const double band = 0.1 * (H - top - bottom);
    for (int i = 0; i < 10; ++i) {
        const double y = H - bottom - (i + 1) * band;
        s += fmt::format(R"(<rect x="{}" y="{:.2f}" width="16" height="{:.2f}" fill="{}"/>)", W - right + 20, y,
                         band + 0.5, colour((i + 0.5) / 10.0));
    }
    s += fmt::format(R"(<text x="{}" y="{}">max</text><text x="{}" y="{}">0</text>)"
                     "\n</svg>\n",
                     W - right + 40, top + 10, W - right + 40, H - bottom);
    return s;
}

} // namespace oamsim
