#include "indecide/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "indecide/csv.hpp"

namespace indecide {
namespace {

constexpr double kWidth = 640, kHeight = 440;
constexpr double kLeft = 70, kRight = 150, kTop = 40, kBottom = 55;
const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf"};

std::string escape(const std::string& s) {
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

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string tick(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

struct Frame {
    double x0, x1, y0, y1;
    double px(double x) const { return kLeft + (x - x0) / (x1 - x0) * (kWidth - kLeft - kRight); }
    double py(double y) const { return kHeight - kBottom - (y - y0) / (y1 - y0) * (kHeight - kTop - kBottom); }
};

void header(std::ostringstream& os, const SvgAxes& axes) {
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
       << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "<text x=\"" << num(kWidth / 2) << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" << escape(axes.title)
       << "</text>\n";
}

void axes_and_ticks(std::ostringstream& os, const Frame& f, const SvgAxes& axes) {
    const double l = kLeft, r = kWidth - kRight, t = kTop, b = kHeight - kBottom;
    os << "<rect x=\"" << num(l) << "\" y=\"" << num(t) << "\" width=\"" << num(r - l) << "\" height=\"" << num(b - t)
       << "\" fill=\"none\" stroke=\"black\"/>\n";
    for (int i = 0; i <= 5; ++i) {
        const double xv = f.x0 + (f.x1 - f.x0) * i / 5.0, yv = f.y0 + (f.y1 - f.y0) * i / 5.0;
        os << "<text x=\"" << num(f.px(xv)) << "\" y=\"" << num(b + 16) << "\" text-anchor=\"middle\">" << tick(xv)
           << "</text>\n";
        os << "<text x=\"" << num(l - 6) << "\" y=\"" << num(f.py(yv) + 4) << "\" text-anchor=\"end\">" << tick(yv)
           << "</text>\n";
    }
    os << "<text x=\"" << num((l + r) / 2) << "\" y=\"" << num(kHeight - 14) << "\" text-anchor=\"middle\">"
       << escape(axes.x_label) << "</text>\n";
    os << "<text transform=\"translate(18," << num((t + b) / 2) << ") rotate(-90)\" text-anchor=\"middle\">"
       << escape(axes.y_label) << "</text>\n";
}

void polyline(std::ostringstream& os, const Frame& f, const SvgSeries& s, const char* color) {
    std::string pts;
    auto flush = [&]() {
        if (pts.empty()) return;
        os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.8\""
           << (s.dashed ? " stroke-dasharray=\"6 4\"" : "") << " points=\"" << pts << "\"/>\n";
        pts.clear();
    };
    for (std::size_t i = 0; i < s.x.size(); ++i) {
        if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) {
            flush();
            continue;
        }
        const double y = std::clamp(s.y[i], f.y0, f.y1);
        pts += num(f.px(s.x[i])) + "," + num(f.py(y)) + " ";
    }
    flush();
}

void legend(std::ostringstream& os, const std::vector<SvgSeries>& series, std::size_t color_offset) {
    double y = kTop + 10;
    for (std::size_t i = 0; i < series.size(); ++i) {
        const char* color = kPalette[(i + color_offset) % 7];
        const double x = kWidth - kRight + 12;
        os << "<line x1=\"" << num(x) << "\" y1=\"" << num(y) << "\" x2=\"" << num(x + 20) << "\" y2=\"" << num(y)
           << "\" stroke=\"" << color << "\" stroke-width=\"2\"" << (series[i].dashed ? " stroke-dasharray=\"6 4\"" : "")
           << "/>\n";
        os << "<text x=\"" << num(x + 26) << "\" y=\"" << num(y + 4) << "\">" << escape(series[i].name) << "</text>\n";
        y += 18;
    }
}

void data_comment(std::ostringstream& os, const SvgSeries& s) {
    os << "<!-- series " << escape(s.name) << ": x,y";
    for (std::size_t i = 0; i < s.x.size(); ++i) os << ' ' << format_double(s.x[i]) << ',' << format_double(s.y[i]);
    os << " -->\n";
}

void widen(double& lo, double& hi) {
    if (!(lo < hi)) {
        lo -= 0.5;
        hi += 0.5;
    }
}

}  // namespace

std::string line_chart_svg(const SvgAxes& axes, const std::vector<SvgSeries>& series) {
    double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
    for (const auto& s : series) {
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (!std::isfinite(s.x[i])) continue;
            x0 = std::min(x0, s.x[i]);
            x1 = std::max(x1, s.x[i]);
            for (double v : {s.y[i], s.lo.empty() ? s.y[i] : s.lo[i], s.hi.empty() ? s.y[i] : s.hi[i]})
                if (std::isfinite(v)) {
                    y0 = std::min(y0, v);
                    y1 = std::max(y1, v);
                }
        }
    }
    if (!std::isfinite(x0)) x0 = 0, x1 = 1;
    if (!std::isfinite(y0)) y0 = 0, y1 = 1;
    widen(x0, x1);
    widen(y0, y1);
    const double pad = 0.05 * (y1 - y0);
    const Frame f{x0, x1, y0 - pad, y1 + pad};

    std::ostringstream os;
    header(os, axes);
    for (std::size_t k = 0; k < series.size(); ++k) {
        const auto& s = series[k];
        if (s.lo.empty()) continue;
        std::string pts;
        for (std::size_t i = 0; i < s.x.size(); ++i)
            if (std::isfinite(s.hi[i])) pts += num(f.px(s.x[i])) + "," + num(f.py(s.hi[i])) + " ";
        for (std::size_t i = s.x.size(); i-- > 0;)
            if (std::isfinite(s.lo[i])) pts += num(f.px(s.x[i])) + "," + num(f.py(s.lo[i])) + " ";
        os << "<polygon fill=\"" << kPalette[k % 7] << "\" fill-opacity=\"0.18\" stroke=\"none\" points=\"" << pts
           << "\"/>\n";
    }
    for (std::size_t k = 0; k < series.size(); ++k) {
        polyline(os, f, series[k], kPalette[k % 7]);
        data_comment(os, series[k]);
    }
    axes_and_ticks(os, f, axes);
    legend(os, series, 0);
    os << "</svg>\n";
    return os.str();
}

std::string heatmap_svg(const SvgAxes& axes, const std::vector<double>& xs, const std::vector<double>& ys,
                        const std::vector<double>& values, double vmin, double vmid, double vmax,
                        const std::vector<SvgSeries>& overlays) {
    const double dx = xs.size() > 1 ? xs[1] - xs[0] : 1.0, dy = ys.size() > 1 ? ys[1] - ys[0] : 1.0;
    const Frame f{xs.front() - dx / 2, xs.back() + dx / 2, ys.front() - dy / 2, ys.back() + dy / 2};
    const double lmin = std::log(vmin), lmid = std::log(vmid), lmax = std::log(vmax);
    auto color = [&](double v) -> std::string {
        if (!std::isfinite(v)) return "#bbbbbb";
        const double lv = std::log(std::clamp(v, vmin, vmax));
        int r = 255, g = 255, b = 255;
        if (lv < lmid) {
            const double a = (lmid - lv) / (lmid - lmin);
            r = g = static_cast<int>(255 * (1 - a));
        } else {
            const double a = (lv - lmid) / (lmax - lmid);
            g = b = static_cast<int>(255 * (1 - a));
        }
        char buf[8];
        std::snprintf(buf, sizeof buf, "#%02x%02x%02x", r, g, b);
        return buf;
    };

    std::ostringstream os;
    header(os, axes);
    os << "<!-- heatmap " << xs.size() << " x " << ys.size() << ", color scale log [" << format_double(vmin) << ", "
       << format_double(vmax) << "] centered at " << format_double(vmid) << " -->\n";
    const double w = std::abs(f.px(xs.front() + dx) - f.px(xs.front())) + 0.3;
    const double h = std::abs(f.py(ys.front() + dy) - f.py(ys.front())) + 0.3;
    for (std::size_t i = 0; i < xs.size(); ++i)
        for (std::size_t j = 0; j < ys.size(); ++j)
            os << "<rect x=\"" << num(f.px(xs[i] - dx / 2)) << "\" y=\"" << num(f.py(ys[j] + dy / 2)) << "\" width=\""
               << num(w) << "\" height=\"" << num(h) << "\" fill=\"" << color(values[i * ys.size() + j]) << "\"/>\n";
    for (std::size_t k = 0; k < overlays.size(); ++k) {
        polyline(os, f, overlays[k], kPalette[(k + 2) % 7]);
        data_comment(os, overlays[k]);
    }
    axes_and_ticks(os, f, axes);
    legend(os, overlays, 2);
    os << "</svg>\n";
    return os.str();
}

}  // namespace indecide
