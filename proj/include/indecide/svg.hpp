#pragma once

#include <string>
#include <vector>

namespace indecide {

struct SvgSeries {
    std::string name;
    std::vector<double> x;
    std::vector<double> y;
    /// Optional shaded band; same length as x when present.
    std::vector<double> lo;
    std::vector<double> hi;
    bool dashed = false;
};

struct SvgAxes {
    std::string title;
    std::string x_label;
    std::string y_label;
};

/// Static line chart; NaN points break a line.
std::string line_chart_svg(const SvgAxes& axes, const std::vector<SvgSeries>& series);

/// Heatmap of `values` (row-major, x outer, y inner) on a diverging blue-white-red
/// scale centered at `mid` in log scale, with optional line overlays. NaN cells are grey.
std::string heatmap_svg(const SvgAxes& axes, const std::vector<double>& xs, const std::vector<double>& ys,
                        const std::vector<double>& values, double vmin, double vmid, double vmax,
                        const std::vector<SvgSeries>& overlays);

}  // namespace indecide
