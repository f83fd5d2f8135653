#include "indecide/normal.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include <boost/math/special_functions/erf.hpp>

#include "indecide/errors.hpp"

namespace indecide {
namespace {

constexpr double kInvSqrt2Pi = 0.3989422804014326779399460599343819;
constexpr double kLogSqrt2Pi = 0.9189385332046727417803297364056176;

// Past this point erfc() heads into subnormals and the continued fraction takes over.
constexpr double kContinuedFractionCut = 26.0;

// Mills ratio tail(t) / pdf(t) by backward evaluation of Laplace's continued
// fraction 1 / (t + 1/(t + 2/(t + 3/(t + ...)))). Converges quickly for t >= 5.
double mills_ratio(double t) {
    double acc = t;
    for (int k = 80; k >= 1; --k) acc = t + k / acc;
    return 1.0 / acc;
}

struct GaussLegendre16 {
    std::array<double, 16> node{};
    std::array<double, 16> weight{};

    GaussLegendre16() {
        constexpr int n = 16;
        for (int i = 0; i < n; ++i) {
            double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
            double dp = 0.0;
            for (int it = 0; it < 100; ++it) {
                double p0 = 1.0, p1 = x;
                for (int k = 2; k <= n; ++k) {
                    double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                    p0 = p1;
                    p1 = pk;
                }
                dp = n * (x * p1 - p0) / (x * x - 1.0);
                double dx = p1 / dp;
                x -= dx;
                if (std::abs(dx) < 1e-16) break;
            }
            node[i] = x;
            weight[i] = 2.0 / ((1.0 - x * x) * dp * dp);
        }
    }
};

const GaussLegendre16& gauss_legendre() {
    static const GaussLegendre16 rule;
    return rule;
}

// Integral of the density over [a, b] by composite 16-point Gauss-Legendre.
double integrate_pdf(double a, double b) {
    const auto& gl = gauss_legendre();
    const int panels = std::max(1, static_cast<int>(std::ceil((b - a) / 0.25)));
    const double h = (b - a) / panels;
    double sum = 0.0;
    for (int p = 0; p < panels; ++p) {
        const double mid = a + (p + 0.5) * h;
        double panel = 0.0;
        for (int i = 0; i < 16; ++i) panel += gl.weight[i] * normal_pdf(mid + 0.5 * h * gl.node[i]);
        sum += 0.5 * h * panel;
    }
    return sum;
}

}  // namespace

double normal_pdf(double x) { return kInvSqrt2Pi * std::exp(-0.5 * x * x); }

double normal_tail(double t) {
    if (std::isnan(t)) return t;
    if (t > 40.0) return std::exp(-0.5 * t * t) * kInvSqrt2Pi / t;
    if (t < -40.0) return 1.0;
    return 0.5 * std::erfc(t / std::numbers::sqrt2);
}

double log_normal_tail(double t) {
    if (std::isnan(t)) return t;
    if (t > kContinuedFractionCut) return -0.5 * t * t - kLogSqrt2Pi + std::log(mills_ratio(t));
    if (t < -kContinuedFractionCut) return 0.0;
    if (t < 0.0) return std::log1p(-normal_tail(-t));
    return std::log(normal_tail(t));
}

double normal_interval(double a, double b) {
    if (!(a < b)) return 0.0;
    if (a < 0.0 && b > 0.0) return 1.0 - normal_tail(b) - normal_tail(-a);
    // Mirror onto the positive half-line: P(a <= xi < b) = P(-b < xi <= -a).
    if (b <= 0.0) {
        const double lo = -b;
        b = -a;
        a = lo;
    }
    if (b - a <= 2.0 && a < 30.0) return integrate_pdf(a, b);
    return normal_tail(a) - normal_tail(b);
}

double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0))
        throw DomainError("normal_quantile: probability must lie in (0, 1), got " + std::to_string(p));
    return std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * p);
}

double log_add_exp(double a, double b) {
    if (a == -std::numeric_limits<double>::infinity()) return b;
    if (b == -std::numeric_limits<double>::infinity()) return a;
    const double hi = std::max(a, b);
    return hi + std::log1p(std::exp(std::min(a, b) - hi));
}

}  // namespace indecide
