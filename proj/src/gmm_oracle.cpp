#include "indecide/gmm_oracle.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "indecide/errors.hpp"
#include "indecide/normal.hpp"
#include "indecide/root_find.hpp"

namespace indecide {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double log_decided_at(double delta, double t) { return log_add_exp(log_normal_tail(t - delta), log_normal_tail(t + delta)); }

double log_risk_at(double delta, double t) { return log_normal_tail(delta + t) - log_decided_at(delta, t); }

RootFindConfig tight_bracket(double low, double high) {
    RootFindConfig cfg;
    cfg.abs_tol = 1e-15;
    cfg.max_iter = 400;
    cfg.bracket = {low, high};
    return cfg;
}

// Grows the upper end of [0, hi] until `beyond(hi)` holds.
template <class Pred>
double expand_upper(double hi, Pred beyond) {
    while (!beyond(hi)) {
        hi *= 2.0;
        if (hi > 1e7) throw BracketError("gmm_oracle: target lies beyond the numerically reachable range");
    }
    return hi;
}

void check_c(double c) {
    if (!(c > 0.0 && c < 1.0) || c == 0.5) {
        std::ostringstream os;
        os << "phase exponent: c must lie in (0, 1) excluding 1/2, got " << c;
        throw DomainError(os.str());
    }
}

double m_lower_from_log(double c, double log_inv_gamma) {
    const double eps = 0.5 * std::log(4.0 * std::numbers::pi * log_inv_gamma) / log_inv_gamma;
    if (c < 0.5) {
        const double v = c - (1.0 - eps) / (4.0 * c);
        return v * v;
    }
    const double v = 2.0 * c - 1.0 + eps;
    return v * v;
}

}  // namespace

void GmmSpec::validate() const {
    if (!(delta > 0.0) || !std::isfinite(delta)) {
        std::ostringstream os;
        os << "GmmSpec: delta must be positive and finite, got " << delta;
        throw DomainError(os.str());
    }
}

double bayes_risk(const GmmSpec& spec) {
    spec.validate();
    return normal_tail(spec.delta);
}

OracleOperatingPoint operating_point_at_t(const GmmSpec& spec, double t) {
    spec.validate();
    if (!(t >= 0.0)) throw DomainError("operating_point_at_t: t must be non-negative");
    const double d = spec.delta;
    const double log_decided = log_decided_at(d, t);
    OracleOperatingPoint p;
    p.t = t;
    p.gamma = normal_interval(d - t, d + t);
    p.decided = std::exp(log_decided);
    p.risk = std::exp(log_normal_tail(d + t) - log_decided);
    return p;
}

OracleOperatingPoint threshold_for_decided_mass(const GmmSpec& spec, double decided) {
    spec.validate();
    if (std::isnan(decided) || decided > 1.0) throw DomainError("threshold_for_decided_mass: decided mass must lie in (0, 1]");
    if (decided <= 0.0) throw BracketError("threshold_for_decided_mass: indecision mass is numerically 1");
    if (decided == 1.0) return operating_point_at_t(spec, 0.0);
    const double d = spec.delta;
    const double target = std::log(decided);
    auto f = [d](double t) { return log_decided_at(d, t); };
    const double hi = expand_upper(d + 10.0, [&](double h) { return f(h) < target; });
    return operating_point_at_t(spec, bisect_monotone(f, target, tight_bracket(0.0, hi)));
}

OracleOperatingPoint threshold_for_gamma(const GmmSpec& spec, double gamma) {
    spec.validate();
    if (std::isnan(gamma) || gamma < 0.0) throw DomainError("threshold_for_gamma: gamma must be non-negative");
    if (gamma >= 1.0) throw BracketError("threshold_for_gamma: gamma must be below 1");
    if (gamma == 0.0) return operating_point_at_t(spec, 0.0);
    if (gamma > 0.5) return threshold_for_decided_mass(spec, 1.0 - gamma);
    const double d = spec.delta;
    const double target = std::log(gamma);
    auto f = [d](double t) { return std::log(normal_interval(d - t, d + t)); };
    const double hi = expand_upper(d + 10.0, [&](double h) { return f(h) > target; });
    return operating_point_at_t(spec, bisect_monotone(f, target, tight_bracket(0.0, hi)));
}

OracleOperatingPoint gamma_for_target_risk(const GmmSpec& spec, double target_risk) {
    spec.validate();
    if (!(target_risk > 0.0)) throw InfeasibleError("gamma_for_target_risk: target risk must be positive");
    const double d = spec.delta;
    if (target_risk >= normal_tail(d)) return operating_point_at_t(spec, 0.0);
    const double target = std::log(target_risk);
    auto f = [d](double t) { return log_risk_at(d, t); };
    const double hi = expand_upper(d + 10.0, [&](double h) { return f(h) < target; });
    return operating_point_at_t(spec, bisect_monotone(f, target, tight_bracket(0.0, hi)));
}

double m_star(double c) {
    check_c(c);
    if (c < 0.5) {
        const double v = c - 1.0 / (4.0 * c);
        return v * v;
    }
    const double v = 2.0 * c - 1.0;
    return v * v;
}

double m_lower(double c, double gamma_delta) {
    check_c(c);
    if (!(gamma_delta > 0.0 && gamma_delta < 1.0)) throw DomainError("m_lower: indecision mass must lie in (0, 1)");
    return m_lower_from_log(c, -std::log(gamma_delta));
}

double separation_for(double c, double level) {
    if (!(c > 0.0) || !(level > 0.0 && level < 1.0)) throw DomainError("separation_for: need c > 0 and level in (0, 1)");
    return c * std::sqrt(2.0 * std::log(1.0 / level));
}

void PhaseGridConfig::validate() const {
    if (!(delta_target > 0.0 && delta_target < 1.0)) throw DomainError("PhaseGridConfig: delta_target must lie in (0, 1)");
    if (c_grid.empty() || m_grid.empty()) throw DomainError("PhaseGridConfig: grids must be nonempty");
    auto check = [](const std::vector<double>& g, const char* name) {
        for (std::size_t i = 0; i < g.size(); ++i) {
            if (!(g[i] > 0.0 && g[i] < 1.0)) throw DomainError(std::string("PhaseGridConfig: ") + name + " values must lie in (0, 1)");
            if (i > 0 && !(g[i] > g[i - 1])) throw DomainError(std::string("PhaseGridConfig: ") + name + " must be strictly increasing");
        }
    };
    check(c_grid, "c_grid");
    check(m_grid, "m_grid");
    if (!(cap_low < cap_high)) throw DomainError("PhaseGridConfig: cap must be a nonempty interval");
    if (!(dead_band >= 0.0)) throw DomainError("PhaseGridConfig: dead_band must be non-negative");
}

PhaseGrid phase_grid(const PhaseGridConfig& cfg) {
    cfg.validate();
    PhaseGrid grid;
    grid.config = cfg;
    grid.cells.reserve(cfg.c_grid.size() * cfg.m_grid.size());
    const double level = cfg.delta_target;
    for (double c : cfg.c_grid) {
        for (double m : cfg.m_grid) {
            PhaseCell cell;
            cell.c = c;
            cell.m = m;
            cell.gamma = cell.decided = cell.t = cell.ratio_raw = cell.ratio_capped = kNaN;
            if (std::abs(c - 0.5) > cfg.dead_band) {
                const GmmSpec spec{separation_for(c, level)};
                const double small = std::pow(level, m);
                try {
                    const OracleOperatingPoint p =
                        c > 0.5 ? threshold_for_gamma(spec, small) : threshold_for_decided_mass(spec, small);
                    cell.gamma = p.gamma;
                    cell.decided = p.decided;
                    cell.t = p.t;
                    cell.ratio_raw = p.risk / level;
                    cell.ratio_capped = std::min(std::max(cell.ratio_raw, cfg.cap_low), cfg.cap_high);
                    cell.resolved = std::isfinite(cell.ratio_raw);
                } catch (const BracketError&) {
                    cell.resolved = false;
                }
            }
            grid.cells.push_back(cell);
        }
    }
    return grid;
}

EnvelopePoint phase_envelope_point(double level, double c) {
    check_c(c);
    EnvelopePoint e;
    e.c = c;
    const GmmSpec spec{separation_for(c, level)};
    const OracleOperatingPoint p = gamma_for_target_risk(spec, level);
    e.gamma_star = p.gamma;
    e.decided_star = p.decided;
    e.m_star = m_star(c);
    const double log_inv_level = std::log(1.0 / level);
    // log(1/gamma*), taken from whichever of gamma* and 1 - gamma* is known to full precision.
    const double log_inv_gamma = p.gamma <= 0.5 ? -std::log(p.gamma) : -std::log1p(-p.decided);
    if (c > 0.5) {
        e.m_hat = p.gamma > 0.0 ? log_inv_gamma / log_inv_level : kInf;
    } else {
        e.m_hat = -std::log(p.decided) / log_inv_level;
    }
    e.m_lower = (p.gamma > 0.0 && log_inv_gamma > 0.0) ? m_lower_from_log(c, log_inv_gamma) : kNaN;
    return e;
}

std::vector<double> interior_grid(double lo, double hi, std::size_t n) {
    std::vector<double> g(n);
    for (std::size_t i = 0; i < n; ++i) g[i] = lo + (hi - lo) * static_cast<double>(i + 1) / static_cast<double>(n + 1);
    return g;
}

}  // namespace indecide
