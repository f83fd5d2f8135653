#pragma once

#include <cstddef>
#include <vector>

namespace indecide {

/// Symmetric two-component Gaussian mixture: class 1 ~ N(+delta, 1), class 2 ~
/// N(-delta, 1), equal priors. `delta` is half the distance between centers.
struct GmmSpec {
    double delta = 1.0;

    void validate() const;
};

/// The rule that abstains on |x| < t, with its indecision mass and the
/// misclassification rate conditional on deciding.
struct OracleOperatingPoint {
    double t = 0.0;
    double gamma = 0.0;
    double risk = 0.0;
    /// 1 - gamma, computed directly so it keeps full relative precision when tiny.
    double decided = 1.0;
};

OracleOperatingPoint operating_point_at_t(const GmmSpec& spec, double t);

/// Unique t >= 0 whose operating point has indecision mass `gamma`.
OracleOperatingPoint threshold_for_gamma(const GmmSpec& spec, double gamma);

/// Same as threshold_for_gamma(spec, 1 - decided) without forming 1 - decided,
/// for indecision masses that sit within a few ulps of 1.
OracleOperatingPoint threshold_for_decided_mass(const GmmSpec& spec, double decided);

/// Smallest indecision mass whose optimal rule has conditional risk `target_risk`.
/// Targets at or above the Bayes risk need no abstention and return t = 0.
OracleOperatingPoint gamma_for_target_risk(const GmmSpec& spec, double target_risk);

/// Bayes risk of the mixture, P(xi >= delta).
double bayes_risk(const GmmSpec& spec);

/// Optimal conditional risk at indecision mass gamma.
inline double oracle_risk(const GmmSpec& spec, double gamma) { return threshold_for_gamma(spec, gamma).risk; }

/// Critical indecision exponent: (c - 1/(4c))^2 below c = 1/2, (2c - 1)^2 above.
double m_star(double c);

/// Finite-level version of m_star with the correction
/// eps = log(4 pi log(1/g)) / (2 log(1/g)) evaluated at indecision mass g.
double m_lower(double c, double gamma_delta);

/// Separation delta(c) = c * sqrt(2 log(1/level)).
double separation_for(double c, double level);

struct PhaseGridConfig {
    double delta_target = 1e-15;
    std::vector<double> c_grid;
    std::vector<double> m_grid;
    double cap_low = 0.5;
    double cap_high = 2.0;
    /// Cells with |c - 1/2| <= dead_band are left unresolved.
    double dead_band = 0.05;

    void validate() const;
};

struct PhaseCell {
    double c = 0.0;
    double m = 0.0;
    double gamma = 0.0;
    double decided = 0.0;
    double t = 0.0;
    double ratio_raw = 0.0;
    double ratio_capped = 0.0;
    bool resolved = false;
};

/// Cells in row-major order: c outer, m inner.
struct PhaseGrid {
    PhaseGridConfig config;
    std::vector<PhaseCell> cells;

    const PhaseCell& at(std::size_t ci, std::size_t mi) const { return cells[ci * config.m_grid.size() + mi]; }
};

/// For every (c, m): separation delta(c), indecision mass delta^m (c > 1/2) or
/// 1 - delta^m (c < 1/2), and the optimal risk at that mass divided by the level.
PhaseGrid phase_grid(const PhaseGridConfig& cfg);

struct EnvelopePoint {
    double c = 0.0;
    double gamma_star = 0.0;
    double decided_star = 1.0;
    /// log(1/gamma*) / log(1/level) above c = 1/2, log(1/(1 - gamma*)) / log(1/level) below.
    double m_hat = 0.0;
    double m_star = 0.0;
    double m_lower = 0.0;
};

/// Exact optimal indecision exponent at level `level` for separation delta(c).
EnvelopePoint phase_envelope_point(double level, double c);

/// `n` points strictly inside (lo, hi): lo + (hi - lo) * (i + 1) / (n + 1).
std::vector<double> interior_grid(double lo, double hi, std::size_t n);

}  // namespace indecide
