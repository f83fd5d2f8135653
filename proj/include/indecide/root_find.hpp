#pragma once

#include <cmath>
#include <sstream>
#include <utility>

#include "indecide/errors.hpp"

namespace indecide {

struct Interval {
    double low = 0.0;
    double high = 1.0;
};

struct RootFindConfig {
    double abs_tol = 1e-12;
    int max_iter = 200;
    Interval bracket{};

    void validate() const {
        if (!(abs_tol > 0.0)) throw DomainError("RootFindConfig: abs_tol must be positive");
        if (max_iter < 1) throw DomainError("RootFindConfig: max_iter must be at least 1");
        if (!(bracket.low < bracket.high)) throw DomainError("RootFindConfig: bracket.low must be below bracket.high");
    }
};

/// Solves f(x) = target for monotone f on cfg.bracket by bisection.
///
/// Either direction of monotonicity is accepted; it is read off the bracket
/// endpoints. Stops once |f(x) - target| <= abs_tol or the bracket has shrunk
/// below abs_tol (or below one ulp).
template <class F>
double bisect_monotone(F&& f, double target, const RootFindConfig& cfg = {}) {
    cfg.validate();
    double lo = cfg.bracket.low;
    double hi = cfg.bracket.high;
    double f_lo = f(lo);
    double f_hi = f(hi);

    if (std::abs(f_lo - target) <= cfg.abs_tol) return lo;
    if (std::abs(f_hi - target) <= cfg.abs_tol) return hi;

    const bool increasing = f_lo < f_hi;
    const double f_min = increasing ? f_lo : f_hi;
    const double f_max = increasing ? f_hi : f_lo;
    if (!(target >= f_min && target <= f_max)) {
        std::ostringstream os;
        os << "bisect_monotone: target " << target << " not enclosed by f([" << lo << ", " << hi << "]) = [" << f_min
           << ", " << f_max << "]";
        throw BracketError(os.str());
    }

    for (int it = 0; it < cfg.max_iter; ++it) {
        const double mid = lo + 0.5 * (hi - lo);
        if (mid <= lo || mid >= hi) return mid;
        const double f_mid = f(mid);
        if (std::abs(f_mid - target) <= cfg.abs_tol) return mid;
        if ((f_mid < target) == increasing)
            lo = mid;
        else
            hi = mid;
        if (hi - lo <= cfg.abs_tol) return lo + 0.5 * (hi - lo);
    }
    throw IterationLimitError("bisect_monotone: iteration limit reached before convergence");
}

}  // namespace indecide
