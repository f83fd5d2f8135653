#pragma once

#include <cstddef>
#include <vector>

#include "indecide/discrete_oracle.hpp"
#include "indecide/random.hpp"

namespace testing_support {

/// Random finite joint with n atoms and K classes. With `plateau`, about a third
/// of the atoms copy the class shares of an earlier atom, so confidence ties occur.
inline indecide::DiscreteJoint random_joint(indecide::RandomStream& rng, std::size_t n, std::size_t K, bool plateau) {
    std::vector<std::vector<double>> w(n, std::vector<double>(K));
    for (std::size_t i = 0; i < n; ++i) {
        if (plateau && i > 0 && rng.uniform() < 0.35) {
            const std::size_t src = static_cast<std::size_t>(rng.uniform() * i);
            const double scale = 0.2 + 2 * rng.uniform();
            for (std::size_t k = 0; k < K; ++k) w[i][k] = w[src][k] * scale;
        } else {
            for (std::size_t k = 0; k < K; ++k) w[i][k] = rng.uniform() < 0.1 ? 0.0 : rng.uniform();
            if (w[i][0] + w[i][1] == 0.0) w[i][0] = 0.5;
        }
    }
    double s = 0;
    for (auto& row : w)
        for (double v : row) s += v;
    for (auto& row : w)
        for (double& v : row) v /= s;
    return indecide::DiscreteJoint::from_weights(w);
}

/// Zero, the total mass of the first few atoms (often a plateau edge), or a uniform draw.
inline double random_gamma(indecide::RandomStream& rng, const indecide::DiscreteJoint& j) {
    if (rng.uniform() < 0.2) return 0.0;
    if (rng.uniform() < 0.3) {
        double g = 0;
        const std::size_t m = static_cast<std::size_t>(rng.uniform() * (j.size() - 1));
        for (std::size_t i = 0; i < m; ++i) g += j[i].total();
        return g;
    }
    return 0.9 * rng.uniform();
}

}  // namespace testing_support
