#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "apnum/errors.hpp"

namespace apnum {

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline double to_unit(std::uint64_t x) {
    // (0, 1): top 53 bits, shifted off zero
    return (static_cast<double>(x >> 11) + 0.5) * 0x1.0p-53;
}

}  // namespace detail

/// Counter-based Gaussian stream: the value depends only on
/// (seed, member, step, component), so ensembles are reproducible and
/// independent of evaluation order.
inline double counter_gaussian(std::uint64_t seed, std::uint64_t member,
                               std::uint64_t step, std::uint64_t component) {
    using detail::splitmix64;
    std::uint64_t key = splitmix64(seed ^ splitmix64(member + 0x632be59bd9b4e019ULL));
    key = splitmix64(key ^ splitmix64(step + 0x9e3779b97f4a7c15ULL));
    key = splitmix64(key ^ splitmix64(component + 0xd1b54a32d192ed03ULL));
    const double u1 = detail::to_unit(splitmix64(key));
    const double u2 = detail::to_unit(splitmix64(key + 1));
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

/// Q-Wiener increments on a fixed step grid: component j of the increment
/// over step k has law Normal(0, q_diag[j] * dt).
struct BrownianDriver {
    std::uint64_t seed = 0;
    double dt = 1e-2;
    std::vector<double> q_diag;

    BrownianDriver() = default;
    BrownianDriver(std::uint64_t seed_, double dt_, std::vector<double> q_diag_)
        : seed(seed_), dt(dt_), q_diag(std::move(q_diag_)) {
        if (!(dt > 0.0)) throw Error("BrownianDriver: dt must be positive");
        for (double q : q_diag)
            if (q < 0.0) throw Error("BrownianDriver: covariance entries must be nonnegative");
    }

    std::size_t noise_dim() const { return q_diag.size(); }

    double increment(std::uint64_t member, std::uint64_t step, std::uint64_t component) const {
        return std::sqrt(q_diag[component] * dt) * counter_gaussian(seed, member, step, component);
    }
};

}  // namespace apnum
