#pragma once

#include <cmath>
#include <cstdint>
#include <optional>

namespace irrl {

/// Welford accumulator: running count, mean and sum of squared deviations.
struct OnlineStat {
    std::int64_t n = 0;
    double mean = 0.0;
    double m2 = 0.0;  // sum of squared deviations from the running mean

    bool operator==(const OnlineStat&) const = default;
};

/// One Welford update. Returns the population-variance estimate m2/n after
/// absorbing `x` (0 for the first sample).
inline double normalize_update(double x, OnlineStat& stat) {
    stat.n += 1;
    const double delta = x - stat.mean;
    stat.mean += delta / static_cast<double>(stat.n);
    const double delta2 = x - stat.mean;
    stat.m2 += delta * delta2;
    return stat.m2 / static_cast<double>(stat.n);
}

/// Running statistics backing the TD-error scale: rewards, per-step discounts,
/// and squared episode returns.
struct ScaleState {
    OnlineStat stat_reward;
    OnlineStat stat_gamma;
    OnlineStat stat_return_sq;

    bool operator==(const ScaleState&) const = default;
};

inline constexpr double kSigmaDeltaFloor = 1e-8;

/// TD-error scale update. `gamma_in` is 0 and `episode_return` is set when the
/// episode ended on this step; otherwise `gamma_in` is the discount and
/// `episode_return` is empty. Returns sigma_delta: sqrt(var(R) + mean(G^2) *
/// var(gamma)) once two episode returns have been seen, 1 before that, floored
/// at 1e-8.
inline double scale_td_error(double reward, double gamma_in, std::optional<double> episode_return,
                             ScaleState& scale) {
    const double var_reward = normalize_update(reward, scale.stat_reward);
    const double var_gamma = normalize_update(gamma_in, scale.stat_gamma);
    if (episode_return.has_value()) {
        const double g = *episode_return;
        normalize_update(g * g, scale.stat_return_sq);
    }
    double sigma_delta = 1.0;
    if (scale.stat_return_sq.n > 1) {
        sigma_delta = std::sqrt(var_reward + scale.stat_return_sq.mean * var_gamma);
    }
    return sigma_delta < kSigmaDeltaFloor ? kSigmaDeltaFloor : sigma_delta;
}

}  // namespace irrl
