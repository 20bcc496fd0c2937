#pragma once

namespace irrl {

/// Step reward as a piecewise function of the minimum separation distance d
/// (surface to surface, so d < 0 means overlap) and goal arrival. Cases are
/// evaluated in order, so a collision dominates goal-reaching.
inline double step_reward(double min_separation, bool reached_goal, double discomfort_dist = 0.2) {
    if (min_separation < 0.0) return -0.25;
    if (min_separation < discomfort_dist) return (min_separation - discomfort_dist) * 0.125;
    if (reached_goal) return 1.0;
    return 0.0;
}

}  // namespace irrl
