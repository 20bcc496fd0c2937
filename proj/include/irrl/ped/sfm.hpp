#pragma once

#include <cmath>
#include <span>

#include "irrl/rng.hpp"
#include "irrl/sim/types.hpp"
#include "irrl/vec2.hpp"

namespace irrl {

struct SfmParams {
    double relax_time = 0.5;     // s, goal-driving relaxation
    double rep_strength = 2.0;   // m/s^2
    double rep_range = 0.35;     // m
    double body_force = 0.0;     // contact pushback gain, 0 disables
    double neighbor_cutoff = 5.0;  // m, repulsion ignored beyond this center distance
};

/// Social-force acceleration: goal-driving relaxation toward the preferred
/// velocity plus exponential repulsion from each neighbor within the cutoff.
/// The goal direction is zero once the agent sits on its goal, so an agent at
/// rest on its goal stays at rest.
///
/// Coincident agents (center distance under 1e-9) get a repulsion direction
/// drawn from `rng` with the magnitude capped at its zero-distance value.
inline Vec2 sfm_accel(const WorldAgent& self, std::span<const WorldAgent> neighbors,
                      const SfmParams& params, RngStream& rng) {
    const Vec2 goal_dir = unit_or_zero(self.goal - self.position);
    Vec2 accel = (goal_dir * self.pref_speed - self.velocity) / params.relax_time;
    for (const WorldAgent& other : neighbors) {
        const Vec2 offset = self.position - other.position;
        const double dist = offset.norm();
        if (dist > params.neighbor_cutoff) continue;
        const double reach = self.radius + other.radius;
        if (dist < 1e-9) {
            accel += rng.unit_vec2() * (params.rep_strength * std::exp(reach / params.rep_range));
            continue;
        }
        const Vec2 away = offset / dist;
        double magnitude = params.rep_strength * std::exp((reach - dist) / params.rep_range);
        accel += away * magnitude;
        if (params.body_force > 0.0 && dist < reach) {
            accel += away * (params.body_force * (reach - dist));
        }
    }
    return accel;
}

/// One Euler step of the social-force dynamics, clipped to the preferred speed.
/// World-frame in, world-frame out.
inline Vec2 sfm_policy(const WorldAgent& self, std::span<const WorldAgent> neighbors,
                       const SfmParams& params, double dt, RngStream& rng) {
    const Vec2 v = self.velocity + sfm_accel(self, neighbors, params, rng) * dt;
    return clip_norm(v, self.pref_speed);
}

}  // namespace irrl
