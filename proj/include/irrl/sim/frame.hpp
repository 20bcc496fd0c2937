#pragma once

#include <cmath>

#include "irrl/sim/types.hpp"
#include "irrl/vec2.hpp"

namespace irrl {

inline constexpr double kHeadingSpeedEps = 1e-6;

/// Unit heading of the body-fixed frame: direction of the current velocity;
/// direction to the goal when nearly stationary; world +X when also at the goal.
inline Vec2 robot_heading(const WorldAgent& robot) {
    if (robot.velocity.norm() >= kHeadingSpeedEps) return robot.velocity / robot.velocity.norm();
    const Vec2 to_goal = robot.goal - robot.position;
    if (to_goal.norm() >= 1e-9) return to_goal / to_goal.norm();
    return {1.0, 0.0};
}

/// World -> body-frame rotation (R^T v).
inline Vec2 world_to_body(const Vec2& v, const Vec2& heading) {
    return {dot(v, heading), det(heading, v)};
}

/// Body-frame -> world rotation (R v).
inline Vec2 body_to_world(const Vec2& v, const Vec2& heading) {
    return {heading.x * v.x - heading.y * v.y, heading.y * v.x + heading.x * v.y};
}

/// Build the robot-frame observation: goal position and bearing plus the
/// robot's own velocity, and per-pedestrian positions with velocities relative
/// to the robot, all rotated into the body frame.
inline ObservationFrame to_robot_frame(const WorldAgent& robot,
                                       const std::vector<WorldAgent>& humans) {
    const Vec2 heading = robot_heading(robot);
    ObservationFrame obs;
    const Vec2 goal_local = world_to_body(robot.goal - robot.position, heading);
    double bearing = std::atan2(goal_local.y, goal_local.x);
    if (bearing <= -kPi) bearing = kPi;  // keep (-pi, pi]
    const Vec2 vel_local = world_to_body(robot.velocity, heading);
    obs.robot_feat[0] = goal_local.x;
    obs.robot_feat[1] = goal_local.y;
    obs.robot_feat[2] = bearing;
    obs.robot_feat[3] = vel_local.x;
    obs.robot_feat[4] = vel_local.y;
    obs.human_feats.reserve(humans.size());
    for (const WorldAgent& h : humans) {
        const Vec2 p = world_to_body(h.position - robot.position, heading);
        const Vec2 v = world_to_body(h.velocity - robot.velocity, heading);
        obs.human_feats.push_back({p.x, p.y, v.x, v.y});
    }
    return obs;
}

/// Inverse of the observation transform for a body-frame point: recovers the
/// world position given the same robot state.
inline Vec2 body_point_to_world(const WorldAgent& robot, const Vec2& p_body) {
    return robot.position + body_to_world(p_body, robot_heading(robot));
}

}  // namespace irrl
