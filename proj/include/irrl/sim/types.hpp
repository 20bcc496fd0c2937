#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "irrl/rng.hpp"
#include "irrl/vec2.hpp"

namespace irrl {

/// One agent of the world: the robot or a pedestrian. World-frame quantities.
struct WorldAgent {
    Vec2 position;
    Vec2 velocity;
    Vec2 goal;
    double radius = 0.3;
    double pref_speed = 1.0;
};

enum class PedModelKind { Sfm, Orca };

inline const char* to_string(PedModelKind k) { return k == PedModelKind::Sfm ? "sfm" : "orca"; }

struct EnvConfig {
    int n_humans = 5;
    double circle_radius = 4.0;   // m
    double dt = 0.25;             // s
    double time_limit = 30.0;     // s
    double robot_radius = 0.3;    // m
    double human_radius = 0.3;    // m
    double discomfort_dist = 0.2; // m, proximity-penalty band
    double goal_tolerance = 0.3;  // m, goal reached when within this distance
    PedModelKind ped_model = PedModelKind::Sfm;
    double position_jitter = 0.5; // m, placement noise radius on the circle
    double robot_pref_speed = 1.0;
    double human_pref_speed = 1.0;
    bool pedestrians_see_robot = true;
};

/// Robot-frame observation. The frame's X axis is the robot heading (direction
/// of the current velocity, falling back to the goal direction when nearly
/// stationary). Human velocities are relative to the robot.
struct ObservationFrame {
    // [goal_x, goal_y, goal_bearing, v_x, v_y]
    double robot_feat[5] = {0, 0, 0, 0, 0};
    // per pedestrian: [p_x, p_y, v_x, v_y]
    std::vector<std::array<double, 4>> human_feats;
};

enum class TerminalKind : std::uint8_t { None = 0, Success, Collision, Timeout };

inline const char* to_string(TerminalKind t) {
    switch (t) {
        case TerminalKind::Success: return "success";
        case TerminalKind::Collision: return "collision";
        case TerminalKind::Timeout: return "timeout";
        default: return "none";
    }
}

struct StepResult {
    ObservationFrame obs;
    double reward = 0.0;
    TerminalKind terminal = TerminalKind::None;
    double min_separation = 0.0;  // the d_t used in the reward; +inf with no humans
};

struct EnvState {
    WorldAgent robot;
    std::vector<WorldAgent> humans;
    double sim_time = 0.0;
    std::int64_t step_count = 0;
    std::vector<RngStream> agent_rng;  // index 0 = robot, then one per human
};

}  // namespace irrl
