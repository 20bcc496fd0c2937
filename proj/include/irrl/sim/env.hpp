#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "irrl/errors.hpp"
#include "irrl/ped/orca.hpp"
#include "irrl/ped/sfm.hpp"
#include "irrl/rng.hpp"
#include "irrl/sim/frame.hpp"
#include "irrl/sim/reward.hpp"
#include "irrl/sim/types.hpp"
#include "irrl/vec2.hpp"

namespace irrl {

/// Pedestrian controller selection plus the parameter blocks it needs.
struct PedController {
    PedModelKind kind = PedModelKind::Sfm;
    SfmParams sfm;
    OrcaParams orca;
};

inline void validate(const EnvConfig& cfg, const std::string& prefix) {
    auto fail = [&](const char* field, const char* why) {
        throw ConfigError(prefix + "." + field + " " + why);
    };
    if (!(cfg.dt > 0.0)) fail("dt", "must be > 0");
    if (!(cfg.time_limit > 0.0)) fail("time_limit", "must be > 0");
    if (cfg.discomfort_dist < 0.0) fail("discomfort_dist", "must be >= 0");
    if (cfg.n_humans < 0) fail("n_humans", "must be >= 0");
    if (!(cfg.circle_radius > 0.0)) fail("circle_radius", "must be > 0");
    if (!(cfg.robot_radius > 0.0)) fail("robot_radius", "must be > 0");
    if (!(cfg.human_radius > 0.0)) fail("human_radius", "must be > 0");
    if (!(cfg.goal_tolerance > 0.0)) fail("goal_tolerance", "must be > 0");
    if (cfg.position_jitter < 0.0) fail("position_jitter", "must be >= 0");
    if (!(cfg.robot_pref_speed > 0.0)) fail("robot_pref_speed", "must be > 0");
    if (!(cfg.human_pref_speed > 0.0)) fail("human_pref_speed", "must be > 0");
}

/// Circle-crossing navigation environment. All agents start on a circle with
/// goals at their antipodes; the robot starts at the bottom. Agents advance
/// simultaneously with first-order kinematics; pedestrians that reach their
/// goal are re-aimed at the antipode so crowd density stays constant.
class Environment {
public:
    explicit Environment(EnvConfig cfg) : cfg_(cfg) { validate(cfg_, "env"); }

    const EnvConfig& config() const { return cfg_; }
    const EnvState& state() const { return state_; }
    EnvState& mutable_state() { return state_; }

    /// Deterministic placement for (config, seed). Throws ConfigError when an
    /// agent cannot be placed free of overlap after 100 attempts.
    ObservationFrame reset(std::uint64_t seed) {
        state_ = EnvState{};
        state_.robot.position = {0.0, -cfg_.circle_radius};
        state_.robot.goal = {0.0, cfg_.circle_radius};
        state_.robot.velocity = {0.0, 0.0};
        state_.robot.radius = cfg_.robot_radius;
        state_.robot.pref_speed = cfg_.robot_pref_speed;

        state_.agent_rng.reserve(static_cast<std::size_t>(cfg_.n_humans) + 1);
        for (int i = 0; i <= cfg_.n_humans; ++i) {
            state_.agent_rng.emplace_back(mix_seed(seed, static_cast<std::uint64_t>(i) + 1));
        }

        RngStream placement(mix_seed(seed, 0));
        state_.humans.reserve(static_cast<std::size_t>(cfg_.n_humans));
        for (int i = 0; i < cfg_.n_humans; ++i) {
            WorldAgent human;
            human.radius = cfg_.human_radius;
            human.pref_speed = cfg_.human_pref_speed;
            human.velocity = {0.0, 0.0};
            bool placed = false;
            for (int attempt = 0; attempt < 100 && !placed; ++attempt) {
                const double angle = placement.uniform(-kPi, kPi);
                const Vec2 jitter = placement.disc(cfg_.position_jitter);
                human.position =
                    Vec2{cfg_.circle_radius * std::cos(angle), cfg_.circle_radius * std::sin(angle)} +
                    jitter;
                human.goal = -human.position;
                placed = !overlaps_any(human);
            }
            if (!placed) {
                throw ConfigError("env: could not place human " + std::to_string(i) +
                                  " after 100 attempts (circle too small for n_humans)");
            }
            state_.humans.push_back(human);
        }
        return to_robot_frame(state_.robot, state_.humans);
    }

    /// Advance one step. `robot_action_body` is the commanded velocity in the
    /// body frame of the pre-step observation; its magnitude must already be
    /// capped at the robot's preferred speed.
    StepResult step(const Vec2& robot_action_body, const PedController& peds) {
        const Vec2 heading = robot_heading(state_.robot);
        const Vec2 robot_vel = body_to_world(robot_action_body, heading);

        const std::size_t n = state_.humans.size();
        std::vector<Vec2>& human_vel = human_vel_;
        human_vel.assign(n, Vec2{});
        for (std::size_t i = 0; i < n; ++i) {
            neighbors_.clear();
            for (std::size_t j = 0; j < n; ++j) {
                if (j != i) neighbors_.push_back(state_.humans[j]);
            }
            if (cfg_.pedestrians_see_robot) neighbors_.push_back(state_.robot);
            const WorldAgent& self = state_.humans[i];
            if (peds.kind == PedModelKind::Sfm) {
                human_vel[i] =
                    sfm_policy(self, neighbors_, peds.sfm, cfg_.dt, state_.agent_rng[i + 1]);
            } else {
                human_vel[i] = orca_velocity(self, neighbors_, peds.orca, cfg_.dt);
            }
        }

        // Minimum surface separation along the swept motion, sampled at dt/4.
        double min_sep = std::numeric_limits<double>::infinity();
        for (int sub = 1; sub <= 4; ++sub) {
            const double tau = cfg_.dt * (static_cast<double>(sub) / 4.0);
            const Vec2 rp = state_.robot.position + robot_vel * tau;
            for (std::size_t i = 0; i < n; ++i) {
                const Vec2 hp = state_.humans[i].position + human_vel[i] * tau;
                const double sep =
                    distance(rp, hp) - state_.robot.radius - state_.humans[i].radius;
                min_sep = std::min(min_sep, sep);
            }
        }

        state_.robot.position += robot_vel * cfg_.dt;
        state_.robot.velocity = robot_vel;
        for (std::size_t i = 0; i < n; ++i) {
            state_.humans[i].position += human_vel[i] * cfg_.dt;
            state_.humans[i].velocity = human_vel[i];
            WorldAgent& h = state_.humans[i];
            if (distance(h.position, h.goal) <= cfg_.goal_tolerance) h.goal = -h.goal;
        }
        state_.step_count += 1;
        state_.sim_time = static_cast<double>(state_.step_count) * cfg_.dt;

        const bool reached_goal =
            distance(state_.robot.position, state_.robot.goal) <= cfg_.goal_tolerance;

        StepResult result;
        result.min_separation = min_sep;
        result.reward = step_reward(min_sep, reached_goal, cfg_.discomfort_dist);
        if (min_sep < 0.0) {
            result.terminal = TerminalKind::Collision;
        } else if (reached_goal) {
            result.terminal = TerminalKind::Success;
        } else if (state_.sim_time >= cfg_.time_limit) {
            result.terminal = TerminalKind::Timeout;
        }
        result.obs = to_robot_frame(state_.robot, state_.humans);
        return result;
    }

private:
    bool overlaps_any(const WorldAgent& candidate) const {
        if (distance(candidate.position, state_.robot.position) <=
            candidate.radius + state_.robot.radius) {
            return true;
        }
        for (const WorldAgent& h : state_.humans) {
            if (distance(candidate.position, h.position) <= candidate.radius + h.radius) return true;
        }
        return false;
    }

    EnvConfig cfg_;
    EnvState state_;
    std::vector<WorldAgent> neighbors_;  // scratch, reused across steps
    std::vector<Vec2> human_vel_;        // scratch, reused across steps
};

}  // namespace irrl
