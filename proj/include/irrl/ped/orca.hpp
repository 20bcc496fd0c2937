#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "irrl/sim/types.hpp"
#include "irrl/vec2.hpp"

namespace irrl {

struct OrcaParams {
    double time_horizon = 2.0;   // s, velocity-obstacle truncation
    double neighbor_dist = 5.0;  // m, constraints ignored beyond this center distance
    double max_speed = 1.0;      // m/s
    double safety_margin = 0.05; // m, added to the combined radius in constraints only
};

/// Directed line in velocity space; the feasible side is to its left.
struct HalfPlane {
    Vec2 point;
    Vec2 dir;
};

namespace orca_detail {

inline constexpr double kEps = 1e-10;

/// Clamp the current solution onto constraint line `line_no`, staying inside
/// the speed disc and all earlier constraints. Returns false when that
/// intersection is empty.
inline bool solve_on_line(const std::vector<HalfPlane>& lines, std::size_t line_no, double radius,
                          const Vec2& opt_vel, bool direction_opt, Vec2& result) {
    const HalfPlane& ln = lines[line_no];
    const double dot_pd = dot(ln.point, ln.dir);
    const double discriminant = dot_pd * dot_pd + radius * radius - ln.point.norm_sq();
    if (discriminant < 0.0) return false;  // line misses the speed disc

    const double sqrt_disc = std::sqrt(discriminant);
    double t_left = -dot_pd - sqrt_disc;
    double t_right = -dot_pd + sqrt_disc;

    for (std::size_t i = 0; i < line_no; ++i) {
        const double denominator = det(ln.dir, lines[i].dir);
        const double numerator = det(lines[i].dir, ln.point - lines[i].point);
        if (std::abs(denominator) <= kEps) {
            if (numerator < 0.0) return false;  // parallel and fully outside
            continue;
        }
        const double t = numerator / denominator;
        if (denominator >= 0.0) {
            t_right = std::min(t_right, t);
        } else {
            t_left = std::max(t_left, t);
        }
        if (t_left > t_right) return false;
    }

    if (direction_opt) {
        result = dot(opt_vel, ln.dir) > 0.0 ? ln.point + ln.dir * t_right : ln.point + ln.dir * t_left;
    } else {
        const double t = dot(ln.dir, opt_vel - ln.point);
        result = ln.point + ln.dir * std::clamp(t, t_left, t_right);
    }
    return true;
}

/// Incremental 2D LP over the half-planes and the speed disc. Returns
/// lines.size() on success, otherwise the index of the first failing
/// constraint (with `result` holding the best velocity before the failure).
inline std::size_t solve_2d(const std::vector<HalfPlane>& lines, double radius, const Vec2& opt_vel,
                            bool direction_opt, Vec2& result) {
    if (direction_opt) {
        result = opt_vel * radius;  // opt_vel is a unit direction here
    } else if (opt_vel.norm_sq() > radius * radius) {
        result = unit_or_zero(opt_vel) * radius;
    } else {
        result = opt_vel;
    }
    for (std::size_t i = 0; i < lines.size(); ++i) {
        if (det(lines[i].dir, lines[i].point - result) > 0.0) {
            const Vec2 saved = result;
            if (!solve_on_line(lines, i, radius, opt_vel, direction_opt, result)) {
                result = saved;
                return i;
            }
        }
    }
    return lines.size();
}

/// Fallback projection LP: starting from the first infeasible constraint,
/// minimize the largest constraint violation.
inline void solve_3d(const std::vector<HalfPlane>& lines, std::size_t begin_line, double radius,
                     Vec2& result) {
    double distance = 0.0;
    std::vector<HalfPlane> proj_lines;
    for (std::size_t i = begin_line; i < lines.size(); ++i) {
        if (det(lines[i].dir, lines[i].point - result) <= distance) continue;

        proj_lines.clear();
        for (std::size_t j = 0; j < i; ++j) {
            HalfPlane line;
            const double determinant = det(lines[i].dir, lines[j].dir);
            if (std::abs(determinant) <= kEps) {
                if (dot(lines[i].dir, lines[j].dir) > 0.0) continue;  // same direction
                line.point = (lines[i].point + lines[j].point) * 0.5;
            } else {
                const double t = det(lines[j].dir, lines[i].point - lines[j].point) / determinant;
                line.point = lines[i].point + lines[i].dir * t;
            }
            line.dir = unit_or_zero(lines[j].dir - lines[i].dir);
            proj_lines.push_back(line);
        }

        const Vec2 saved = result;
        if (solve_2d(proj_lines, radius, perp(lines[i].dir), true, result) < proj_lines.size()) {
            result = saved;
        }
        distance = det(lines[i].dir, lines[i].point - result);
    }
}

}  // namespace orca_detail

/// Build the reciprocal velocity-obstacle half-plane for `self` against one
/// neighbor, truncated at `time_horizon` (or at `dt` when already overlapping).
/// Each agent takes half the responsibility for getting out of the obstacle.
inline HalfPlane orca_constraint(const WorldAgent& self, const WorldAgent& other,
                                 const OrcaParams& params, double dt) {
    const Vec2 rel_pos = other.position - self.position;
    const Vec2 rel_vel = self.velocity - other.velocity;
    const double dist_sq = rel_pos.norm_sq();
    const double combined_r = self.radius + other.radius + params.safety_margin;
    const double combined_r_sq = combined_r * combined_r;

    HalfPlane plane;
    Vec2 u;
    if (dist_sq > combined_r_sq) {
        const double inv_horizon = 1.0 / params.time_horizon;
        const Vec2 w = rel_vel - rel_pos * inv_horizon;
        const double w_len_sq = w.norm_sq();
        const double dot1 = dot(w, rel_pos);
        if (dot1 < 0.0 && dot1 * dot1 > combined_r_sq * w_len_sq) {
            // Project on the truncating circle of the velocity obstacle.
            const double w_len = std::sqrt(w_len_sq);
            const Vec2 unit_w = w / w_len;
            plane.dir = {unit_w.y, -unit_w.x};
            u = unit_w * (combined_r * inv_horizon - w_len);
        } else {
            // Project on the nearer leg.
            const double leg = std::sqrt(dist_sq - combined_r_sq);
            if (det(rel_pos, w) > 0.0) {
                plane.dir = Vec2{rel_pos.x * leg - rel_pos.y * combined_r,
                                 rel_pos.x * combined_r + rel_pos.y * leg} /
                            dist_sq;
            } else {
                plane.dir = Vec2{rel_pos.x * leg + rel_pos.y * combined_r,
                                 -rel_pos.x * combined_r + rel_pos.y * leg} /
                            -dist_sq;
            }
            u = plane.dir * dot(rel_vel, plane.dir) - rel_vel;
        }
    } else {
        // Already overlapping: push apart within one time step.
        const double inv_dt = 1.0 / dt;
        const Vec2 w = rel_vel - rel_pos * inv_dt;
        const double w_len = w.norm();
        const Vec2 unit_w = w_len > 1e-12 ? w / w_len : Vec2{1.0, 0.0};
        plane.dir = {unit_w.y, -unit_w.x};
        u = unit_w * (combined_r * inv_dt - w_len);
    }
    plane.point = self.velocity + u * 0.5;
    return plane;
}

/// New velocity for `self`: the feasible velocity closest to the preferred
/// velocity (pref_speed toward the goal) under one half-plane per neighbor
/// within neighbor_dist and the speed cap. Infeasible sets fall back to the
/// least-violation projection, so a velocity is always returned.
inline Vec2 orca_velocity(const WorldAgent& self, std::span<const WorldAgent> neighbors,
                          const OrcaParams& params, double dt) {
    std::vector<HalfPlane> lines;
    lines.reserve(neighbors.size());
    for (const WorldAgent& other : neighbors) {
        if (distance(self.position, other.position) >= params.neighbor_dist) continue;
        lines.push_back(orca_constraint(self, other, params, dt));
    }
    const double speed_cap = std::min(params.max_speed, self.pref_speed);
    const Vec2 pref_vel = unit_or_zero(self.goal - self.position) * self.pref_speed;
    Vec2 result;
    const std::size_t fail = orca_detail::solve_2d(lines, speed_cap, pref_vel, false, result);
    if (fail < lines.size()) orca_detail::solve_3d(lines, fail, speed_cap, result);
    return result;
}

}  // namespace irrl
