#pragma once

// Position and pose controllers. Single-integrator commands are designed
// for a point projected a small distance ahead of the axle and mapped to
// (v, omega) through the near-identity diffeomorphism.

#include <cmath>

#include "mrsim/core.hpp"

namespace mrsim {

struct ControllerGains {
    double k_position = 1.0;          // 1/s, proportional position gain
    double projection_distance = 0.05; // m, diffeomorphism offset
    // Polar pose-controller gains. Stability needs k_rho > 0, k_beta < 0,
    // k_alpha - k_rho > 0.
    double k_rho = 0.4;
    double k_alpha = 1.5;
    double k_beta = -0.3;
    // Pose controller zeroing gate: inside this ball the command is (0,0).
    double pose_position_tolerance = 0.02;  // m
    double pose_heading_tolerance = 0.1;    // rad

    void validate() const {
        if (k_position <= 0 || projection_distance <= 0)
            throw std::invalid_argument("ControllerGains: k_position and projection_distance must be > 0");
        if (!(k_rho > 0 && k_beta < 0 && k_alpha - k_rho > 0))
            throw std::invalid_argument("ControllerGains: pose gains violate stability condition");
    }
};

/// Point the single-integrator layer actually controls.
inline Vec2 projected_point(const RobotPose& pose, const ControllerGains& gains) {
    return pose.position() + pose.heading() * gains.projection_distance;
}

/// Proportional go-to-position law, norm-clamped.
inline PlanarVelocity si_position_controller(const Vec2& position, const Vec2& goal,
                                             const ControllerGains& gains, double si_max_speed) {
    PlanarVelocity u{gains.k_position * (goal.x - position.x),
                     gains.k_position * (goal.y - position.y)};
    return clamp_si(u, si_max_speed);
}

/// Map a single-integrator command at the projected point to (v, omega).
inline UnicycleVelocity si_to_uni(const PlanarVelocity& si_vel, const RobotPose& pose,
                                  const ControllerGains& gains, const SimParams& params) {
    const double c = std::cos(pose.theta);
    const double s = std::sin(pose.theta);
    UnicycleVelocity cmd;
    cmd.v = c * si_vel.vx + s * si_vel.vy;
    cmd.omega = (-s * si_vel.vx + c * si_vel.vy) / gains.projection_distance;
    return clamp_command(cmd, params);
}

/// Inverse of si_to_uni: velocity of the projected point for a given
/// unicycle command.
inline PlanarVelocity uni_to_si(const UnicycleVelocity& cmd, const RobotPose& pose,
                                const ControllerGains& gains) {
    const double c = std::cos(pose.theta);
    const double s = std::sin(pose.theta);
    const double l = gains.projection_distance;
    return {c * cmd.v - l * s * cmd.omega, s * cmd.v + l * c * cmd.omega};
}

/// Polar-coordinate pose controller (drive to position and heading).
inline UnicycleVelocity unicycle_pose_controller(const RobotPose& pose, const RobotPose& goal,
                                                 const ControllerGains& gains,
                                                 const SimParams& params) {
    const double dx = goal.x - pose.x;
    const double dy = goal.y - pose.y;
    const double rho = std::hypot(dx, dy);
    const double heading_err = wrap_angle(goal.theta - pose.theta);
    if (rho < gains.pose_position_tolerance && std::fabs(heading_err) < gains.pose_heading_tolerance)
        return {0.0, 0.0};

    const double alpha = wrap_angle(std::atan2(dy, dx) - pose.theta);
    const double beta = wrap_angle(goal.theta - pose.theta - alpha);
    UnicycleVelocity cmd{gains.k_rho * rho, gains.k_alpha * alpha + gains.k_beta * beta};
    return clamp_command(cmd, params);
}

/// The controller every benchmark scenario uses: drive the projected point
/// to a waypoint with the SI law, mapped through the diffeomorphism.
inline UnicycleVelocity position_waypoint_controller(const RobotPose& pose, const Vec2& waypoint,
                                                     const ControllerGains& gains,
                                                     const SimParams& params) {
    PlanarVelocity si =
        si_position_controller(projected_point(pose, gains), waypoint, gains, params.si_max_speed);
    return si_to_uni(si, pose, gains, params);
}

} // namespace mrsim
