#pragma once

// Planar rigid-body state, unicycle kinematics, and the arena geometry
// shared by every scenario. Angles are radians, wrapped to (-pi, pi].

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace mrsim {

inline constexpr double kPi = 3.14159265358979323846;

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
    double dot(const Vec2& o) const { return x * o.x + y * o.y; }
    double norm() const { return std::hypot(x, y); }
};

inline double distance(const Vec2& a, const Vec2& b) { return (a - b).norm(); }

/// Axis-aligned rectangle, used for zones and the arena itself.
struct Rect {
    double xmin = 0.0, xmax = 0.0, ymin = 0.0, ymax = 0.0;

    bool contains(const Vec2& p) const {
        return p.x >= xmin && p.x <= xmax && p.y >= ymin && p.y <= ymax;
    }
    // Euclidean distance from p to the rectangle; zero inside.
    double distance_to(const Vec2& p) const {
        double dx = std::max({xmin - p.x, 0.0, p.x - xmax});
        double dy = std::max({ymin - p.y, 0.0, p.y - ymax});
        return std::hypot(dx, dy);
    }
    Vec2 center() const { return {0.5 * (xmin + xmax), 0.5 * (ymin + ymax)}; }
};

struct Circle {
    Vec2 center;
    double radius = 0.0;

    bool contains(const Vec2& p) const { return distance(center, p) <= radius; }
};

/// Pose of one robot: position plus heading.
struct RobotPose {
    double x = 0.0;
    double y = 0.0;
    double theta = 0.0;

    Vec2 position() const { return {x, y}; }
    Vec2 heading() const { return {std::cos(theta), std::sin(theta)}; }
};

/// Unicycle command: forward speed and turn rate.
struct UnicycleVelocity {
    double v = 0.0;
    double omega = 0.0;
};

/// Single-integrator command: direct planar velocity.
struct PlanarVelocity {
    double vx = 0.0;
    double vy = 0.0;

    double norm() const { return std::hypot(vx, vy); }
};

/// Physics constants shared by the whole engine.
struct SimParams {
    double dt = 0.033;              // seconds per physics tick (30 Hz loop)
    double v_max = 0.2;             // m/s
    double omega_max = 3.6;         // rad/s
    double si_max_speed = 0.15;     // m/s, single-integrator norm cap
    double arena_half_width = 1.6;  // m
    double arena_half_height = 1.0; // m
    double collision_radius = 0.135; // m, center-to-center contact distance

    Rect arena() const {
        return {-arena_half_width, arena_half_width, -arena_half_height, arena_half_height};
    }

    void validate() const {
        if (dt <= 0 || v_max <= 0 || omega_max <= 0 || si_max_speed <= 0 ||
            arena_half_width <= 0 || arena_half_height <= 0 || collision_radius <= 0)
            throw std::invalid_argument("SimParams: all fields must be strictly positive");
        if (collision_radius >= std::min(arena_half_width, arena_half_height))
            throw std::invalid_argument("SimParams: collision_radius too large for arena");
    }
};

/// Wrap an angle to (-pi, pi].
inline double wrap_angle(double theta) {
    if (!std::isfinite(theta))
        throw std::domain_error("wrap_angle: non-finite input");
    double r = std::remainder(theta, 2.0 * kPi);
    if (r <= -kPi) r += 2.0 * kPi;
    return r;
}

/// Explicit Euler step of the unicycle model. The command is assumed
/// already clamped to the limits in SimParams.
inline RobotPose step_unicycle(const RobotPose& pose, const UnicycleVelocity& cmd, double dt) {
    RobotPose next;
    next.x = pose.x + cmd.v * std::cos(pose.theta) * dt;
    next.y = pose.y + cmd.v * std::sin(pose.theta) * dt;
    next.theta = wrap_angle(pose.theta + cmd.omega * dt);
    return next;
}

/// Symmetric matrix of center-to-center distances, row-major N x N.
inline std::vector<double> pairwise_distances(const std::vector<RobotPose>& poses) {
    if (poses.empty())
        throw std::invalid_argument("pairwise_distances: need at least one pose");
    const std::size_t n = poses.size();
    std::vector<double> d(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            double dist = std::hypot(poses[i].x - poses[j].x, poses[i].y - poses[j].y);
            d[i * n + j] = dist;
            d[j * n + i] = dist;
        }
    }
    return d;
}

inline double min_pairwise_distance(const std::vector<RobotPose>& poses) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < poses.size(); ++i)
        for (std::size_t j = i + 1; j < poses.size(); ++j)
            best = std::min(best, std::hypot(poses[i].x - poses[j].x, poses[i].y - poses[j].y));
    return best;
}

inline double clamp(double v, double lo, double hi) { return std::min(std::max(v, lo), hi); }

inline UnicycleVelocity clamp_command(const UnicycleVelocity& cmd, const SimParams& p) {
    return {clamp(cmd.v, -p.v_max, p.v_max), clamp(cmd.omega, -p.omega_max, p.omega_max)};
}

inline PlanarVelocity clamp_si(const PlanarVelocity& v, double max_speed) {
    double n = v.norm();
    if (n <= max_speed || n == 0.0) return v;
    double s = max_speed / n;
    return {v.vx * s, v.vy * s};
}

} // namespace mrsim
