#pragma once

// Barrier-certificate safety filter. Builds the per-step QP that minimally
// modifies nominal commands so pairwise distance, wall clearance, and
// static-obstacle clearance barriers h stay nonnegative (hdot >= -gamma h^3).
// The filter runs in single-integrator space on the projected points; safe
// SI commands map back through the diffeomorphism.

#include <cassert>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "mrsim/controllers.hpp"
#include "mrsim/core.hpp"
#include "mrsim/qp.hpp"

namespace mrsim {

struct BarrierConfig {
    double safety_radius = 0.17;   // m, minimum center-to-center distance R
    double barrier_gain = 100.0;   // gamma in the class-K term gamma*h^3
    double boundary_margin = 0.05; // m, keep-out band inside the arena walls
    bool enabled = true;
    std::vector<Circle> static_obstacles;
    // Optional bitmask per obstacle restricting which robots it constrains
    // (empty, or a zero entry, means all robots).
    std::vector<std::uint64_t> obstacle_masks;
    // Extra shrink absorbing explicit-Euler discretisation error.
    double discrete_margin = 0.002;

    void validate(const SimParams& params) const {
        if (safety_radius < params.collision_radius)
            throw std::invalid_argument("BarrierConfig: safety_radius < collision_radius");
        if (barrier_gain <= 0)
            throw std::invalid_argument("BarrierConfig: barrier_gain must be > 0");
    }
};

/// Inequality rows A u <= b over the stacked SI command u in R^{2N}.
struct ConstraintRows {
    int num_robots = 0;
    std::vector<double> A;  // rows x 2N, row-major
    std::vector<double> b;

    int rows() const { return static_cast<int>(b.size()); }
    void push_row(const std::vector<double>& row, double rhs) {
        A.insert(A.end(), row.begin(), row.end());
        b.push_back(rhs);
    }
};

/// Assemble barrier rows for the given positions. Order: all unordered pairs
/// (i < j, lexicographic), then per robot the four walls (x-min, x-max,
/// y-min, y-max), then robot-major obstacle rows.
inline ConstraintRows build_barrier_constraints(const std::vector<Vec2>& positions,
                                                const BarrierConfig& config,
                                                const SimParams& params) {
    const int n = static_cast<int>(positions.size());
    if (n < 1) throw std::invalid_argument("build_barrier_constraints: need at least one robot");
    const double gamma = config.barrier_gain;
    const double r2 = config.safety_radius * config.safety_radius;

    ConstraintRows out;
    out.num_robots = n;
    std::vector<double> row(static_cast<std::size_t>(2) * n, 0.0);

    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            Vec2 d = positions[i] - positions[j];
            double dist2 = d.dot(d);
            if (dist2 < 1e-18)
                throw std::domain_error("build_barrier_constraints: coincident robot positions");
            double h = dist2 - r2;
            std::fill(row.begin(), row.end(), 0.0);
            row[2 * i] = -2.0 * d.x;
            row[2 * i + 1] = -2.0 * d.y;
            row[2 * j] = 2.0 * d.x;
            row[2 * j + 1] = 2.0 * d.y;
            out.push_row(row, gamma * h * h * h);
        }
    }

    const Rect arena = params.arena();
    const double m = config.boundary_margin;
    for (int i = 0; i < n; ++i) {
        const Vec2 p = positions[i];
        struct Wall {
            double h;
            double cx, cy;
        } walls[4] = {
            {p.x - (arena.xmin + m), -1.0, 0.0},  // x-min
            {(arena.xmax - m) - p.x, 1.0, 0.0},   // x-max
            {p.y - (arena.ymin + m), 0.0, -1.0},  // y-min
            {(arena.ymax - m) - p.y, 0.0, 1.0},   // y-max
        };
        for (const Wall& w : walls) {
            std::fill(row.begin(), row.end(), 0.0);
            row[2 * i] = w.cx;
            row[2 * i + 1] = w.cy;
            out.push_row(row, gamma * w.h * w.h * w.h);
        }
    }

    for (int i = 0; i < n; ++i) {
        for (std::size_t o = 0; o < config.static_obstacles.size(); ++o) {
            if (o < config.obstacle_masks.size() && config.obstacle_masks[o] != 0 &&
                (config.obstacle_masks[o] & (1ULL << i)) == 0)
                continue;
            const Circle& obs = config.static_obstacles[o];
            Vec2 d = positions[i] - obs.center;
            double h = d.dot(d) - obs.radius * obs.radius;
            std::fill(row.begin(), row.end(), 0.0);
            row[2 * i] = -2.0 * d.x;
            row[2 * i + 1] = -2.0 * d.y;
            out.push_row(row, gamma * h * h * h);
        }
    }
    return out;
}

struct BarrierResult {
    std::vector<UnicycleVelocity> commands;
    bool infeasible = false;
    double kkt_residual = 0.0;
};

/// Filter nominal unicycle commands through the barrier QP. With the filter
/// disabled this reduces to plain clamping. On an infeasible QP all robots
/// are commanded zero velocity and the diagnostic flag is raised.
inline BarrierResult apply_barrier(const std::vector<RobotPose>& poses,
                                   const std::vector<UnicycleVelocity>& nominal,
                                   const BarrierConfig& config, const ControllerGains& gains,
                                   const SimParams& params) {
    const int n = static_cast<int>(poses.size());
    if (static_cast<int>(nominal.size()) != n)
        throw std::invalid_argument("apply_barrier: poses/nominal size mismatch");

    BarrierResult out;
    out.commands.resize(n);
    for (int i = 0; i < n; ++i) out.commands[i] = clamp_command(nominal[i], params);
    if (!config.enabled || n == 0) return out;

    const double l = gains.projection_distance;

    // The barrier acts on the projected points, whose SI velocity is the
    // decision variable exactly. Radii and margins are inflated so that the
    // guarantee carries over to robot centers: center and projected point
    // differ by at most l.
    std::vector<Vec2> proj(n);
    for (int i = 0; i < n; ++i) proj[i] = projected_point(poses[i], gains);

    BarrierConfig eff = config;
    eff.safety_radius = config.safety_radius + 2.0 * l + config.discrete_margin;
    eff.boundary_margin = config.boundary_margin + l + config.discrete_margin;
    for (Circle& c : eff.static_obstacles) c.radius += l + config.discrete_margin;

    ConstraintRows rows = build_barrier_constraints(proj, eff, params);

    QuadraticProgram qp;
    qp.n = 2 * n;
    qp.u_nom.resize(static_cast<std::size_t>(2) * n);
    for (int i = 0; i < n; ++i) {
        PlanarVelocity si = uni_to_si(out.commands[i], poses[i], gains);
        qp.u_nom[2 * i] = si.vx;
        qp.u_nom[2 * i + 1] = si.vy;
    }
    qp.A = std::move(rows.A);
    qp.b = std::move(rows.b);
    // Loose box keeping pathological solutions bounded; it never binds for
    // admissible nominal commands.
    const double cap = params.v_max + l * params.omega_max + 0.1;
    qp.lo.assign(qp.n, -cap);
    qp.hi.assign(qp.n, cap);

    QpResult sol = solve_qp(qp, 1e-9);
    if (sol.status == QpStatus::Infeasible) {
        for (int i = 0; i < n; ++i) out.commands[i] = {0.0, 0.0};
        out.infeasible = true;
        return out;
    }
    out.kkt_residual = sol.kkt_residual;
    assert(sol.status != QpStatus::Optimal || sol.kkt_residual <= 1e-6);

    // Map back. If any mapped command exceeds the actuation limits, scale
    // the whole stacked solution uniformly: for h >= 0 every row rhs is
    // nonnegative, so uniform shrinking keeps all barrier rows satisfied.
    std::vector<UnicycleVelocity> mapped(n);
    double scale = 1.0;
    for (int i = 0; i < n; ++i) {
        PlanarVelocity si{sol.u[2 * i], sol.u[2 * i + 1]};
        const double c = std::cos(poses[i].theta);
        const double s = std::sin(poses[i].theta);
        mapped[i].v = c * si.vx + s * si.vy;
        mapped[i].omega = (-s * si.vx + c * si.vy) / l;
        if (std::fabs(mapped[i].v) > params.v_max)
            scale = std::min(scale, params.v_max / std::fabs(mapped[i].v));
        if (std::fabs(mapped[i].omega) > params.omega_max)
            scale = std::min(scale, params.omega_max / std::fabs(mapped[i].omega));
    }
    for (int i = 0; i < n; ++i)
        out.commands[i] = {mapped[i].v * scale, mapped[i].omega * scale};
    return out;
}

} // namespace mrsim
