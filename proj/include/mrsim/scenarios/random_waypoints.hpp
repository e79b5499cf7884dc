#pragma once

// Random Waypoint Navigation: every robot is driven to its own uniformly
// drawn waypoint and receives a fresh one on arrival. Reward is identically
// zero; the task exists for throughput benchmarking and determinism checks.

#include "mrsim/scenario.hpp"

namespace mrsim {

class RandomWaypointsScenario final : public Scenario {
public:
    std::string name() const override { return "random_waypoints"; }

    void configure_defaults(ScenarioConfig& cfg) const override {
        cfg.num_robots = 4;
        cfg.max_steps = 1000;
        cfg.step_sizes.assign(4, 0.2);
        cfg.heterogeneity.obs_mode = HetObsMode::None;
        cfg.reward_coefficients = {{"violation", 0.0}};
    }

    static Vec2 draw_target(const ScenarioConfig& cfg, SplitRng& rng) {
        const Rect region = shrink(cfg.params.arena(), cfg.layout.scalar("rwp.waypoint_margin"));
        return {rng.uniform(region.xmin, region.xmax), rng.uniform(region.ymin, region.ymax)};
    }

    void reset(EnvState& state, const ScenarioConfig& cfg, SplitRng& rng) const override {
        state.poses = sample_poses(cfg.num_robots, spawn_region(cfg), spawn_separation(cfg), rng);
        RandomWaypointState s;
        for (int i = 0; i < cfg.num_robots; ++i) {
            s.targets.push_back(draw_target(cfg, rng));
            s.target_headings.push_back(kPi * (1.0 - 2.0 * rng.uniform()));
        }
        state.scenario = std::move(s);
    }

    /// Actions are ignored; the waypoints are the stored targets.
    std::vector<Vec2> waypoints(const EnvState& state, const std::vector<DiscreteAction>&,
                                const ScenarioConfig&, SplitRng&) const override {
        return std::get<RandomWaypointState>(state.scenario).targets;
    }

    std::vector<double> waypoint_headings(const EnvState& state, const std::vector<Vec2>&,
                                          const ScenarioConfig&) const override {
        return std::get<RandomWaypointState>(state.scenario).target_headings;
    }

    double transition(EnvState& state, const ScenarioConfig& cfg, SplitRng& rng) const override {
        auto& s = std::get<RandomWaypointState>(state.scenario);
        const double tol = cfg.layout.scalar("rwp.arrival_tolerance");
        for (std::size_t i = 0; i < state.poses.size(); ++i) {
            Vec2 controlled = cfg.controller == ControllerKind::UnicyclePosition
                                  ? projected_point(state.poses[i], cfg.gains)
                                  : state.poses[i].position();
            if (distance(controlled, s.targets[i]) <= tol) {
                s.targets[i] = draw_target(cfg, rng);
                s.target_headings[i] = kPi * (1.0 - 2.0 * rng.uniform());
            }
        }
        return 0.0;
    }

    // Own pose plus the current target.
    std::vector<double> observe(const EnvState& state, const ScenarioConfig&,
                                int robot) const override {
        const auto& s = std::get<RandomWaypointState>(state.scenario);
        const auto& pose = state.poses[static_cast<std::size_t>(robot)];
        const Vec2 t = s.targets[static_cast<std::size_t>(robot)];
        return {pose.x, pose.y, pose.theta, t.x, t.y};
    }

    Vec2 scripted_goal(const EnvState& state, const ScenarioConfig&, int robot) const override {
        return std::get<RandomWaypointState>(state.scenario).targets[static_cast<std::size_t>(robot)];
    }
};

} // namespace mrsim
