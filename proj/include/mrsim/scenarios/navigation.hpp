#pragma once

// Navigation (multi-agent path finding): each robot has its own goal and
// only observes its own pose and the vector to that goal. Success means
// every robot sits on its goal when the horizon ends.

#include "mrsim/scenario.hpp"

namespace mrsim {

class NavigationScenario final : public Scenario {
public:
    std::string name() const override { return "navigation"; }

    void configure_defaults(ScenarioConfig& cfg) const override {
        cfg.num_robots = 3;
        cfg.max_steps = 100;
        cfg.step_sizes.assign(3, 0.2);
        cfg.heterogeneity.obs_mode = HetObsMode::None;
        cfg.reward_coefficients = {{"dist", -1.0}, {"violation", 0.0}};
    }

    void reset(EnvState& state, const ScenarioConfig& cfg, SplitRng& rng) const override {
        state.poses = sample_poses(cfg.num_robots, spawn_region(cfg), spawn_separation(cfg), rng);
        NavigationState s;
        const Rect region = shrink(cfg.params.arena(), cfg.layout.scalar("navigation.goal_margin"));
        const double sep = cfg.layout.scalar("navigation.goal_separation");
        for (int i = 0; i < cfg.num_robots; ++i) {
            bool placed = false;
            for (int attempt = 0; attempt < 1000 && !placed; ++attempt) {
                Vec2 g{rng.uniform(region.xmin, region.xmax), rng.uniform(region.ymin, region.ymax)};
                bool ok = true;
                for (const auto& other : s.goals)
                    if (distance(g, other) < sep) { ok = false; break; }
                if (ok) {
                    s.goals.push_back(g);
                    placed = true;
                }
            }
            if (!placed) throw std::runtime_error("navigation: could not place goals");
        }
        state.scenario = std::move(s);
    }

    double transition(EnvState& state, const ScenarioConfig& cfg, SplitRng&) const override {
        const auto& s = std::get<NavigationState>(state.scenario);
        double total = 0.0;
        for (std::size_t i = 0; i < state.poses.size(); ++i)
            total += distance(state.poses[i].position(), s.goals[i]);
        return cfg.coefficient("dist") * total;
    }

    void finalize(EnvState& state, const ScenarioConfig& cfg) const override {
        const auto& s = std::get<NavigationState>(state.scenario);
        const double radius = cfg.layout.scalar("navigation.on_goal_radius");
        bool all_on = true;
        for (std::size_t i = 0; i < state.poses.size(); ++i)
            all_on = all_on && distance(state.poses[i].position(), s.goals[i]) <= radius;
        state.metrics.success = all_on;
        state.metrics.scenario_metric = all_on ? 1.0 : 0.0;
    }

    // Own pose plus the vector to the own goal; no neighbour information.
    std::vector<double> observe(const EnvState& state, const ScenarioConfig&,
                                int robot) const override {
        const auto& s = std::get<NavigationState>(state.scenario);
        const auto& pose = state.poses[static_cast<std::size_t>(robot)];
        const Vec2 g = s.goals[static_cast<std::size_t>(robot)];
        return {pose.x, pose.y, pose.theta, g.x - pose.x, g.y - pose.y};
    }

    Vec2 scripted_goal(const EnvState& state, const ScenarioConfig&, int robot) const override {
        return std::get<NavigationState>(state.scenario).goals[static_cast<std::size_t>(robot)];
    }
};

} // namespace mrsim
