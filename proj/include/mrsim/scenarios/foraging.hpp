#pragma once

// Level-based foraging in the plane: a resource is collected once the
// robots within the foraging radius have a summed level at least the
// resource's level. Reward is the level of every resource collected.

#include "mrsim/scenario.hpp"

namespace mrsim {

class ForagingScenario final : public Scenario {
public:
    std::string name() const override { return "foraging"; }

    void configure_defaults(ScenarioConfig& cfg) const override {
        cfg.num_robots = 3;
        cfg.max_steps = 100;
        cfg.step_sizes.assign(3, 0.2);
        cfg.heterogeneity.kind = HetKind::CapabilitySet;
        cfg.heterogeneity.obs_mode = HetObsMode::FullTeam;
        cfg.heterogeneity.values = {{1}, {2}, {3}};  // foraging levels
        cfg.reward_coefficients = {{"forage", 1.0}, {"violation", 0.0}};
    }

    // Resource levels are drawn uniformly in [1, sum of the two highest
    // robot levels], so every resource is collectable by some coalition.
    static int max_resource_level(const ScenarioConfig& cfg) {
        std::vector<double> levels;
        for (const auto& row : cfg.heterogeneity.values) levels.push_back(row.at(0));
        std::sort(levels.rbegin(), levels.rend());
        double top2 = levels[0] + (levels.size() > 1 ? levels[1] : 0.0);
        return std::max(1, static_cast<int>(top2));
    }

    void reset(EnvState& state, const ScenarioConfig& cfg, SplitRng& rng) const override {
        state.poses = sample_poses(cfg.num_robots, spawn_region(cfg), spawn_separation(cfg), rng);
        ForagingState s;
        const int m = cfg.layout.integer("foraging.num_resources");
        const Rect region = shrink(cfg.params.arena(), cfg.layout.scalar("foraging.resource_margin"));
        const int max_level = max_resource_level(cfg);
        for (int i = 0; i < m; ++i) {
            s.resources.push_back({rng.uniform(region.xmin, region.xmax),
                                   rng.uniform(region.ymin, region.ymax)});
            s.levels.push_back(1 + static_cast<int>(rng.uniform_int(
                                       static_cast<std::uint64_t>(max_level))));
        }
        s.foraged.assign(m, 0);
        state.scenario = std::move(s);
    }

    double transition(EnvState& state, const ScenarioConfig& cfg, SplitRng&) const override {
        auto& s = std::get<ForagingState>(state.scenario);
        const double radius = cfg.layout.scalar("foraging.radius");
        double reward = 0.0;
        for (std::size_t r = 0; r < s.resources.size(); ++r) {
            if (s.foraged[r]) continue;
            double level_sum = 0.0;
            for (std::size_t i = 0; i < state.poses.size(); ++i)
                if (distance(state.poses[i].position(), s.resources[r]) <= radius)
                    level_sum += cfg.heterogeneity.values[i][0];
            if (level_sum >= s.levels[r]) {
                s.foraged[r] = 1;
                reward += cfg.coefficient("forage") * s.levels[r];
                state.metrics.scenario_metric += 1.0;
            }
        }
        return reward;
    }

    // Own pose, others' positions, then per resource (x, y, level); foraged
    // resources read as the sentinel with level 0.
    std::vector<double> observe(const EnvState& state, const ScenarioConfig& cfg,
                                int robot) const override {
        const auto& s = std::get<ForagingState>(state.scenario);
        const auto& sentinel = cfg.layout.values("discovery.sentinel");
        std::vector<double> obs = base_observation(state, robot);
        for (std::size_t r = 0; r < s.resources.size(); ++r) {
            bool live = !s.foraged[r];
            obs.push_back(live ? s.resources[r].x : sentinel[0]);
            obs.push_back(live ? s.resources[r].y : sentinel[1]);
            obs.push_back(live ? static_cast<double>(s.levels[r]) : 0.0);
        }
        return obs;
    }

    Vec2 scripted_goal(const EnvState& state, const ScenarioConfig&, int robot) const override {
        const auto& s = std::get<ForagingState>(state.scenario);
        Vec2 self = state.poses[static_cast<std::size_t>(robot)].position();
        Vec2 best = self;
        double best_d = std::numeric_limits<double>::infinity();
        for (std::size_t r = 0; r < s.resources.size(); ++r) {
            if (s.foraged[r]) continue;
            double d = distance(self, s.resources[r]);
            if (d < best_d) {
                best_d = d;
                best = s.resources[r];
            }
        }
        return best;
    }
};

} // namespace mrsim
