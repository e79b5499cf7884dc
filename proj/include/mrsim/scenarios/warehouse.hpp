#pragma once

// Warehouse: green and red robots pick up packages in their colour's
// right-side zone and deliver them to the matching left-side zone.

#include "mrsim/scenario.hpp"

namespace mrsim {

class WarehouseScenario final : public Scenario {
public:
    std::string name() const override { return "warehouse"; }

    void configure_defaults(ScenarioConfig& cfg) const override {
        cfg.num_robots = 4;
        cfg.max_steps = 70;
        cfg.step_sizes.assign(4, 0.2);
        cfg.heterogeneity.kind = HetKind::ClassId;
        cfg.heterogeneity.obs_mode = HetObsMode::Own;
        // Rows are one-hot over [green, red].
        cfg.heterogeneity.values = {{1, 0}, {1, 0}, {0, 1}, {0, 1}};
        cfg.reward_coefficients = {{"load", 1.0}, {"delivery", 3.0}, {"violation", 0.0}};
    }

    void reset(EnvState& state, const ScenarioConfig& cfg, SplitRng& rng) const override {
        state.poses = sample_poses(cfg.num_robots, spawn_region(cfg), spawn_separation(cfg), rng);
        WarehouseState s;
        s.loaded.assign(cfg.num_robots, 0);
        state.scenario = std::move(s);
    }

    static bool is_green(const ScenarioConfig& cfg, std::size_t robot) {
        return cfg.heterogeneity.values[robot][0] == 1.0;
    }

    double transition(EnvState& state, const ScenarioConfig& cfg, SplitRng&) const override {
        auto& s = std::get<WarehouseState>(state.scenario);
        double reward = 0.0;
        for (std::size_t i = 0; i < state.poses.size(); ++i) {
            Vec2 p = state.poses[i].position();
            const bool green = is_green(cfg, i);
            const Rect pickup = cfg.layout.rect(green ? "warehouse.green_right" : "warehouse.red_right");
            const Rect deliver = cfg.layout.rect(green ? "warehouse.green_left" : "warehouse.red_left");
            if (!s.loaded[i] && pickup.contains(p)) {
                s.loaded[i] = 1;
                reward += cfg.coefficient("load");
            } else if (s.loaded[i] && deliver.contains(p)) {
                s.loaded[i] = 0;
                reward += cfg.coefficient("delivery");
                state.metrics.scenario_metric += 1.0;  // deliveries
            }
        }
        return reward;
    }

    // Own pose, others' positions, own loaded flag.
    std::vector<double> observe(const EnvState& state, const ScenarioConfig&,
                                int robot) const override {
        const auto& s = std::get<WarehouseState>(state.scenario);
        std::vector<double> obs = base_observation(state, robot);
        obs.push_back(s.loaded[static_cast<std::size_t>(robot)] ? 1.0 : 0.0);
        return obs;
    }

    Vec2 scripted_goal(const EnvState& state, const ScenarioConfig& cfg, int robot) const override {
        const auto& s = std::get<WarehouseState>(state.scenario);
        const std::size_t r = static_cast<std::size_t>(robot);
        const bool green = is_green(cfg, r);
        if (s.loaded[r])
            return cfg.layout.rect(green ? "warehouse.green_left" : "warehouse.red_left").center();
        return cfg.layout.rect(green ? "warehouse.green_right" : "warehouse.red_right").center();
    }
};

} // namespace mrsim
