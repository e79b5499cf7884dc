#pragma once

// Material Transport: fast low-capacity and slow high-capacity robots empty
// two loading zones into the dropoff zone. Zone stock is drawn from
// per-zone Gaussians at reset and rounded to whole units.

#include "mrsim/scenario.hpp"

namespace mrsim {

class MaterialTransportScenario final : public Scenario {
public:
    std::string name() const override { return "material_transport"; }

    void configure_defaults(ScenarioConfig& cfg) const override {
        cfg.num_robots = 4;
        cfg.max_steps = 70;
        cfg.heterogeneity.kind = HetKind::CapabilitySet;
        cfg.heterogeneity.obs_mode = HetObsMode::FullTeam;
        // Rows are [step size, carrying capacity].
        cfg.heterogeneity.values = {{0.45, 5}, {0.45, 5}, {0.15, 15}, {0.15, 15}};
        cfg.step_sizes.clear();
        for (const auto& row : cfg.heterogeneity.values) cfg.step_sizes.push_back(row[0]);
        cfg.reward_coefficients = {
            {"load", 0.25}, {"dropoff", 0.75}, {"step", -0.1}, {"violation", 0.0}};
    }

    void reset(EnvState& state, const ScenarioConfig& cfg, SplitRng& rng) const override {
        state.poses = sample_poses(cfg.num_robots, spawn_region(cfg), spawn_separation(cfg), rng);
        MaterialTransportState s;
        s.circle_remaining = std::max(
            0.0, std::round(rng.normal(cfg.layout.scalar("mt.circle_mean"),
                                       std::sqrt(cfg.layout.scalar("mt.circle_variance")))));
        s.rect_remaining = std::max(
            0.0, std::round(rng.normal(cfg.layout.scalar("mt.rect_mean"),
                                       std::sqrt(cfg.layout.scalar("mt.rect_variance")))));
        s.loads.assign(cfg.num_robots, 0.0);
        s.total_initial = s.circle_remaining + s.rect_remaining;
        state.scenario = std::move(s);
    }

    double transition(EnvState& state, const ScenarioConfig& cfg, SplitRng&) const override {
        auto& s = std::get<MaterialTransportState>(state.scenario);
        const Circle circle = cfg.layout.circle("mt.circle_zone");
        const Rect rect = cfg.layout.rect("mt.rect_zone");
        const Rect dropoff = cfg.layout.rect("mt.dropoff_zone");
        double loaded_units = 0.0;
        double dropped_units = 0.0;
        for (std::size_t i = 0; i < state.poses.size(); ++i) {
            Vec2 p = state.poses[i].position();
            double capacity = cfg.heterogeneity.values[i][1];
            if (s.loads[i] > 0.0 && dropoff.contains(p)) {
                dropped_units += s.loads[i];
                s.delivered += s.loads[i];
                s.loads[i] = 0.0;
            } else if (s.loads[i] == 0.0) {
                if (circle.contains(p) && s.circle_remaining > 0.0) {
                    double take = std::min(capacity, s.circle_remaining);
                    s.circle_remaining -= take;
                    s.loads[i] = take;
                    loaded_units += take;
                } else if (rect.contains(p) && s.rect_remaining > 0.0) {
                    double take = std::min(capacity, s.rect_remaining);
                    s.rect_remaining -= take;
                    s.loads[i] = take;
                    loaded_units += take;
                }
            }
        }
        state.metrics.scenario_metric = s.circle_remaining + s.rect_remaining;  // material left
        bool zones_empty = s.circle_remaining == 0.0 && s.rect_remaining == 0.0;
        return cfg.coefficient("load") * loaded_units + cfg.coefficient("dropoff") * dropped_units +
               cfg.coefficient("step") * (zones_empty ? 0.0 : 1.0);
    }

    // Own pose, others' positions, own load, remaining stock per zone.
    std::vector<double> observe(const EnvState& state, const ScenarioConfig&,
                                int robot) const override {
        const auto& s = std::get<MaterialTransportState>(state.scenario);
        std::vector<double> obs = base_observation(state, robot);
        obs.push_back(s.loads[static_cast<std::size_t>(robot)]);
        obs.push_back(s.circle_remaining);
        obs.push_back(s.rect_remaining);
        return obs;
    }

    Vec2 scripted_goal(const EnvState& state, const ScenarioConfig& cfg, int robot) const override {
        const auto& s = std::get<MaterialTransportState>(state.scenario);
        if (s.loads[static_cast<std::size_t>(robot)] > 0.0)
            return cfg.layout.rect("mt.dropoff_zone").center();
        if (s.circle_remaining > 0.0) return cfg.layout.circle("mt.circle_zone").center;
        if (s.rect_remaining > 0.0) return cfg.layout.rect("mt.rect_zone").center();
        return state.poses[static_cast<std::size_t>(robot)].position();
    }
};

} // namespace mrsim
