#pragma once

// Discovery: sensing robots reveal landmarks, tagging robots remove them.
// A landmark inside a robot's sensing radius becomes sensed; inside a
// tagging radius it is tagged and drops out of play. Sensing is not a
// prerequisite for tagging.

#include "mrsim/scenario.hpp"

namespace mrsim {

class DiscoveryScenario final : public Scenario {
public:
    std::string name() const override { return "discovery"; }

    void configure_defaults(ScenarioConfig& cfg) const override {
        cfg.num_robots = 4;
        cfg.max_steps = 100;
        cfg.step_sizes.assign(4, 0.2);
        cfg.heterogeneity.kind = HetKind::CapabilitySet;
        cfg.heterogeneity.obs_mode = HetObsMode::FullTeam;
        // Rows are [sensing radius, tag radius].
        cfg.heterogeneity.values = {{0.45, 0}, {0.45, 0}, {0, 0.25}, {0, 0.25}};
        cfg.reward_coefficients = {{"sense", 1.0}, {"tag", 5.0}, {"step", -0.05}, {"violation", 0.0}};
    }

    void reset(EnvState& state, const ScenarioConfig& cfg, SplitRng& rng) const override {
        state.poses = sample_poses(cfg.num_robots, spawn_region(cfg), spawn_separation(cfg), rng);
        DiscoveryState s;
        const int k = cfg.layout.integer("discovery.num_landmarks");
        const Rect region = shrink(cfg.params.arena(), cfg.layout.scalar("discovery.landmark_margin"));
        for (int i = 0; i < k; ++i)
            s.landmarks.push_back({rng.uniform(region.xmin, region.xmax),
                                   rng.uniform(region.ymin, region.ymax)});
        s.sensed.assign(k, 0);
        s.tagged.assign(k, 0);
        state.scenario = std::move(s);
    }

    double transition(EnvState& state, const ScenarioConfig& cfg, SplitRng&) const override {
        auto& s = std::get<DiscoveryState>(state.scenario);
        int newly_sensed = 0;
        int newly_tagged = 0;
        for (std::size_t k = 0; k < s.landmarks.size(); ++k) {
            if (s.tagged[k]) continue;
            bool sense_hit = false, tag_hit = false;
            for (std::size_t i = 0; i < state.poses.size(); ++i) {
                double d = distance(state.poses[i].position(), s.landmarks[k]);
                const auto& cap = cfg.heterogeneity.values[i];
                if (cap[0] > 0.0 && d <= cap[0]) sense_hit = true;
                if (cap[1] > 0.0 && d <= cap[1]) tag_hit = true;
            }
            if (sense_hit && !s.sensed[k]) {
                s.sensed[k] = 1;
                ++newly_sensed;
            }
            if (tag_hit) {
                s.tagged[k] = 1;
                ++newly_tagged;
            }
        }
        bool all_tagged = true;
        for (char t : s.tagged) all_tagged = all_tagged && t;
        state.metrics.scenario_metric += newly_tagged;
        return cfg.coefficient("sense") * newly_sensed + cfg.coefficient("tag") * newly_tagged +
               cfg.coefficient("step") * (all_tagged ? 0.0 : 1.0);
    }

    // Own pose, others' positions, then landmark positions. Unsensed and
    // tagged landmarks read as the out-of-arena sentinel.
    std::vector<double> observe(const EnvState& state, const ScenarioConfig& cfg,
                                int robot) const override {
        const auto& s = std::get<DiscoveryState>(state.scenario);
        const auto& sentinel = cfg.layout.values("discovery.sentinel");
        std::vector<double> obs = base_observation(state, robot);
        for (std::size_t k = 0; k < s.landmarks.size(); ++k) {
            bool visible = s.sensed[k] && !s.tagged[k];
            obs.push_back(visible ? s.landmarks[k].x : sentinel[0]);
            obs.push_back(visible ? s.landmarks[k].y : sentinel[1]);
        }
        return obs;
    }

    Vec2 scripted_goal(const EnvState& state, const ScenarioConfig&, int robot) const override {
        const auto& s = std::get<DiscoveryState>(state.scenario);
        Vec2 self = state.poses[static_cast<std::size_t>(robot)].position();
        Vec2 best = self;
        double best_d = std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < s.landmarks.size(); ++k) {
            if (s.tagged[k]) continue;
            double d = distance(self, s.landmarks[k]);
            if (d < best_d) {
                best_d = d;
                best = s.landmarks[k];
            }
        }
        return best;
    }
};

} // namespace mrsim
