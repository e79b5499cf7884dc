#pragma once

// Predator-Prey: the team chases a faster virtual prey that greedily
// maximises its distance to the closest robot over a fixed candidate set of
// moves. A tag scores whenever the prey ends a step inside some robot's
// tag radius.

#include "mrsim/scenario.hpp"

namespace mrsim {

/// Evaluate the prey's escape move: stay plus the 8 compass directions
/// (E, NE, N, NW, W, SW, S, SE) scaled by prey_step. Candidates leaving the
/// arena are discarded; ties break toward the lowest candidate index.
inline Vec2 prey_heuristic(const Vec2& prey, const std::vector<Vec2>& predators, double prey_step,
                           const Rect& arena) {
    Vec2 best = prey;
    double best_score = -std::numeric_limits<double>::infinity();
    for (int k = 0; k < 9; ++k) {
        Vec2 cand = prey;
        if (k > 0) {
            double ang = (k - 1) * (kPi / 4.0);
            cand = prey + Vec2{std::cos(ang), std::sin(ang)} * prey_step;
        }
        if (!arena.contains(cand)) continue;
        double nearest = std::numeric_limits<double>::infinity();
        for (const auto& p : predators) nearest = std::min(nearest, distance(cand, p));
        if (nearest > best_score) {
            best_score = nearest;
            best = cand;
        }
    }
    return best;
}

class PredatorPreyScenario final : public Scenario {
public:
    std::string name() const override { return "predator_prey"; }

    void configure_defaults(ScenarioConfig& cfg) const override {
        cfg.num_robots = 3;
        cfg.max_steps = 100;
        cfg.step_sizes.assign(3, 0.2);
        cfg.heterogeneity.obs_mode = HetObsMode::None;
        cfg.reward_coefficients = {{"tag", 10.0}, {"violation", 0.0}};
    }

    void reset(EnvState& state, const ScenarioConfig& cfg, SplitRng& rng) const override {
        state.poses = sample_poses(cfg.num_robots, spawn_region(cfg), spawn_separation(cfg), rng);
        PredatorPreyState s;
        const Rect region = spawn_region(cfg);
        const double clearance = cfg.layout.scalar("pp.prey_spawn_clearance");
        bool placed = false;
        for (int attempt = 0; attempt < 1000 && !placed; ++attempt) {
            Vec2 p{rng.uniform(region.xmin, region.xmax), rng.uniform(region.ymin, region.ymax)};
            bool ok = true;
            for (const auto& pose : state.poses)
                if (distance(p, pose.position()) < clearance) { ok = false; break; }
            if (ok) {
                s.prey = p;
                placed = true;
            }
        }
        if (!placed) throw std::runtime_error("predator_prey: could not place prey");
        state.scenario = std::move(s);
    }

    static double prey_step(const ScenarioConfig& cfg) {
        double robot_step = 0.0;
        for (double s : cfg.step_sizes) robot_step = std::max(robot_step, s);
        return cfg.layout.scalar("pp.prey_agility") * robot_step;
    }

    double transition(EnvState& state, const ScenarioConfig& cfg, SplitRng&) const override {
        auto& s = std::get<PredatorPreyState>(state.scenario);
        std::vector<Vec2> predators;
        for (const auto& p : state.poses) predators.push_back(p.position());
        s.prey = prey_heuristic(s.prey, predators, prey_step(cfg), cfg.params.arena());

        const double tag_radius = cfg.layout.scalar("pp.tag_radius");
        bool tagged = false;
        for (const auto& p : predators) tagged = tagged || distance(p, s.prey) <= tag_radius;
        if (tagged) {
            state.metrics.scenario_metric += 1.0;  // tags
            s.flash_timer = cfg.layout.integer("pp.flash_steps");
        } else if (s.flash_timer > 0) {
            --s.flash_timer;
        }
        return tagged ? cfg.coefficient("tag") : 0.0;
    }

    // Own pose, others' positions, prey position.
    std::vector<double> observe(const EnvState& state, const ScenarioConfig&,
                                int robot) const override {
        const auto& s = std::get<PredatorPreyState>(state.scenario);
        std::vector<double> obs = base_observation(state, robot);
        obs.push_back(s.prey.x);
        obs.push_back(s.prey.y);
        return obs;
    }

    Vec2 scripted_goal(const EnvState& state, const ScenarioConfig&, int) const override {
        return std::get<PredatorPreyState>(state.scenario).prey;
    }
};

} // namespace mrsim
