#pragma once

// Arctic Transport: two drones guide two traversal robots (one water-type,
// one ice-type) across a tile field to the goal zone on the right edge.
// Traversal robots step fast on matching tiles, slow on mismatched ones.

#include "mrsim/scenario.hpp"

namespace mrsim {

class ArcticTransportScenario final : public Scenario {
public:
    static constexpr int kGround = 0;
    static constexpr int kIce = 1;
    static constexpr int kWater = 2;

    std::string name() const override { return "arctic_transport"; }

    void configure_defaults(ScenarioConfig& cfg) const override {
        cfg.num_robots = 4;
        cfg.max_steps = 100;
        cfg.step_sizes.assign(4, cfg.layout.scalar("arctic.normal_step"));
        cfg.heterogeneity.kind = HetKind::ClassId;
        cfg.heterogeneity.obs_mode = HetObsMode::Own;
        // Rows are one-hot over [drone, water, ice].
        cfg.heterogeneity.values = {{1, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
        cfg.reward_coefficients = {{"dist", -0.05}, {"step", -0.10}, {"violation", 0.0}};
    }

    void reset(EnvState& state, const ScenarioConfig& cfg, SplitRng& rng) const override {
        state.poses = sample_poses(cfg.num_robots, cfg.layout.rect("arctic.spawn_zone"),
                                   spawn_separation(cfg), rng);
        ArcticState s;
        s.cols = cfg.layout.integer("arctic.grid_cols");
        s.rows = cfg.layout.integer("arctic.grid_rows");
        s.goal_zone = cfg.layout.rect("arctic.goal_zone");
        s.tiles.assign(static_cast<std::size_t>(s.cols) * s.rows, kGround);
        const int left = cfg.layout.integer("arctic.ground_cols_left");
        const int right = cfg.layout.integer("arctic.ground_cols_right");
        for (int r = 0; r < s.rows; ++r)
            for (int c = left; c < s.cols - right; ++c)
                s.tiles[static_cast<std::size_t>(r) * s.cols + c] =
                    rng.uniform_int(2) == 0 ? kIce : kWater;
        state.scenario = std::move(s);
    }

    static int tile_at(const ArcticState& s, const SimParams& p, const Vec2& pos) {
        const Rect arena = p.arena();
        double cw = (arena.xmax - arena.xmin) / s.cols;
        double ch = (arena.ymax - arena.ymin) / s.rows;
        int c = static_cast<int>((pos.x - arena.xmin) / cw);
        int r = static_cast<int>((pos.y - arena.ymin) / ch);
        c = static_cast<int>(clamp(c, 0, s.cols - 1));
        r = static_cast<int>(clamp(r, 0, s.rows - 1));
        return s.tiles[static_cast<std::size_t>(r) * s.cols + c];
    }

    std::vector<double> step_sizes(const EnvState& state, const ScenarioConfig& cfg) const override {
        const auto& s = std::get<ArcticState>(state.scenario);
        const double normal = cfg.layout.scalar("arctic.normal_step");
        const double fast = cfg.layout.scalar("arctic.fast_step");
        const double slow = cfg.layout.scalar("arctic.slow_step");
        std::vector<double> sizes(state.poses.size(), normal);
        for (std::size_t i = 0; i < state.poses.size(); ++i) {
            const auto& row = cfg.heterogeneity.values[i];
            if (row[0] == 1.0) continue;  // drones move at uniform speed
            int tile = tile_at(s, cfg.params, state.poses[i].position());
            if (tile == kGround) continue;
            bool matches = (row[1] == 1.0 && tile == kWater) || (row[2] == 1.0 && tile == kIce);
            sizes[i] = matches ? fast : slow;
        }
        return sizes;
    }

    double transition(EnvState& state, const ScenarioConfig& cfg, SplitRng&) const override {
        const auto& s = std::get<ArcticState>(state.scenario);
        double summed_dist = 0.0;
        bool all_in = true;
        for (std::size_t i = 0; i < state.poses.size(); ++i) {
            if (cfg.heterogeneity.values[i][0] == 1.0) continue;  // drones don't count
            Vec2 p = state.poses[i].position();
            summed_dist += s.goal_zone.distance_to(p);
            all_in = all_in && s.goal_zone.contains(p);
        }
        return cfg.coefficient("dist") * summed_dist + cfg.coefficient("step") * (all_in ? 0.0 : 1.0);
    }

    void finalize(EnvState& state, const ScenarioConfig& cfg) const override {
        const auto& s = std::get<ArcticState>(state.scenario);
        bool all_in = true;
        for (std::size_t i = 0; i < state.poses.size(); ++i) {
            if (cfg.heterogeneity.values[i][0] == 1.0) continue;
            all_in = all_in && s.goal_zone.contains(state.poses[i].position());
        }
        state.metrics.success = all_in;
        state.metrics.scenario_metric = all_in ? 1.0 : 0.0;
    }

    // Own pose, others' positions, own tile type, then every drone's 3x3
    // tile patch in robot-index order (drone observations are shared with
    // the whole team). Out-of-grid patch cells read as ground.
    std::vector<double> observe(const EnvState& state, const ScenarioConfig& cfg,
                                int robot) const override {
        const auto& s = std::get<ArcticState>(state.scenario);
        std::vector<double> obs = base_observation(state, robot);
        obs.push_back(tile_at(s, cfg.params, state.poses[static_cast<std::size_t>(robot)].position()));
        const Rect arena = cfg.params.arena();
        double cw = (arena.xmax - arena.xmin) / s.cols;
        double ch = (arena.ymax - arena.ymin) / s.rows;
        for (std::size_t d = 0; d < state.poses.size(); ++d) {
            if (cfg.heterogeneity.values[d][0] != 1.0) continue;
            Vec2 p = state.poses[d].position();
            int c0 = static_cast<int>(clamp((p.x - arena.xmin) / cw, 0.0, s.cols - 1.0));
            int r0 = static_cast<int>(clamp((p.y - arena.ymin) / ch, 0.0, s.rows - 1.0));
            for (int dr = -1; dr <= 1; ++dr)
                for (int dc = -1; dc <= 1; ++dc) {
                    int r = r0 + dr, c = c0 + dc;
                    bool in = r >= 0 && r < s.rows && c >= 0 && c < s.cols;
                    obs.push_back(in ? s.tiles[static_cast<std::size_t>(r) * s.cols + c] : kGround);
                }
        }
        return obs;
    }

    Vec2 scripted_goal(const EnvState& state, const ScenarioConfig&, int) const override {
        return std::get<ArcticState>(state.scenario).goal_zone.center();
    }
};

} // namespace mrsim
