#pragma once

// Continuous RWARE: shelves start in staging slots; robots ferry requested
// shelves to the dropoff zone, after which the request is resampled to a
// non-requested shelf and the (now stale) shelf must be returned to an
// empty slot. Robots carrying a shelf treat every staged shelf as a static
// obstacle; empty-handed robots drive underneath them freely.

#include "mrsim/scenario.hpp"

namespace mrsim {

class RwareScenario final : public Scenario {
public:
    std::string name() const override { return "rware"; }

    void configure_defaults(ScenarioConfig& cfg) const override {
        cfg.num_robots = 3;
        cfg.max_steps = 100;
        cfg.step_sizes.assign(3, 0.2);
        cfg.heterogeneity.obs_mode = HetObsMode::None;
        cfg.reward_coefficients = {{"dropoff", 1.0}, {"violation", 0.0}};
    }

    void reset(EnvState& state, const ScenarioConfig& cfg, SplitRng& rng) const override {
        state.poses = sample_poses(cfg.num_robots, spawn_region(cfg), spawn_separation(cfg), rng);
        RwareState s;
        const int shelves = cfg.layout.integer("rware.num_shelves");
        const auto slots = cfg.layout.points("rware.slots");
        if (static_cast<int>(slots.size()) < shelves)
            throw std::invalid_argument("rware: fewer slots than shelves in layout");
        s.slot_shelf.assign(slots.size(), 0);
        for (int i = 0; i < shelves; ++i) s.slot_shelf[i] = i + 1;
        s.carried.assign(cfg.num_robots, 0);
        const int request_size = cfg.layout.integer("rware.request_size");
        std::vector<int> pool;
        for (int i = 1; i <= shelves; ++i) pool.push_back(i);
        for (int k = 0; k < request_size && !pool.empty(); ++k) {
            std::size_t idx = rng.uniform_int(pool.size());
            s.requests.push_back(pool[idx]);
            pool.erase(pool.begin() + static_cast<long>(idx));
        }
        state.scenario = std::move(s);
    }

    static int slot_at(const std::vector<Vec2>& slots, double half, const Vec2& p) {
        for (std::size_t i = 0; i < slots.size(); ++i) {
            if (std::fabs(p.x - slots[i].x) <= half && std::fabs(p.y - slots[i].y) <= half)
                return static_cast<int>(i);
        }
        return -1;
    }

    void add_obstacles(const EnvState& state, const ScenarioConfig& cfg,
                       BarrierConfig& barrier) const override {
        const auto& s = std::get<RwareState>(state.scenario);
        std::uint64_t carriers = 0;
        for (std::size_t i = 0; i < s.carried.size(); ++i)
            if (s.carried[i] != 0) carriers |= (1ULL << i);
        if (carriers == 0) return;
        const auto slots = cfg.layout.points("rware.slots");
        const double radius = cfg.layout.scalar("rware.shelf_radius");
        for (std::size_t i = 0; i < s.slot_shelf.size(); ++i) {
            if (s.slot_shelf[i] == 0) continue;
            barrier.static_obstacles.push_back({slots[i], radius});
            barrier.obstacle_masks.push_back(carriers);
        }
    }

    double transition(EnvState& state, const ScenarioConfig& cfg, SplitRng& rng) const override {
        auto& s = std::get<RwareState>(state.scenario);
        const auto slots = cfg.layout.points("rware.slots");
        const double half = cfg.layout.scalar("rware.slot_half");
        const Rect dropoff = cfg.layout.rect("rware.dropoff_zone");
        const int shelves = cfg.layout.integer("rware.num_shelves");
        double reward = 0.0;
        for (std::size_t i = 0; i < state.poses.size(); ++i) {
            Vec2 p = state.poses[i].position();
            if (s.carried[i] != 0 && dropoff.contains(p)) {
                auto it = std::find(s.requests.begin(), s.requests.end(), s.carried[i]);
                if (it != s.requests.end()) {
                    reward += cfg.coefficient("dropoff");
                    state.metrics.scenario_metric += 1.0;  // shelf dropoffs
                    // Replace the fulfilled entry with a uniformly random
                    // currently-non-requested shelf; the robot keeps carrying
                    // the stale shelf until it is returned to a slot.
                    std::vector<int> candidates;
                    for (int id = 1; id <= shelves; ++id)
                        if (std::find(s.requests.begin(), s.requests.end(), id) == s.requests.end())
                            candidates.push_back(id);
                    if (!candidates.empty())
                        *it = candidates[rng.uniform_int(candidates.size())];
                }
                continue;
            }
            int slot = slot_at(slots, half, p);
            if (slot < 0) continue;
            if (s.carried[i] == 0 && s.slot_shelf[slot] != 0) {
                s.carried[i] = s.slot_shelf[slot];
                s.slot_shelf[slot] = 0;
            } else if (s.carried[i] != 0 && s.slot_shelf[slot] == 0) {
                s.slot_shelf[slot] = s.carried[i];
                s.carried[i] = 0;
            }
        }
        return reward;
    }

    // Own pose, others' positions, per slot (x, y, occupying shelf id or 0),
    // the request set, then the own carried shelf id.
    std::vector<double> observe(const EnvState& state, const ScenarioConfig& cfg,
                                int robot) const override {
        const auto& s = std::get<RwareState>(state.scenario);
        const auto slots = cfg.layout.points("rware.slots");
        std::vector<double> obs = base_observation(state, robot);
        for (std::size_t i = 0; i < s.slot_shelf.size(); ++i) {
            obs.push_back(slots[i].x);
            obs.push_back(slots[i].y);
            obs.push_back(s.slot_shelf[i]);
        }
        for (int id : s.requests) obs.push_back(id);
        obs.push_back(s.carried[static_cast<std::size_t>(robot)]);
        return obs;
    }

    Vec2 scripted_goal(const EnvState& state, const ScenarioConfig& cfg, int robot) const override {
        const auto& s = std::get<RwareState>(state.scenario);
        const auto slots = cfg.layout.points("rware.slots");
        const std::size_t r = static_cast<std::size_t>(robot);
        Vec2 self = state.poses[r].position();
        if (s.carried[r] != 0) {
            bool requested =
                std::find(s.requests.begin(), s.requests.end(), s.carried[r]) != s.requests.end();
            if (requested) return cfg.layout.rect("rware.dropoff_zone").center();
            Vec2 best = self;
            double best_d = std::numeric_limits<double>::infinity();
            for (std::size_t i = 0; i < s.slot_shelf.size(); ++i) {
                if (s.slot_shelf[i] != 0) continue;
                double d = distance(self, slots[i]);
                if (d < best_d) {
                    best_d = d;
                    best = slots[i];
                }
            }
            return best;
        }
        Vec2 best = self;
        double best_d = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < s.slot_shelf.size(); ++i) {
            if (s.slot_shelf[i] == 0) continue;
            if (std::find(s.requests.begin(), s.requests.end(), s.slot_shelf[i]) == s.requests.end())
                continue;
            double d = distance(self, slots[i]);
            if (d < best_d) {
                best_d = d;
                best = slots[i];
            }
        }
        return best;
    }
};

} // namespace mrsim
