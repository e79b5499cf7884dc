#pragma once

// The Scenario interface: per-task reset rules, dynamics hooks, rewards,
// observations, and metrics behind a uniform step pipeline. Concrete tasks
// live under mrsim/scenarios/.

#include <functional>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "mrsim/framework.hpp"

namespace mrsim {

// ---- per-scenario state records ----

struct ArcticState {
    int cols = 0, rows = 0;
    std::vector<int> tiles;  // row-major; 0 ground, 1 ice, 2 water
    Rect goal_zone;
};

struct DiscoveryState {
    std::vector<Vec2> landmarks;
    std::vector<char> sensed;
    std::vector<char> tagged;
};

struct ForagingState {
    std::vector<Vec2> resources;
    std::vector<int> levels;
    std::vector<char> foraged;
};

struct MaterialTransportState {
    double circle_remaining = 0.0;
    double rect_remaining = 0.0;
    std::vector<double> loads;
    double delivered = 0.0;
    double total_initial = 0.0;
};

struct NavigationState {
    std::vector<Vec2> goals;
};

struct PredatorPreyState {
    Vec2 prey;
    int flash_timer = 0;
};

struct RwareState {
    std::vector<int> slot_shelf;  // shelf id 1..S, or 0 for an empty slot
    std::vector<int> carried;     // per robot; 0 = empty-handed
    std::vector<int> requests;    // currently requested shelf ids
};

struct WarehouseState {
    std::vector<char> loaded;
};

struct RandomWaypointState {
    std::vector<Vec2> targets;
    std::vector<double> target_headings;  // used by the pose controller
};

using ScenarioState =
    std::variant<std::monostate, ArcticState, DiscoveryState, ForagingState,
                 MaterialTransportState, NavigationState, PredatorPreyState, RwareState,
                 WarehouseState, RandomWaypointState>;

/// One environment instance. Everything a step depends on lives here, so
/// the transition is a pure function of (state, actions, config).
struct EnvState {
    std::vector<RobotPose> poses;
    ScenarioState scenario;
    int step_index = 0;
    SplitRng base_rng;  // episode stream; reset and per-step streams fork off it
    Metrics metrics;
};

// Fork tags for the episode stream.
inline constexpr std::uint64_t kResetStreamTag = 0;
inline SplitRng reset_stream(const EnvState& s) { return s.base_rng.fork(kResetStreamTag); }
inline SplitRng step_stream(const EnvState& s) {
    return s.base_rng.fork(1 + static_cast<std::uint64_t>(s.step_index));
}

/// Rejection-sample poses inside `region` with pairwise separation at least
/// `min_sep`. Draw order per attempt: x, y, theta.
inline std::vector<RobotPose> sample_poses(int n, const Rect& region, double min_sep,
                                           SplitRng& rng, int max_attempts = 1000) {
    std::vector<RobotPose> poses;
    for (int i = 0; i < n; ++i) {
        bool placed = false;
        for (int attempt = 0; attempt < max_attempts && !placed; ++attempt) {
            RobotPose p;
            p.x = rng.uniform(region.xmin, region.xmax);
            p.y = rng.uniform(region.ymin, region.ymax);
            p.theta = kPi * (1.0 - 2.0 * rng.uniform());  // (-pi, pi]
            bool ok = true;
            for (const auto& q : poses)
                if (std::hypot(p.x - q.x, p.y - q.y) < min_sep) { ok = false; break; }
            if (ok) {
                poses.push_back(p);
                placed = true;
            }
        }
        if (!placed)
            throw std::runtime_error("sample_poses: could not place robot " + std::to_string(i) +
                                     " after " + std::to_string(max_attempts) + " attempts");
    }
    return poses;
}

inline Rect shrink(const Rect& r, double margin) {
    return {r.xmin + margin, r.xmax - margin, r.ymin + margin, r.ymax - margin};
}

inline double spawn_separation(const ScenarioConfig& cfg) {
    return cfg.barrier.safety_radius + cfg.layout.scalar("spawn.separation_slack");
}

inline Rect spawn_region(const ScenarioConfig& cfg) {
    return shrink(cfg.params.arena(), cfg.layout.scalar("spawn.margin"));
}

/// Task definition. Implementations must be stateless: all mutable data
/// lives in EnvState, so one Scenario object can serve any number of
/// environments concurrently.
class Scenario {
public:
    virtual ~Scenario() = default;

    virtual std::string name() const = 0;

    /// Fill in this task's defaults: robot count, horizon, heterogeneity,
    /// reward coefficients, step sizes.
    virtual void configure_defaults(ScenarioConfig& cfg) const = 0;

    /// Initialise poses and scenario state from the reset stream.
    virtual void reset(EnvState& state, const ScenarioConfig& cfg, SplitRng& rng) const = 0;

    /// Per-robot waypoint step sizes at this instant (terrain-dependent in
    /// Arctic Transport).
    virtual std::vector<double> step_sizes(const EnvState&, const ScenarioConfig& cfg) const {
        return cfg.step_sizes;
    }

    /// Map discrete actions to waypoints. The default is the shared
    /// action_to_waypoint rule; self-driving tasks override it.
    virtual std::vector<Vec2> waypoints(const EnvState& state,
                                        const std::vector<DiscreteAction>& actions,
                                        const ScenarioConfig& cfg, SplitRng& step_rng) const {
        std::vector<double> sizes = step_sizes(state, cfg);
        std::vector<Vec2> wps(state.poses.size());
        for (std::size_t i = 0; i < state.poses.size(); ++i)
            wps[i] = action_to_waypoint(state.poses[i], actions[i], sizes[i],
                                        cfg.action_noise_scale, step_rng, cfg.params);
        return wps;
    }

    /// Goal headings used when the pose controller drives the waypoints.
    virtual std::vector<double> waypoint_headings(const EnvState& state,
                                                  const std::vector<Vec2>& wps,
                                                  const ScenarioConfig&) const {
        std::vector<double> h(wps.size(), 0.0);
        for (std::size_t i = 0; i < wps.size(); ++i) {
            Vec2 d = wps[i] - state.poses[i].position();
            h[i] = (d.norm() > 1e-12) ? std::atan2(d.y, d.x) : state.poses[i].theta;
        }
        return h;
    }

    /// Add scenario obstacles to the barrier configuration (RWARE shelves).
    virtual void add_obstacles(const EnvState&, const ScenarioConfig&, BarrierConfig&) const {}

    /// Apply the task rules after physics; returns the team reward.
    virtual double transition(EnvState& state, const ScenarioConfig& cfg,
                              SplitRng& step_rng) const = 0;

    /// Per-robot observation before heterogeneity augmentation.
    virtual std::vector<double> observe(const EnvState& state, const ScenarioConfig& cfg,
                                        int robot) const = 0;

    /// Evaluated once when the horizon is reached (success metrics).
    virtual void finalize(EnvState&, const ScenarioConfig&) const {}

    /// Target the scripted policy steers this robot toward.
    virtual Vec2 scripted_goal(const EnvState& state, const ScenarioConfig&, int robot) const {
        return state.poses[static_cast<std::size_t>(robot)].position();
    }

protected:
    /// Own pose followed by the other robots' positions in index order.
    static std::vector<double> base_observation(const EnvState& state, int robot) {
        std::vector<double> obs;
        const auto& self = state.poses[static_cast<std::size_t>(robot)];
        obs.insert(obs.end(), {self.x, self.y, self.theta});
        for (std::size_t j = 0; j < state.poses.size(); ++j) {
            if (static_cast<int>(j) == robot) continue;
            obs.push_back(state.poses[j].x);
            obs.push_back(state.poses[j].y);
        }
        return obs;
    }
};

using ScenarioPtr = std::shared_ptr<const Scenario>;

/// Name -> factory registry for every built-in task.
const std::map<std::string, std::function<ScenarioPtr()>>& scenario_registry();

inline ScenarioPtr make_scenario(const std::string& name) {
    const auto& reg = scenario_registry();
    auto it = reg.find(name);
    if (it == reg.end()) {
        std::string names;
        for (const auto& [k, v] : reg) names += (names.empty() ? "" : ", ") + k;
        throw std::invalid_argument("unknown scenario '" + name + "' (available: " + names + ")");
    }
    return it->second();
}

/// Scenario defaults merged onto framework defaults.
inline ScenarioConfig make_default_config(const std::string& name) {
    ScenarioConfig cfg;
    cfg.scenario_name = name;
    make_scenario(name)->configure_defaults(cfg);
    cfg.validate();
    return cfg;
}

} // namespace mrsim
