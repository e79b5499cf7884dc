#pragma once

// Shared scenario plumbing: heterogeneity injection, the discrete waypoint
// action space, per-step outputs, and the scenario configuration record.

#include <cstdint>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "mrsim/barrier.hpp"
#include "mrsim/controllers.hpp"
#include "mrsim/core.hpp"
#include "mrsim/layout.hpp"
#include "mrsim/rng.hpp"

namespace mrsim {

enum class HetKind { RobotId, ClassId, CapabilitySet };
enum class HetObsMode { None, Own, FullTeam };

/// Per-robot identity/class/capability annotations, optionally appended to
/// observations.
struct HeterogeneitySpec {
    HetKind kind = HetKind::ClassId;
    HetObsMode obs_mode = HetObsMode::None;
    std::vector<std::vector<double>> values;  // N rows, K columns

    int rows() const { return static_cast<int>(values.size()); }
    int cols() const { return values.empty() ? 0 : static_cast<int>(values[0].size()); }

    void validate(int num_robots) const {
        if (obs_mode == HetObsMode::None && values.empty()) return;
        if (rows() != num_robots)
            throw std::invalid_argument("HeterogeneitySpec: row count != num_robots");
        for (const auto& r : values) {
            if (static_cast<int>(r.size()) != cols())
                throw std::invalid_argument("HeterogeneitySpec: ragged value matrix");
            for (double v : r)
                if (!std::isfinite(v))
                    throw std::invalid_argument("HeterogeneitySpec: non-finite value");
        }
        if (kind == HetKind::ClassId) {
            for (const auto& r : values) {
                double sum = 0.0;
                for (double v : r) {
                    if (v != 0.0 && v != 1.0)
                        throw std::invalid_argument("HeterogeneitySpec: class rows must be one-hot");
                    sum += v;
                }
                if (sum != 1.0)
                    throw std::invalid_argument("HeterogeneitySpec: class rows must be one-hot");
            }
        }
    }
};

/// Append the configured heterogeneity representation to an observation.
inline std::vector<double> het_augment(std::vector<double> obs, const HeterogeneitySpec& spec,
                                       int robot_index) {
    switch (spec.obs_mode) {
        case HetObsMode::None:
            break;
        case HetObsMode::Own: {
            const auto& row = spec.values.at(static_cast<std::size_t>(robot_index));
            obs.insert(obs.end(), row.begin(), row.end());
            break;
        }
        case HetObsMode::FullTeam:
            for (const auto& row : spec.values) obs.insert(obs.end(), row.begin(), row.end());
            break;
    }
    return obs;
}

/// Discrete waypoint actions: stay or step one unit along an axis.
enum class DiscreteAction : int { Stay = 0, North = 1, South = 2, West = 3, East = 4 };

inline constexpr int kNumActions = 5;

inline Vec2 action_direction(DiscreteAction a) {
    switch (a) {
        case DiscreteAction::Stay: return {0.0, 0.0};
        case DiscreteAction::North: return {0.0, 1.0};
        case DiscreteAction::South: return {0.0, -1.0};
        case DiscreteAction::West: return {-1.0, 0.0};
        case DiscreteAction::East: return {1.0, 0.0};
    }
    throw std::invalid_argument("action_direction: invalid action");
}

/// Waypoint for a discrete action: one step along the chosen axis plus
/// optional uniform noise, clamped into the arena.
inline Vec2 action_to_waypoint(const RobotPose& pose, DiscreteAction action, double step_size,
                               double noise_scale, SplitRng& rng, const SimParams& params) {
    Vec2 wp = pose.position() + action_direction(action) * step_size;
    if (noise_scale > 0.0) {
        double half = noise_scale * step_size;
        wp.x += rng.uniform(-half, half);
        wp.y += rng.uniform(-half, half);
    }
    const Rect arena = params.arena();
    wp.x = clamp(wp.x, arena.xmin, arena.xmax);
    wp.y = clamp(wp.y, arena.ymin, arena.ymax);
    return wp;
}

/// Cumulative per-episode counters, snapshotted into every StepOutput.
struct Metrics {
    long long collisions = 0;       // env steps with any pair closer than collision_radius
    double scenario_metric = 0.0;   // headline per-scenario metric (see docs)
    bool success = false;           // set by scenarios with a success notion
    double min_pairwise_distance = std::numeric_limits<double>::infinity();
    long long qp_infeasible = 0;    // physics ticks where the safety QP was infeasible
};

struct StepOutput {
    std::vector<std::vector<double>> obs;  // N x obs_dim
    double team_reward = 0.0;              // shared by every robot
    bool done = false;
    Metrics metrics;
};

enum class ControllerKind { UnicyclePosition, UnicyclePose };

/// Everything a scenario needs to reset and step.
struct ScenarioConfig {
    std::string scenario_name;
    int num_robots = 0;
    int max_steps = 0;
    int sub_steps = 10;  // physics ticks per environment step
    ControllerKind controller = ControllerKind::UnicyclePosition;
    bool barrier_enabled = true;
    double action_noise_scale = 0.0;
    std::vector<double> step_sizes;  // per-robot waypoint step, meters
    HeterogeneitySpec heterogeneity;
    std::map<std::string, double> reward_coefficients;
    SimParams params;
    ControllerGains gains;
    BarrierConfig barrier;
    Layout layout;

    double coefficient(const std::string& name) const {
        auto it = reward_coefficients.find(name);
        if (it == reward_coefficients.end())
            throw std::invalid_argument("ScenarioConfig: missing reward coefficient '" + name +
                                        "' for scenario " + scenario_name);
        return it->second;
    }

    void validate() const {
        if (num_robots < 1) throw std::invalid_argument("ScenarioConfig: num_robots must be >= 1");
        if (max_steps <= 0) throw std::invalid_argument("ScenarioConfig: max_steps must be > 0");
        if (sub_steps <= 0) throw std::invalid_argument("ScenarioConfig: sub_steps must be > 0");
        if (static_cast<int>(step_sizes.size()) != num_robots)
            throw std::invalid_argument("ScenarioConfig: step_sizes length != num_robots");
        if (action_noise_scale < 0)
            throw std::invalid_argument("ScenarioConfig: action_noise_scale must be >= 0");
        params.validate();
        gains.validate();
        barrier.validate(params);
        heterogeneity.validate(num_robots);
    }
};

} // namespace mrsim
