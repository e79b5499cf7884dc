#pragma once

// Deterministic data-parallel stepping of B independent environments.
// Every environment's trajectory is a pure function of (config, its seed,
// its action sequence); the worker pool only partitions the batch, so
// results are bit-identical for any worker count, including 1.

#include <atomic>
#include <condition_variable>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

#include "mrsim/scenario.hpp"
#include "mrsim/scenarios/all.hpp"

namespace mrsim {

/// Persistent thread pool with static index partitioning. Workers spin
/// briefly before sleeping so back-to-back small batches are not dominated
/// by futex round trips.
class WorkerPool {
public:
    explicit WorkerPool(int workers = 0) {
        if (workers <= 0) workers = static_cast<int>(std::thread::hardware_concurrency());
        if (workers < 1) workers = 1;
        workers_ = workers;
        for (int w = 1; w < workers_; ++w)
            threads_.emplace_back([this, w] { worker_loop(w); });
    }

    WorkerPool(const WorkerPool&) = delete;
    WorkerPool& operator=(const WorkerPool&) = delete;

    ~WorkerPool() {
        stop_.store(true, std::memory_order_release);
        {
            std::lock_guard<std::mutex> lk(mu_);
            generation_.fetch_add(1, std::memory_order_release);
        }
        cv_.notify_all();
        for (auto& t : threads_) t.join();
    }

    int size() const { return workers_; }

    /// Invoke fn(i) for i in [0, count); blocks until all calls return.
    void run(int count, const std::function<void(int)>& fn) {
        if (count <= 0) return;
        if (workers_ == 1 || count == 1) {
            for (int i = 0; i < count; ++i) fn(i);
            return;
        }
        fn_ = &fn;
        count_ = count;
        next_.store(0, std::memory_order_relaxed);
        pending_.store(workers_ - 1, std::memory_order_relaxed);
        {
            std::lock_guard<std::mutex> lk(mu_);
            generation_.fetch_add(1, std::memory_order_release);
        }
        cv_.notify_all();
        drain();  // main thread participates
        // Pure pause-spin first (syscalls can be expensive under
        // virtualisation); fall back to yielding only when oversubscribed.
        long spins = 0;
        while (pending_.load(std::memory_order_acquire) != 0) {
            if (++spins > 2000000) {
                std::this_thread::yield();
                spins = 0;
            } else {
                cpu_pause();
            }
        }
        fn_ = nullptr;
    }

private:
    static void cpu_pause() {
#if defined(__x86_64__) || defined(__i386__)
        __builtin_ia32_pause();
#endif
    }

    // Dynamic task pulling: balances uneven per-env costs; every index is
    // claimed exactly once, and slot-addressed writes keep results
    // independent of which worker claims what.
    void drain() {
        while (true) {
            int i = next_.fetch_add(1, std::memory_order_relaxed);
            if (i >= count_) return;
            (*fn_)(i);
        }
    }

    void worker_loop(int) {
        std::uint64_t seen = 0;
        while (true) {
            // Spin without syscalls for a while, then park.
            long spins = 0;
            while (generation_.load(std::memory_order_acquire) == seen &&
                   !stop_.load(std::memory_order_acquire)) {
                if (++spins > 4000000) {
                    std::unique_lock<std::mutex> lk(mu_);
                    cv_.wait(lk, [&] {
                        return stop_.load(std::memory_order_acquire) ||
                               generation_.load(std::memory_order_acquire) != seen;
                    });
                    break;
                }
                cpu_pause();
            }
            if (stop_.load(std::memory_order_acquire)) return;
            seen = generation_.load(std::memory_order_acquire);
            drain();
            pending_.fetch_sub(1, std::memory_order_release);
        }
    }

    int workers_ = 1;
    std::vector<std::thread> threads_;
    std::mutex mu_;
    std::condition_variable cv_;
    const std::function<void(int)>* fn_ = nullptr;
    int count_ = 0;
    std::atomic<int> next_{0};
    std::atomic<int> pending_{0};
    std::atomic<std::uint64_t> generation_{0};
    std::atomic<bool> stop_{false};
};

struct BatchWorldState {
    std::vector<EnvState> envs;

    int size() const { return static_cast<int>(envs.size()); }
};

struct ResetOutput {
    std::vector<std::vector<std::vector<double>>> obs;  // B x N x obs_dim
};

inline std::vector<std::vector<double>> assemble_observations(const EnvState& state,
                                                              const ScenarioConfig& cfg,
                                                              const Scenario& scenario) {
    std::vector<std::vector<double>> obs(state.poses.size());
    for (std::size_t i = 0; i < state.poses.size(); ++i)
        obs[i] = het_augment(scenario.observe(state, cfg, static_cast<int>(i)), cfg.heterogeneity,
                             static_cast<int>(i));
    return obs;
}

inline EnvState reset_env(std::uint64_t seed, const ScenarioConfig& cfg, const Scenario& scenario) {
    EnvState state;
    state.base_rng = SplitRng::from_seed(seed);
    SplitRng rng = reset_stream(state);
    scenario.reset(state, cfg, rng);
    state.step_index = 0;
    return state;
}

/// Step one environment: actions -> waypoints -> controller -> barrier ->
/// sub_steps Euler ticks -> scenario transition. Mutates `state` in place;
/// callers that need the pure signature copy first.
inline StepOutput step_env(EnvState& state, const std::vector<DiscreteAction>& actions,
                           const ScenarioConfig& cfg, const Scenario& scenario) {
    SplitRng rng = step_stream(state);
    const std::vector<Vec2> wps = scenario.waypoints(state, actions, cfg, rng);
    std::vector<double> headings;
    if (cfg.controller == ControllerKind::UnicyclePose)
        headings = scenario.waypoint_headings(state, wps, cfg);

    BarrierConfig barrier = cfg.barrier;
    barrier.enabled = cfg.barrier_enabled;
    scenario.add_obstacles(state, cfg, barrier);

    const Rect arena = cfg.params.arena();
    const std::size_t n = state.poses.size();
    std::vector<UnicycleVelocity> nominal(n);
    bool collision = false;
    for (int tick = 0; tick < cfg.sub_steps; ++tick) {
        for (std::size_t i = 0; i < n; ++i) {
            if (cfg.controller == ControllerKind::UnicyclePosition) {
                // A waypoint equal to the robot center means "hold": the
                // projected-point law would otherwise creep backward by the
                // projection offset.
                if (wps[i].x == state.poses[i].x && wps[i].y == state.poses[i].y)
                    nominal[i] = {0.0, 0.0};
                else
                    nominal[i] = position_waypoint_controller(state.poses[i], wps[i], cfg.gains,
                                                              cfg.params);
            } else {
                RobotPose goal{wps[i].x, wps[i].y, headings[i]};
                nominal[i] = unicycle_pose_controller(state.poses[i], goal, cfg.gains, cfg.params);
            }
        }
        BarrierResult safe = apply_barrier(state.poses, nominal, barrier, cfg.gains, cfg.params);
        if (safe.infeasible) state.metrics.qp_infeasible += 1;
        for (std::size_t i = 0; i < n; ++i) {
            state.poses[i] = step_unicycle(state.poses[i], safe.commands[i], cfg.params.dt);
            state.poses[i].x = clamp(state.poses[i].x, arena.xmin, arena.xmax);
            state.poses[i].y = clamp(state.poses[i].y, arena.ymin, arena.ymax);
        }
        if (n > 1) {
            double mind = min_pairwise_distance(state.poses);
            state.metrics.min_pairwise_distance =
                std::min(state.metrics.min_pairwise_distance, mind);
            collision = collision || mind < cfg.params.collision_radius;
        }
    }

    StepOutput out;
    out.team_reward = scenario.transition(state, cfg, rng);
    if (collision) {
        state.metrics.collisions += 1;
        out.team_reward += cfg.coefficient("violation");
    }
    state.step_index += 1;
    out.done = state.step_index >= cfg.max_steps;
    if (out.done) scenario.finalize(state, cfg);
    out.obs = assemble_observations(state, cfg, scenario);
    out.metrics = state.metrics;
    return out;
}

inline void validate_actions(const std::vector<int>& actions, int batch, int num_robots) {
    if (static_cast<int>(actions.size()) != batch * num_robots)
        throw std::invalid_argument("step_batch: action count != B * N");
    for (int e = 0; e < batch; ++e)
        for (int r = 0; r < num_robots; ++r) {
            int a = actions[static_cast<std::size_t>(e) * num_robots + r];
            if (a < 0 || a >= kNumActions)
                throw std::invalid_argument("step_batch: invalid action " + std::to_string(a) +
                                            " for environment " + std::to_string(e) + ", robot " +
                                            std::to_string(r));
        }
}

/// Reset B environments, one per seed.
inline std::pair<BatchWorldState, ResetOutput> reset_batch(const ScenarioConfig& cfg,
                                                           const std::vector<std::uint64_t>& seeds,
                                                           const Scenario& scenario,
                                                           WorkerPool* pool = nullptr) {
    if (seeds.empty()) throw std::invalid_argument("reset_batch: seed list is empty");
    cfg.validate();
    BatchWorldState state;
    state.envs.resize(seeds.size());
    ResetOutput out;
    out.obs.resize(seeds.size());
    auto work = [&](int e) {
        state.envs[static_cast<std::size_t>(e)] =
            reset_env(seeds[static_cast<std::size_t>(e)], cfg, scenario);
        out.obs[static_cast<std::size_t>(e)] =
            assemble_observations(state.envs[static_cast<std::size_t>(e)], cfg, scenario);
    };
    if (pool) pool->run(state.size(), work);
    else for (int e = 0; e < state.size(); ++e) work(e);
    return {std::move(state), std::move(out)};
}

inline std::pair<BatchWorldState, ResetOutput> reset_batch(const ScenarioConfig& cfg,
                                                           const std::vector<std::uint64_t>& seeds,
                                                           WorkerPool* pool = nullptr) {
    return reset_batch(cfg, seeds, *make_scenario(cfg.scenario_name), pool);
}

/// Step all B environments as a batch. Pure: the input batch is untouched.
inline std::pair<BatchWorldState, std::vector<StepOutput>> step_batch(
    const BatchWorldState& state, const std::vector<int>& actions, const ScenarioConfig& cfg,
    const Scenario& scenario, WorkerPool* pool = nullptr) {
    validate_actions(actions, state.size(), cfg.num_robots);
    BatchWorldState next;
    next.envs.resize(state.envs.size());
    std::vector<StepOutput> outputs(state.envs.size());
    // Workers step a private copy and publish once, so neighbouring envs in
    // the shared arrays are not written while another worker computes.
    auto work = [&](int e) {
        std::vector<DiscreteAction> acts(static_cast<std::size_t>(cfg.num_robots));
        for (int r = 0; r < cfg.num_robots; ++r)
            acts[static_cast<std::size_t>(r)] = static_cast<DiscreteAction>(
                actions[static_cast<std::size_t>(e) * cfg.num_robots + r]);
        EnvState local = state.envs[static_cast<std::size_t>(e)];
        StepOutput out = step_env(local, acts, cfg, scenario);
        next.envs[static_cast<std::size_t>(e)] = std::move(local);
        outputs[static_cast<std::size_t>(e)] = std::move(out);
    };
    if (pool) pool->run(state.size(), work);
    else for (int e = 0; e < state.size(); ++e) work(e);
    return {std::move(next), std::move(outputs)};
}

inline std::pair<BatchWorldState, std::vector<StepOutput>> step_batch(
    const BatchWorldState& state, const std::vector<int>& actions, const ScenarioConfig& cfg,
    WorkerPool* pool = nullptr) {
    return step_batch(state, actions, cfg, *make_scenario(cfg.scenario_name), pool);
}

} // namespace mrsim
