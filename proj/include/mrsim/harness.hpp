#pragma once

// Shared implementation behind the CLI subcommands: episode runner with
// trajectory recording, throughput benchmark, frame renderer, and replay
// verifier. The CLI and the acceptance suite both drive these functions.

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "mrsim/batch.hpp"
#include "mrsim/policy.hpp"
#include "mrsim/render.hpp"
#include "mrsim/trajectory.hpp"

namespace mrsim {

inline constexpr const char* kOutputDirEnvVar = "MRSIM_OUT_DIR";
inline constexpr std::uint64_t kEpisodeTag = 0xE915E915E915E915ULL;
inline constexpr std::uint64_t kPolicyTag = 0x9D0C7E5F00000001ULL;

inline std::uint64_t derive_episode_seed(std::uint64_t root, int episode) {
    return SplitRng::from_seed(root).fork(kEpisodeTag).fork(static_cast<std::uint64_t>(episode)).key;
}

inline SplitRng policy_stream(std::uint64_t episode_seed, int step, int robot) {
    return SplitRng::from_seed(episode_seed)
        .fork(kPolicyTag)
        .fork(static_cast<std::uint64_t>(step))
        .fork(static_cast<std::uint64_t>(robot));
}

/// Everything cmd_run needs; unset overrides keep the scenario defaults.
struct RunConfig {
    std::string scenario = "navigation";
    std::uint64_t seed = 0;
    int batch = 1;
    int episodes = 1;
    std::string policy = "random";
    std::string out;          // trajectory path; default derived from env var
    std::string layout_file;  // optional layout override file
    int workers = 0;          // 0 = hardware concurrency
    bool render = false;
    std::string render_dir;
    int fps = 30;
    // ScenarioConfig overrides.
    int max_steps = -1;
    int num_robots = -1;
    int sub_steps = -1;
    double noise_scale = -1.0;
    int barriers = -1;  // -1 default, 0 off, 1 on
    std::string controller;
    // Layout entries overriding the built-in defaults (merged after any
    // layout file); trajectory replays are rebuilt from these.
    std::map<std::string, std::vector<double>> layout_overrides;

    void validate() const {
        if (batch < 1) throw std::invalid_argument("run: batch must be >= 1");
        if (episodes < 1) throw std::invalid_argument("run: episodes must be >= 1");
        PolicySpec::parse(policy);
        if (!controller.empty() && controller != "unicycle_position" &&
            controller != "unicycle_pose")
            throw std::invalid_argument("run: controller must be unicycle_position or unicycle_pose");
    }
};

/// Apply RunConfig overrides on top of the scenario defaults.
inline ScenarioConfig resolve_scenario_config(const RunConfig& run) {
    run.validate();
    ScenarioConfig cfg = make_default_config(run.scenario);
    if (!run.layout_file.empty()) {
        std::ifstream f(run.layout_file);
        if (!f) throw std::runtime_error("cannot open layout file '" + run.layout_file + "'");
        std::stringstream ss;
        ss << f.rdbuf();
        cfg.layout = Layout::from_text(ss.str());
    }
    for (const auto& [key, vals] : run.layout_overrides) cfg.layout.set(key, vals);
    if (run.num_robots > 0 && run.num_robots != cfg.num_robots) {
        if (!cfg.heterogeneity.values.empty())
            throw std::invalid_argument("scenario '" + run.scenario +
                                        "' has a fixed robot roster; num_robots cannot change");
        cfg.num_robots = run.num_robots;
        cfg.step_sizes.assign(static_cast<std::size_t>(run.num_robots),
                              cfg.step_sizes.empty() ? 0.2 : cfg.step_sizes[0]);
    }
    if (run.max_steps > 0) cfg.max_steps = run.max_steps;
    if (run.sub_steps > 0) cfg.sub_steps = run.sub_steps;
    if (run.noise_scale >= 0) cfg.action_noise_scale = run.noise_scale;
    if (run.barriers >= 0) cfg.barrier_enabled = run.barriers != 0;
    if (!run.controller.empty())
        cfg.controller = run.controller == "unicycle_pose" ? ControllerKind::UnicyclePose
                                                           : ControllerKind::UnicyclePosition;
    cfg.validate();

    PolicySpec spec = PolicySpec::parse(run.policy);
    if (spec.kind == PolicyKind::PreyChaser && run.scenario != "predator_prey")
        throw std::invalid_argument("prey_chaser policy only applies to predator_prey");
    return cfg;
}

/// Header carrying everything a replay needs; layout overrides are embedded
/// so the file is self-contained.
inline TrajectoryHeader build_header(const RunConfig& run, const ScenarioConfig& cfg) {
    TrajectoryHeader h;
    h.set("scenario", cfg.scenario_name);
    h.set("seed", std::to_string(run.seed));
    h.set("episodes", std::to_string(run.episodes));
    h.set("batch", std::to_string(run.batch));
    h.set("num_robots", std::to_string(cfg.num_robots));
    h.set("max_steps", std::to_string(cfg.max_steps));
    h.set("sub_steps", std::to_string(cfg.sub_steps));
    h.set("dt", format_double(cfg.params.dt));
    h.set("controller", cfg.controller == ControllerKind::UnicyclePose ? "unicycle_pose"
                                                                       : "unicycle_position");
    h.set("barriers", cfg.barrier_enabled ? "1" : "0");
    h.set("noise_scale", format_double(cfg.action_noise_scale));
    h.set("policy", PolicySpec::parse(run.policy).to_string());
    const auto& defaults = Layout::defaults();
    for (const auto& [key, vals] : cfg.layout.table()) {
        auto it = defaults.find(key);
        if (it != defaults.end() && it->second == vals) continue;
        std::string text;
        for (double v : vals) text += (text.empty() ? "" : " ") + format_double(v);
        h.set("layout." + key, text);
    }
    return h;
}

inline RunConfig run_config_from_header(const TrajectoryHeader& h) {
    RunConfig run;
    run.scenario = h.get("scenario");
    run.seed = std::stoull(h.get("seed"));
    run.episodes = std::stoi(h.get("episodes"));
    run.batch = std::stoi(h.get("batch"));
    run.num_robots = std::stoi(h.get("num_robots"));
    run.max_steps = std::stoi(h.get("max_steps"));
    run.sub_steps = std::stoi(h.get("sub_steps"));
    run.controller = h.get("controller");
    run.barriers = h.get("barriers") == "1" ? 1 : 0;
    run.noise_scale = std::stod(h.get("noise_scale"));
    run.policy = h.get("policy");
    for (const auto& [key, value] : h.fields) {
        if (key.rfind("layout.", 0) != 0) continue;
        std::istringstream vs(value);
        std::vector<double> vals;
        double v;
        while (vs >> v) vals.push_back(v);
        run.layout_overrides[key.substr(7)] = std::move(vals);
    }
    return run;
}

struct EpisodeStats {
    double total_reward = 0.0;
    double final_metric = 0.0;
    long long collisions = 0;
    bool success = false;
    double min_pairwise_distance = std::numeric_limits<double>::infinity();
    long long qp_infeasible = 0;
};

struct RunSummary {
    std::string scenario;
    std::string metric_name = "metric";
    std::vector<EpisodeStats> episodes;
    std::string trajectory_path;
    std::vector<TrajectoryRow> rows;

    struct Stat {
        double mean = 0.0, stderr_ = 0.0;
    };
    template <typename F>
    Stat stat(F field) const {
        Stat s;
        if (episodes.empty()) return s;
        double n = static_cast<double>(episodes.size());
        for (const auto& e : episodes) s.mean += field(e);
        s.mean /= n;
        if (episodes.size() > 1) {
            double var = 0.0;
            for (const auto& e : episodes) {
                double d = field(e) - s.mean;
                var += d * d;
            }
            var /= (n - 1.0);
            s.stderr_ = std::sqrt(var / n);
        }
        return s;
    }
};

inline std::string scenario_metric_name(const std::string& scenario) {
    if (scenario == "arctic_transport" || scenario == "navigation") return "success_rate";
    if (scenario == "discovery") return "landmarks_tagged";
    if (scenario == "foraging") return "resources_foraged";
    if (scenario == "material_transport") return "material_left";
    if (scenario == "predator_prey") return "tags";
    if (scenario == "rware") return "shelf_dropoffs";
    if (scenario == "warehouse") return "deliveries";
    return "metric";
}

inline std::string default_trajectory_path(const RunConfig& run) {
    std::string dir = ".";
    if (const char* env = std::getenv(kOutputDirEnvVar); env && *env) dir = env;
    return dir + "/" + run.scenario + "-seed" + std::to_string(run.seed) + ".traj.csv";
}

/// Run `episodes` episodes in waves of `batch` environments, recording one
/// row per (episode, step, robot). Row content depends only on (config,
/// root seed, episode index), never on batch size or worker count.
inline RunSummary run_episodes(const RunConfig& run, bool write_file = true) {
    ScenarioConfig cfg = resolve_scenario_config(run);
    ScenarioPtr scenario = make_scenario(run.scenario);
    PolicySpec pspec = PolicySpec::parse(run.policy);
    Policy policy(pspec);
    WorkerPool pool(run.workers);

    RunSummary summary;
    summary.scenario = run.scenario;
    summary.metric_name = scenario_metric_name(run.scenario);

    for (int wave_start = 0; wave_start < run.episodes; wave_start += run.batch) {
        const int wave = std::min(run.batch, run.episodes - wave_start);
        std::vector<std::uint64_t> seeds;
        for (int e = 0; e < wave; ++e)
            seeds.push_back(derive_episode_seed(run.seed, wave_start + e));
        auto [state, reset_out] = reset_batch(cfg, seeds, *scenario, &pool);
        std::vector<std::vector<std::vector<double>>> current_obs = std::move(reset_out.obs);

        std::vector<std::vector<TrajectoryRow>> episode_rows(static_cast<std::size_t>(wave));
        std::vector<EpisodeStats> stats(static_cast<std::size_t>(wave));
        std::vector<double> totals(static_cast<std::size_t>(wave), 0.0);

        for (int step = 0; step < cfg.max_steps; ++step) {
            std::vector<int> actions(static_cast<std::size_t>(wave) * cfg.num_robots, 0);
            for (int e = 0; e < wave; ++e) {
                PolicyContext ctx;
                ctx.state = &state.envs[static_cast<std::size_t>(e)];
                ctx.cfg = &cfg;
                ctx.scenario = scenario.get();
                for (int r = 0; r < cfg.num_robots; ++r) {
                    ctx.robot = r;
                    SplitRng prng = policy_stream(seeds[static_cast<std::size_t>(e)], step, r);
                    actions[static_cast<std::size_t>(e) * cfg.num_robots + r] =
                        static_cast<int>(policy.act(
                            current_obs[static_cast<std::size_t>(e)][static_cast<std::size_t>(r)],
                            prng, ctx));
                }
            }
            auto [next, outputs] = step_batch(state, actions, cfg, *scenario, &pool);
            state = std::move(next);
            for (int e = 0; e < wave; ++e) {
                const StepOutput& out = outputs[static_cast<std::size_t>(e)];
                current_obs[static_cast<std::size_t>(e)] = out.obs;
                totals[static_cast<std::size_t>(e)] += out.team_reward;
                const EnvState& env = state.envs[static_cast<std::size_t>(e)];
                for (int r = 0; r < cfg.num_robots; ++r) {
                    TrajectoryRow row;
                    row.env = wave_start + e;
                    row.step = step;
                    row.robot = r;
                    row.x = env.poses[static_cast<std::size_t>(r)].x;
                    row.y = env.poses[static_cast<std::size_t>(r)].y;
                    row.theta = env.poses[static_cast<std::size_t>(r)].theta;
                    row.action = actions[static_cast<std::size_t>(e) * cfg.num_robots + r];
                    row.reward = out.team_reward;
                    row.done = out.done;
                    row.collisions = out.metrics.collisions;
                    row.metric = out.metrics.scenario_metric;
                    episode_rows[static_cast<std::size_t>(e)].push_back(row);
                }
                if (out.done) {
                    EpisodeStats& st = stats[static_cast<std::size_t>(e)];
                    st.total_reward = totals[static_cast<std::size_t>(e)];
                    st.final_metric = out.metrics.scenario_metric;
                    st.collisions = out.metrics.collisions;
                    st.success = out.metrics.success;
                    st.min_pairwise_distance = out.metrics.min_pairwise_distance;
                    st.qp_infeasible = out.metrics.qp_infeasible;
                }
            }
        }
        for (int e = 0; e < wave; ++e) {
            summary.episodes.push_back(stats[static_cast<std::size_t>(e)]);
            auto& rows = episode_rows[static_cast<std::size_t>(e)];
            summary.rows.insert(summary.rows.end(), rows.begin(), rows.end());
        }
    }

    if (write_file) {
        summary.trajectory_path = run.out.empty() ? default_trajectory_path(run) : run.out;
        write_trajectory(summary.trajectory_path, build_header(run, cfg), summary.rows);
    }
    return summary;
}

inline void print_summary(const RunSummary& summary, std::ostream& os) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "scenario: %s  episodes: %zu\n", summary.scenario.c_str(),
                  summary.episodes.size());
    os << buf;
    auto line = [&](const char* name, RunSummary::Stat s) {
        std::snprintf(buf, sizeof buf, "  %-18s %10.3f +- %.3f\n", name, s.mean, s.stderr_);
        os << buf;
    };
    line("reward", summary.stat([](const EpisodeStats& e) { return e.total_reward; }));
    line(summary.metric_name.c_str(),
         summary.stat([](const EpisodeStats& e) { return e.final_metric; }));
    line("collisions",
         summary.stat([](const EpisodeStats& e) { return static_cast<double>(e.collisions); }));
    line("success_rate",
         summary.stat([](const EpisodeStats& e) { return e.success ? 1.0 : 0.0; }));
    if (!summary.trajectory_path.empty()) os << "  trajectory: " << summary.trajectory_path << "\n";
}

// ---- benchmark ----

struct BenchRow {
    int batch_size = 0;
    double mean_ms = 0.0;
    double stddev_ms = 0.0;
};

/// Wall time to simulate `total_steps` aggregate environment steps at each
/// batch size (setup excluded), repeated `trials` times.
inline std::vector<BenchRow> bench_scenario(const std::string& scenario_name,
                                            long long total_steps,
                                            const std::vector<int>& batch_sizes, int trials,
                                            int workers = 0, std::uint64_t seed = 0) {
    std::vector<BenchRow> table;
    if (total_steps == 0) return table;
    for (int b : batch_sizes) {
        if (b < 1) throw std::invalid_argument("bench: batch sizes must be >= 1");
        if (total_steps % b != 0)
            throw std::invalid_argument("bench: total_steps must be divisible by batch size " +
                                        std::to_string(b));
    }
    ScenarioPtr scenario = make_scenario(scenario_name);
    WorkerPool pool(workers);
    for (int b : batch_sizes) {
        ScenarioConfig cfg = make_default_config(scenario_name);
        cfg.max_steps = std::numeric_limits<int>::max();  // horizonless stepping
        std::vector<double> times_ms;
        for (int trial = 0; trial < trials; ++trial) {
            std::vector<std::uint64_t> seeds;
            for (int e = 0; e < b; ++e)
                seeds.push_back(derive_episode_seed(seed + static_cast<std::uint64_t>(trial), e));
            auto [state, obs] = reset_batch(cfg, seeds, *scenario, &pool);
            const std::vector<int> stay(static_cast<std::size_t>(b) * cfg.num_robots, 0);
            const long long steps = total_steps / b;
            auto t0 = std::chrono::steady_clock::now();
            for (long long s = 0; s < steps; ++s) {
                auto [next, out] = step_batch(state, stay, cfg, *scenario, &pool);
                state = std::move(next);
            }
            auto t1 = std::chrono::steady_clock::now();
            times_ms.push_back(std::chrono::duration<double, std::milli>(t1 - t0).count());
        }
        BenchRow row;
        row.batch_size = b;
        for (double t : times_ms) row.mean_ms += t;
        row.mean_ms /= static_cast<double>(times_ms.size());
        if (times_ms.size() > 1) {
            double var = 0.0;
            for (double t : times_ms) var += (t - row.mean_ms) * (t - row.mean_ms);
            row.stddev_ms = std::sqrt(var / (static_cast<double>(times_ms.size()) - 1.0));
        }
        table.push_back(row);
    }
    return table;
}

inline void print_bench_table(const std::vector<BenchRow>& table, long long total_steps,
                              std::ostream& os) {
    os << "batch_size  mean_ms  stddev_ms  (for " << total_steps << " aggregate env steps)\n";
    char buf[96];
    for (const auto& row : table) {
        std::snprintf(buf, sizeof buf, "%10d %8.1f %10.2f\n", row.batch_size, row.mean_ms,
                      row.stddev_ms);
        os << buf;
    }
}

// ---- render ----

/// Replay episode 0 of a trajectory file and write one PPM frame per
/// environment step (plus a small manifest with the frame rate).
inline int render_trajectory(const std::string& trajectory_path, const std::string& out_dir,
                             int fps) {
    TrajectoryFile file = read_trajectory(trajectory_path);
    RunConfig run = run_config_from_header(file.header);
    ScenarioConfig cfg = resolve_scenario_config(run);
    ScenarioPtr scenario = make_scenario(run.scenario);

    std::filesystem::create_directories(out_dir);

    // Gather episode 0's per-step actions from the rows.
    std::vector<std::vector<DiscreteAction>> step_actions;
    for (const auto& row : file.rows) {
        if (row.env != 0) continue;
        if (row.step >= static_cast<int>(step_actions.size()))
            step_actions.resize(static_cast<std::size_t>(row.step) + 1);
        auto& acts = step_actions[static_cast<std::size_t>(row.step)];
        if (row.robot >= static_cast<int>(acts.size()))
            acts.resize(static_cast<std::size_t>(row.robot) + 1, DiscreteAction::Stay);
        acts[static_cast<std::size_t>(row.robot)] = static_cast<DiscreteAction>(row.action);
    }
    if (step_actions.empty()) throw std::runtime_error("render: trajectory has no episode 0 rows");

    EnvState state = reset_env(derive_episode_seed(run.seed, 0), cfg, *scenario);
    WorldView view(cfg.params);
    Framebuffer fb(view.width(), view.height());
    char name[64];
    int frames = 0;
    for (std::size_t s = 0; s < step_actions.size(); ++s) {
        step_env(state, step_actions[s], cfg, *scenario);
        draw_env(fb, view, state, cfg);
        std::snprintf(name, sizeof name, "/frame_%05zu.ppm", s);
        fb.save_ppm(out_dir + name);
        ++frames;
    }
    std::ofstream manifest(out_dir + "/frames.txt");
    manifest << "frames " << frames << "\nfps " << fps << "\nformat ppm\n";
    return frames;
}

// ---- verify ----

struct VerifyReport {
    bool ok = true;
    std::string message = "ok";
    long long first_divergent_row = -1;  // 1-based row index within the data section
};

/// Deterministically replay the header config at batch size 1 and compare
/// row-by-row; also re-check collision counting and the safety invariant
/// from the recorded poses. Poses are per-step samples, so the recomputed
/// collision count is a lower bound on the recorded tick-level count.
inline VerifyReport verify_trajectory(const std::string& path) {
    VerifyReport report;
    TrajectoryFile file;
    try {
        file = read_trajectory(path);
    } catch (const std::exception& e) {
        report.ok = false;
        report.message = e.what();
        return report;
    }

    RunConfig run = run_config_from_header(file.header);
    run.batch = 1;
    run.workers = 1;
    RunSummary replay;
    try {
        replay = run_episodes(run, /*write_file=*/false);
    } catch (const std::exception& e) {
        report.ok = false;
        report.message = std::string("replay failed: ") + e.what();
        return report;
    }

    if (replay.rows.size() != file.row_lines.size()) {
        report.ok = false;
        report.message = "row count mismatch: file has " + std::to_string(file.row_lines.size()) +
                         ", replay produced " + std::to_string(replay.rows.size());
        return report;
    }
    for (std::size_t i = 0; i < replay.rows.size(); ++i) {
        if (replay.rows[i].to_csv() != file.row_lines[i]) {
            report.ok = false;
            report.first_divergent_row = static_cast<long long>(i) + 1;
            report.message = "replay diverges at data row " + std::to_string(i + 1) + ":\n  file:   " +
                             file.row_lines[i] + "\n  replay: " + replay.rows[i].to_csv();
            return report;
        }
    }

    // Independent checks from the recorded poses.
    const int n = std::stoi(file.header.get("num_robots"));
    const bool barriers = file.header.get("barriers") == "1";
    ScenarioConfig cfg = resolve_scenario_config(run);
    std::map<int, long long> recomputed;  // per episode, cumulative
    for (std::size_t i = 0; i < file.rows.size(); i += static_cast<std::size_t>(n)) {
        std::vector<RobotPose> poses;
        for (int r = 0; r < n; ++r) {
            const auto& row = file.rows[i + static_cast<std::size_t>(r)];
            if (row.robot != r) {
                report.ok = false;
                report.message = "rows not ordered by (env, step, robot)";
                return report;
            }
            poses.push_back({row.x, row.y, row.theta});
        }
        const auto& last = file.rows[i + static_cast<std::size_t>(n) - 1];
        double mind = n > 1 ? min_pairwise_distance(poses)
                            : std::numeric_limits<double>::infinity();
        if (mind < cfg.params.collision_radius) recomputed[last.env] += 1;
        if (last.collisions < recomputed[last.env]) {
            report.ok = false;
            report.message = "collision counter at env " + std::to_string(last.env) + " step " +
                             std::to_string(last.step) + " is below the pose-level recount";
            return report;
        }
        if (barriers && mind < cfg.barrier.safety_radius - 1e-3) {
            report.ok = false;
            report.message = "safety invariant violated at env " + std::to_string(last.env) +
                             " step " + std::to_string(last.step) +
                             ": min pairwise distance " + format_double(mind);
            return report;
        }
    }
    return report;
}

} // namespace mrsim
