// mrsim command line: run/record episodes, benchmark batched throughput,
// render trajectory frames, and verify recorded files by deterministic
// replay.

#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mrsim/harness.hpp"

namespace {

int do_run(const mrsim::RunConfig& run) {
    mrsim::RunSummary summary = mrsim::run_episodes(run);
    mrsim::print_summary(summary, std::cout);
    if (run.render) {
        std::string dir = run.render_dir.empty() ? summary.trajectory_path + ".frames"
                                                 : run.render_dir;
        int frames = mrsim::render_trajectory(summary.trajectory_path, dir, run.fps);
        std::cout << "  rendered " << frames << " frames to " << dir << "\n";
    }
    return 0;
}

int do_bench(const std::string& scenario, long long steps, std::vector<int> batches, int trials,
             int workers, std::uint64_t seed) {
    auto table = mrsim::bench_scenario(scenario, steps, batches, trials, workers, seed);
    mrsim::print_bench_table(table, steps, std::cout);
    return 0;
}

int do_verify(const std::string& path) {
    mrsim::VerifyReport report = mrsim::verify_trajectory(path);
    if (report.ok) {
        std::cout << "verify: ok (" << path << ")\n";
        return 0;
    }
    std::cerr << "verify: FAILED: " << report.message << "\n";
    return 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"mrsim: batched differential-drive multi-robot team simulator"};
    app.require_subcommand(1);

    mrsim::RunConfig run;
    int config_version = 1;
    bool no_barriers = false;
    bool barriers_on = false;

    CLI::App* cmd_run = app.add_subcommand("run", "run episodes and record a trajectory");
    cmd_run->set_config("--config", "", "key=value run configuration file");
    cmd_run->add_option("--config-version", config_version, "config format version")
        ->check(CLI::IsMember({1}));
    cmd_run->add_option("--scenario", run.scenario, "scenario name (see list-scenarios)");
    cmd_run->add_option("--seed", run.seed, "root seed");
    cmd_run->add_option("--batch", run.batch, "environments stepped together");
    cmd_run->add_option("--episodes", run.episodes, "total episodes to run");
    cmd_run->add_option("--policy", run.policy,
                        "random | scripted_goal | prey_chaser | feedforward:<file>");
    cmd_run->add_option("--out", run.out, "trajectory output path");
    cmd_run->add_option("--layout", run.layout_file, "layout override file");
    cmd_run->add_option("--workers", run.workers, "worker threads (0 = hardware)");
    cmd_run->add_flag("--render", run.render, "render frames after the run");
    cmd_run->add_option("--render-dir", run.render_dir, "frame output directory");
    cmd_run->add_option("--fps", run.fps, "frame rate recorded in the manifest");
    cmd_run->add_option("--max-steps", run.max_steps, "episode horizon override");
    cmd_run->add_option("--num-robots", run.num_robots, "robot count override");
    cmd_run->add_option("--sub-steps", run.sub_steps, "physics ticks per env step");
    cmd_run->add_option("--noise-scale", run.noise_scale, "action noise scale (0 = off)");
    cmd_run->add_flag("--no-barriers", no_barriers, "disable the safety filter");
    cmd_run->add_flag("--barriers", barriers_on, "force-enable the safety filter");
    cmd_run->add_option("--controller", run.controller, "unicycle_position | unicycle_pose")
        ->check(CLI::IsMember({"unicycle_position", "unicycle_pose"}));

    std::string bench_scenario_name = "random_waypoints";
    long long bench_steps = 100000;
    std::vector<int> bench_batches = {1, 4, 16, 64};
    int bench_trials = 5;
    int bench_workers = 0;
    std::uint64_t bench_seed = 0;
    CLI::App* cmd_bench = app.add_subcommand("bench", "measure batched stepping throughput");
    cmd_bench->add_option("--scenario", bench_scenario_name, "scenario to benchmark");
    cmd_bench->add_option("--steps", bench_steps, "aggregate environment steps per trial");
    cmd_bench->add_option("--batch", bench_batches, "batch sizes to sweep");
    cmd_bench->add_option("--trials", bench_trials, "trials per batch size");
    cmd_bench->add_option("--workers", bench_workers, "worker threads (0 = hardware)");
    cmd_bench->add_option("--seed", bench_seed, "root seed");

    std::string render_traj, render_out = "frames";
    int render_fps = 30;
    CLI::App* cmd_render = app.add_subcommand("render", "draw one frame per step of episode 0");
    cmd_render->add_option("trajectory", render_traj, "trajectory file")->required();
    cmd_render->add_option("--out", render_out, "output directory");
    cmd_render->add_option("--fps", render_fps, "frame rate recorded in the manifest");

    std::string verify_traj;
    CLI::App* cmd_verify = app.add_subcommand("verify", "replay a trajectory and compare rows");
    cmd_verify->add_option("trajectory", verify_traj, "trajectory file")->required();

    CLI::App* cmd_list = app.add_subcommand("list-scenarios", "print available scenarios");

    CLI11_PARSE(app, argc, argv);

    try {
        if (cmd_run->parsed()) {
            if (no_barriers) run.barriers = 0;
            else if (barriers_on) run.barriers = 1;
            return do_run(run);
        }
        if (cmd_bench->parsed())
            return do_bench(bench_scenario_name, bench_steps, bench_batches, bench_trials,
                            bench_workers, bench_seed);
        if (cmd_render->parsed()) {
            int frames = mrsim::render_trajectory(render_traj, render_out, render_fps);
            std::cout << "rendered " << frames << " frames to " << render_out << "\n";
            return 0;
        }
        if (cmd_verify->parsed()) return do_verify(verify_traj);
        if (cmd_list->parsed()) {
            for (const auto& [name, factory] : mrsim::scenario_registry())
                std::cout << name << "\n";
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
