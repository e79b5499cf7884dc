#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "mrsim/harness.hpp"

using namespace mrsim;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    REQUIRE(f);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

std::string temp_path(const std::string& name) {
    return (std::filesystem::temp_directory_path() / name).string();
}

} // namespace

TEST_CASE("random policy is reproducible from its stream", "[policy]") {
    Policy p(PolicySpec::parse("random"));
    PolicyContext ctx;
    std::vector<double> obs = {0.0};
    std::vector<int> first, second;
    for (int i = 0; i < 50; ++i) {
        SplitRng rng = policy_stream(1234, i, 0);
        first.push_back(static_cast<int>(p.act(obs, rng, ctx)));
    }
    for (int i = 0; i < 50; ++i) {
        SplitRng rng = policy_stream(1234, i, 0);
        second.push_back(static_cast<int>(p.act(obs, rng, ctx)));
    }
    CHECK(first == second);
    bool varied = false;
    for (int a : first) varied = varied || a != first[0];
    CHECK(varied);
}

TEST_CASE("scripted_goal picks the axis toward the goal", "[policy]") {
    ScenarioConfig cfg = make_default_config("navigation");
    auto scenario = make_scenario("navigation");
    EnvState st = reset_env(5, cfg, *scenario);
    st.poses[0] = {0.0, 0.0, 0.0};
    st.poses[1] = {-1.2, 0.8, 0.0};
    st.poses[2] = {-1.2, -0.8, 0.0};
    auto& goals = std::get<NavigationState>(st.scenario).goals;
    goals[0] = {1.0, 0.0};  // due east
    Policy p(PolicySpec::parse("scripted_goal"));
    PolicyContext ctx{&st, &cfg, scenario.get(), 0};
    SplitRng rng = policy_stream(1, 0, 0);
    CHECK(p.act({}, rng, ctx) == DiscreteAction::East);
}

TEST_CASE("scripted_goal reaches navigation goals consistently", "[policy]") {
    RunConfig run;
    run.scenario = "navigation";
    run.seed = 31337;
    run.episodes = 20;
    run.batch = 10;
    run.policy = "scripted_goal";
    RunSummary s = run_episodes(run, false);
    for (const auto& e : s.episodes) CHECK(e.success);
}

TEST_CASE("feedforward weights: round trip, forward pass, argmax", "[policy]") {
    FeedforwardWeights ff;
    DenseLayer l0;
    l0.in = 3;
    l0.out = 4;
    l0.activation = Activation::Relu;
    l0.w = {0.5, -1.0, 0.25, 1.5, 0.0, -0.5, 2.0, 1.0, 0.0, -0.25, 0.75, 0.125};
    l0.b = {0.1, -0.2, 0.3, 0.0};
    DenseLayer l1;
    l1.in = 4;
    l1.out = 5;
    l1.activation = Activation::Identity;
    l1.w.assign(20, 0.0);
    l1.b = {0.0, 0.1, -0.1, 0.2, 0.05};
    l1.w[0 * 4 + 0] = 1.0;
    l1.w[4 * 4 + 1] = 2.0;
    ff.layers = {l0, l1};
    ff.validate();

    FeedforwardWeights back = FeedforwardWeights::from_text(ff.to_text());
    CHECK(back.to_text() == ff.to_text());

    // Manual forward pass for obs (1, 2, -1).
    std::vector<double> obs = {1.0, 2.0, -1.0};
    std::vector<double> h(4);
    for (int o = 0; o < 4; ++o) {
        double s = l0.b[o];
        for (int i = 0; i < 3; ++i) s += l0.w[o * 3 + i] * obs[i];
        h[o] = std::max(0.0, s);
    }
    std::vector<double> logits(5);
    for (int o = 0; o < 5; ++o) {
        double s = l1.b[o];
        for (int i = 0; i < 4; ++i) s += l1.w[o * 4 + i] * h[i];
        logits[o] = s;
    }
    auto got = ff.forward(obs);
    REQUIRE(got.size() == 5);
    for (int i = 0; i < 5; ++i) CHECK(got[i] == Catch::Approx(logits[i]).margin(1e-12));
}

TEST_CASE("feedforward policy: selected observation drives the argmax", "[policy]") {
    // Single identity layer wiring obs[0] into logit 4.
    FeedforwardWeights ff;
    DenseLayer l;
    l.in = 2;
    l.out = 5;
    l.activation = Activation::Identity;
    l.w.assign(10, 0.0);
    l.b.assign(5, 0.0);
    l.w[4 * 2 + 0] = 1.0;
    ff.layers = {l};
    std::string path = temp_path("mrsim_ff.txt");
    {
        std::ofstream f(path);
        f << ff.to_text();
    }
    PolicySpec spec = PolicySpec::parse("feedforward:" + path);
    Policy p(spec);
    PolicyContext ctx;
    SplitRng rng = policy_stream(1, 0, 0);
    CHECK(p.act({2.5, 0.0}, rng, ctx) == DiscreteAction::East);   // logit 4 wins
    CHECK(p.act({-1.0, 0.0}, rng, ctx) == DiscreteAction::Stay);  // ties go to index 0

    try {
        p.act({1.0, 2.0, 3.0}, rng, ctx);
        FAIL("expected dimension error");
    } catch (const std::invalid_argument& e) {
        std::string msg = e.what();
        CHECK(msg.find("3") != std::string::npos);
        CHECK(msg.find("2") != std::string::npos);
    }
}

TEST_CASE("weights file rejects malformed input", "[policy]") {
    CHECK_THROWS(FeedforwardWeights::from_text("bogus"));
    CHECK_THROWS(FeedforwardWeights::from_text("mrsim-weights 99\nlayers 1\n"));
    // Dimensions that do not chain.
    CHECK_THROWS(FeedforwardWeights::from_text(
        "mrsim-weights 1\nlayers 2\nlayer 0 2 3 relu\n1 0\n0 1\n1 1\n0 0 0\n"
        "layer 1 4 5 identity\n" +
        std::string(200, '0')));
    // Wrong output dimension.
    CHECK_THROWS(FeedforwardWeights::from_text(
        "mrsim-weights 1\nlayers 1\nlayer 0 2 3 identity\n1 0\n0 1\n1 1\n0 0 0\n"));
    CHECK_THROWS(PolicySpec::parse("nonsense"));
    CHECK_THROWS(PolicySpec::parse("feedforward:"));
}

TEST_CASE("trajectory file round trip is exact", "[io]") {
    RunConfig run;
    run.scenario = "foraging";
    run.seed = 99;
    run.episodes = 2;
    run.out = temp_path("mrsim_roundtrip.traj.csv");
    RunSummary s = run_episodes(run);
    TrajectoryFile file = read_trajectory(run.out);
    REQUIRE(file.rows.size() == s.rows.size());
    for (std::size_t i = 0; i < s.rows.size(); ++i)
        CHECK(file.rows[i].to_csv() == s.rows[i].to_csv());
    CHECK(file.header.get("scenario") == "foraging");
    CHECK(file.header.get("num_robots") == "3");
}

TEST_CASE("identical runs produce byte-identical files across worker counts", "[io]") {
    for (const char* scenario : {"navigation", "rware"}) {
        std::vector<std::string> contents;
        for (int workers : {1, 4, 1}) {
            RunConfig run;
            run.scenario = scenario;
            run.seed = 1234;
            run.episodes = 4;
            run.batch = 4;
            run.workers = workers;
            run.max_steps = 20;
            run.out = temp_path("mrsim_det.traj.csv");
            run_episodes(run);
            contents.push_back(slurp(run.out));
        }
        CHECK(contents[0] == contents[1]);
        CHECK(contents[0] == contents[2]);
    }
}

TEST_CASE("batched rows equal scalar rows for matching seeds", "[io]") {
    RunConfig batched;
    batched.scenario = "random_waypoints";
    batched.seed = 5;
    batched.episodes = 8;
    batched.batch = 8;
    batched.max_steps = 25;
    RunSummary b = run_episodes(batched, false);

    RunConfig scalar = batched;
    scalar.batch = 1;
    RunSummary s = run_episodes(scalar, false);

    REQUIRE(b.rows.size() == s.rows.size());
    for (std::size_t i = 0; i < b.rows.size(); ++i)
        REQUIRE(b.rows[i].to_csv() == s.rows[i].to_csv());
}

TEST_CASE("verify passes untampered files and locates corruption", "[io]") {
    RunConfig run;
    run.scenario = "navigation";
    run.seed = 77;
    run.episodes = 2;
    run.max_steps = 30;
    run.policy = "scripted_goal";
    run.out = temp_path("mrsim_verify.traj.csv");
    run_episodes(run);

    VerifyReport ok = verify_trajectory(run.out);
    INFO(ok.message);
    CHECK(ok.ok);

    // Mutate one x value in the middle of the data section.
    std::string text = slurp(run.out);
    std::size_t header_end = text.find("env,step,robot");
    std::size_t line_start = text.find('\n', text.find('\n', header_end) + 400) + 1;
    std::size_t comma3 = line_start;
    for (int c = 0; c < 3; ++c) comma3 = text.find(',', comma3) + 1;
    text[comma3 + 1] = text[comma3 + 1] == '5' ? '6' : '5';
    std::string tampered = temp_path("mrsim_verify_bad.traj.csv");
    {
        std::ofstream f(tampered, std::ios::binary);
        f << text;
    }
    VerifyReport bad = verify_trajectory(tampered);
    CHECK_FALSE(bad.ok);
    CHECK(bad.first_divergent_row > 0);

    // Header tampering trips the config hash.
    std::string text2 = slurp(run.out);
    std::size_t pos = text2.find("# seed = 77");
    REQUIRE(pos != std::string::npos);
    text2.replace(pos, 11, "# seed = 78");
    std::string tampered2 = temp_path("mrsim_verify_bad2.traj.csv");
    {
        std::ofstream f(tampered2, std::ios::binary);
        f << text2;
    }
    VerifyReport bad2 = verify_trajectory(tampered2);
    CHECK_FALSE(bad2.ok);
}

TEST_CASE("verify replays batched files with a scalar replay", "[io]") {
    RunConfig run;
    run.scenario = "discovery";
    run.seed = 3;
    run.episodes = 8;
    run.batch = 8;
    run.max_steps = 15;
    run.out = temp_path("mrsim_verify_b8.traj.csv");
    run_episodes(run);
    VerifyReport report = verify_trajectory(run.out);
    INFO(report.message);
    CHECK(report.ok);
}

TEST_CASE("layout round trip and shipped defaults", "[io]") {
    Layout layout;
    Layout back = Layout::from_text(layout.to_text());
    CHECK(back.table() == layout.table());

    std::string shipped = slurp(std::string(MRSIM_SOURCE_DIR) + "/data/default_layout.txt");
    Layout from_file = Layout::from_text(shipped);
    CHECK(from_file.table() == Layout::defaults());

    CHECK_THROWS(Layout::from_text("no version here\n"));
    CHECK_THROWS(Layout::from_text("format_version = 99\n"));
    CHECK_THROWS(Layout::from_text("format_version = 1\nbroken line without equals\n"));

    Layout overridden = Layout::from_text("format_version = 1\npp.tag_radius = 0.4\n");
    CHECK(overridden.scalar("pp.tag_radius") == 0.4);
    CHECK(overridden.scalar("foraging.radius") == 0.3);  // defaults retained
}

TEST_CASE("bench handles edge cases", "[io]") {
    auto empty = bench_scenario("random_waypoints", 0, {1, 4}, 2, 1);
    CHECK(empty.empty());

    auto single = bench_scenario("random_waypoints", 64, {1}, 1, 1);
    REQUIRE(single.size() == 1);
    CHECK(single[0].batch_size == 1);
    CHECK(single[0].mean_ms > 0.0);

    CHECK_THROWS_AS(bench_scenario("random_waypoints", 100, {3}, 1, 1), std::invalid_argument);
}

TEST_CASE("render writes one frame per step", "[io][render]") {
    RunConfig run;
    run.scenario = "navigation";
    run.seed = 11;
    run.episodes = 1;
    run.max_steps = 10;
    run.out = temp_path("mrsim_render.traj.csv");
    run_episodes(run);
    std::string dir = temp_path("mrsim_frames");
    std::filesystem::remove_all(dir);
    int frames = render_trajectory(run.out, dir, 30);
    CHECK(frames == 10);
    for (int i = 0; i < frames; ++i) {
        char name[64];
        std::snprintf(name, sizeof name, "/frame_%05d.ppm", i);
        std::string header = slurp(dir + name).substr(0, 2);
        CHECK(header == "P6");
    }
    CHECK(slurp(dir + "/frames.txt").find("fps 30") != std::string::npos);
}

TEST_CASE("render reflects scenario state changes", "[io][render]") {
    // Tagged landmarks disappear; the prey flashes red after a tag.
    ScenarioConfig cfg = make_default_config("discovery");
    auto scenario = make_scenario("discovery");
    EnvState st = reset_env(21, cfg, *scenario);
    auto& s = std::get<DiscoveryState>(st.scenario);
    s.landmarks[0] = {0.0, 0.0};
    for (auto& p : st.poses) p = {-1.2, 0.0, 0.0};
    st.poses[1].y = 0.5;
    st.poses[2].y = -0.5;
    st.poses[3].y = 0.8;
    WorldView view(cfg.params);
    Framebuffer fb(view.width(), view.height());

    s.sensed[0] = 0;
    s.tagged[0] = 0;
    draw_env(fb, view, st, cfg);
    Color c = fb.get(view.px(0.0), view.py(0.0));
    CHECK(static_cast<int>(c.r) == 20);  // unsensed landmark drawn black

    s.tagged[0] = 1;
    draw_env(fb, view, st, cfg);
    c = fb.get(view.px(0.0), view.py(0.0));
    CHECK(static_cast<int>(c.r) == 255);  // tagged landmark gone

    ScenarioConfig pcfg = make_default_config("predator_prey");
    auto pscenario = make_scenario("predator_prey");
    EnvState pst = reset_env(22, pcfg, *pscenario);
    auto& pp = std::get<PredatorPreyState>(pst.scenario);
    pp.prey = {0.0, 0.0};
    pp.flash_timer = 0;
    draw_env(fb, view, pst, pcfg);
    Color prey = fb.get(view.px(0.0), view.py(0.0));
    CHECK(static_cast<int>(prey.g) > static_cast<int>(prey.r));  // green

    pp.flash_timer = 2;
    draw_env(fb, view, pst, pcfg);
    prey = fb.get(view.px(0.0), view.py(0.0));
    CHECK(static_cast<int>(prey.r) > static_cast<int>(prey.g));  // flashes red
}
