#include <catch2/catch_amalgamated.hpp>

#include <cstring>

#include "mrsim/batch.hpp"

using namespace mrsim;

namespace {

bool poses_equal(const std::vector<RobotPose>& a, const std::vector<RobotPose>& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (std::memcmp(&a[i], &b[i], sizeof(RobotPose)) != 0) return false;
    return true;
}

} // namespace

TEST_CASE("action_to_waypoint basics", "[framework]") {
    SimParams params;
    SplitRng rng = SplitRng::from_seed(1);
    Vec2 wp = action_to_waypoint({0, 0, 0.3}, DiscreteAction::East, 0.2, 0.0, rng, params);
    CHECK(wp.x == 0.2);
    CHECK(wp.y == 0.0);

    wp = action_to_waypoint({0.4, -0.1, 0.0}, DiscreteAction::Stay, 0.2, 0.0, rng, params);
    CHECK(wp.x == 0.4);
    CHECK(wp.y == -0.1);

    wp = action_to_waypoint({1.55, 0.0, 0.0}, DiscreteAction::East, 0.2, 0.0, rng, params);
    CHECK(wp.x == 1.6);  // clamped to the arena bound

    wp = action_to_waypoint({0, 0.95, 0}, DiscreteAction::North, 0.2, 0.0, rng, params);
    CHECK(wp.y == 1.0);
}

TEST_CASE("action noise is bounded and off by default", "[framework]") {
    SimParams params;
    SplitRng rng = SplitRng::from_seed(2);
    for (int i = 0; i < 1000; ++i) {
        Vec2 clean = action_to_waypoint({0, 0, 0}, DiscreteAction::North, 0.2, 0.0, rng, params);
        CHECK(clean.x == 0.0);
        CHECK(clean.y == 0.2);
        Vec2 noisy = action_to_waypoint({0, 0, 0}, DiscreteAction::North, 0.2, 0.25, rng, params);
        CHECK(std::fabs(noisy.x - 0.0) <= 0.25 * 0.2);
        CHECK(std::fabs(noisy.y - 0.2) <= 0.25 * 0.2);
    }
}

TEST_CASE("het_augment modes", "[framework]") {
    HeterogeneitySpec warehouse;
    warehouse.kind = HetKind::ClassId;
    warehouse.obs_mode = HetObsMode::Own;
    warehouse.values = {{1, 0}, {1, 0}, {0, 1}, {0, 1}};
    auto obs = het_augment({9.0}, warehouse, 0);
    CHECK(obs == std::vector<double>{9.0, 1.0, 0.0});

    HeterogeneitySpec discovery;
    discovery.kind = HetKind::CapabilitySet;
    discovery.obs_mode = HetObsMode::FullTeam;
    discovery.values = {{0.45, 0}, {0.45, 0}, {0, 0.25}, {0, 0.25}};
    obs = het_augment({}, discovery, 2);
    CHECK(obs == std::vector<double>{0.45, 0, 0.45, 0, 0, 0.25, 0, 0.25});

    HeterogeneitySpec none;
    none.obs_mode = HetObsMode::None;
    obs = het_augment({1.0, 2.0}, none, 1);
    CHECK(obs == std::vector<double>{1.0, 2.0});
}

TEST_CASE("reset_batch determinism and seed sensitivity", "[framework][engine]") {
    ScenarioConfig cfg = make_default_config("navigation");
    auto [s1, o1] = reset_batch(cfg, {5, 6});
    auto [s2, o2] = reset_batch(cfg, {5, 6});
    CHECK(poses_equal(s1.envs[0].poses, s2.envs[0].poses));
    CHECK(poses_equal(s1.envs[1].poses, s2.envs[1].poses));
    CHECK(o1.obs == o2.obs);
    CHECK_FALSE(poses_equal(s1.envs[0].poses, s1.envs[1].poses));

    CHECK_THROWS_AS(reset_batch(cfg, {}), std::invalid_argument);
}

TEST_CASE("spawn and goal placements respect separation at B=64", "[framework][engine]") {
    ScenarioConfig cfg = make_default_config("navigation");
    std::vector<std::uint64_t> seeds;
    for (int i = 0; i < 64; ++i) seeds.push_back(1000 + i);
    auto [state, obs] = reset_batch(cfg, seeds);
    const double min_sep = cfg.barrier.safety_radius + 0.05;
    for (const auto& env : state.envs) {
        CHECK(min_pairwise_distance(env.poses) >= min_sep);
        const auto& goals = std::get<NavigationState>(env.scenario).goals;
        for (std::size_t i = 0; i < goals.size(); ++i)
            for (std::size_t j = i + 1; j < goals.size(); ++j)
                CHECK(distance(goals[i], goals[j]) >=
                      2.0 * cfg.layout.scalar("navigation.on_goal_radius"));
    }
}

TEST_CASE("step_batch is pure and batch-consistent", "[framework][engine]") {
    ScenarioConfig cfg = make_default_config("navigation");
    auto [state, obs0] = reset_batch(cfg, {7, 7, 9});
    // Instances 0 and 1 share a seed, so they are identical environments.
    std::vector<int> actions = {1, 4, 0, 1, 4, 0, 2, 3, 1};
    auto [next1, out1] = step_batch(state, actions, cfg);
    auto [next2, out2] = step_batch(state, actions, cfg);
    CHECK(poses_equal(next1.envs[0].poses, next2.envs[0].poses));  // purity
    CHECK(poses_equal(next1.envs[0].poses, next1.envs[1].poses));  // identical instances
    CHECK(out1[0].team_reward == out1[1].team_reward);
    CHECK(out1[0].obs == out1[1].obs);
    CHECK(out1[2].team_reward != out1[0].team_reward);
}

TEST_CASE("scalar stepping equals batched stepping bit-exactly", "[framework][engine]") {
    ScenarioConfig cfg = make_default_config("random_waypoints");
    cfg.max_steps = 50;
    std::vector<std::uint64_t> seeds = {11, 22, 33, 44};
    auto [batch, obs] = reset_batch(cfg, seeds);
    std::vector<BatchWorldState> scalars;
    for (auto s : seeds) {
        auto [one, o] = reset_batch(cfg, {s});
        scalars.push_back(std::move(one));
    }
    std::vector<int> actions(4 * cfg.num_robots, 0);
    std::vector<int> one_action(cfg.num_robots, 0);
    for (int t = 0; t < 30; ++t) {
        auto [nb, outb] = step_batch(batch, actions, cfg);
        batch = std::move(nb);
        for (int e = 0; e < 4; ++e) {
            auto [ns, outs] = step_batch(scalars[static_cast<std::size_t>(e)], one_action, cfg);
            scalars[static_cast<std::size_t>(e)] = std::move(ns);
            REQUIRE(poses_equal(batch.envs[static_cast<std::size_t>(e)].poses,
                                scalars[static_cast<std::size_t>(e)].envs[0].poses));
            REQUIRE(outb[static_cast<std::size_t>(e)].team_reward ==
                    outs[0].team_reward);
        }
    }
}

TEST_CASE("permuting or deleting instances leaves the others untouched", "[framework][engine]") {
    ScenarioConfig cfg = make_default_config("foraging");
    auto [state, obs] = reset_batch(cfg, {1, 2, 3});
    std::vector<int> actions = {1, 2, 3, 4, 0, 1, 2, 3, 4};
    auto [next, out] = step_batch(state, actions, cfg);

    BatchWorldState permuted;
    permuted.envs = {state.envs[2], state.envs[0], state.envs[1]};
    std::vector<int> pactions = {2, 3, 4, 1, 2, 3, 4, 0, 1};
    auto [pnext, pout] = step_batch(permuted, pactions, cfg);
    CHECK(poses_equal(pnext.envs[0].poses, next.envs[2].poses));
    CHECK(poses_equal(pnext.envs[1].poses, next.envs[0].poses));
    CHECK(pout[0].team_reward == out[2].team_reward);

    BatchWorldState solo;
    solo.envs = {state.envs[1]};
    auto [snext, sout] = step_batch(solo, {4, 0, 1}, cfg);
    CHECK(poses_equal(snext.envs[0].poses, next.envs[1].poses));
}

TEST_CASE("horizon termination", "[framework][engine]") {
    ScenarioConfig cfg = make_default_config("warehouse");
    auto scenario = make_scenario("warehouse");
    EnvState st = reset_env(77, cfg, *scenario);
    st.step_index = cfg.max_steps - 1;
    std::vector<DiscreteAction> stay(static_cast<std::size_t>(cfg.num_robots),
                                     DiscreteAction::Stay);
    StepOutput out = step_env(st, stay, cfg, *scenario);
    CHECK(out.done);
}

TEST_CASE("bad inputs are reported with context", "[framework][engine]") {
    CHECK_THROWS_AS(make_scenario("not_a_scenario"), std::invalid_argument);

    ScenarioConfig cfg = make_default_config("navigation");
    auto [state, obs] = reset_batch(cfg, {5});
    std::vector<int> actions = {0, 7, 0};
    try {
        step_batch(state, actions, cfg);
        FAIL("expected invalid_argument");
    } catch (const std::invalid_argument& e) {
        std::string msg = e.what();
        CHECK(msg.find("environment 0") != std::string::npos);
        CHECK(msg.find("robot 1") != std::string::npos);
    }
}

TEST_CASE("all-stay actions freeze the world", "[framework][engine]") {
    ScenarioConfig cfg = make_default_config("navigation");
    auto scenario = make_scenario("navigation");
    EnvState st = reset_env(3, cfg, *scenario);
    std::vector<RobotPose> before = st.poses;
    std::vector<DiscreteAction> stay(static_cast<std::size_t>(cfg.num_robots),
                                     DiscreteAction::Stay);
    StepOutput o1 = step_env(st, stay, cfg, *scenario);
    StepOutput o2 = step_env(st, stay, cfg, *scenario);
    CHECK(poses_equal(st.poses, before));
    CHECK(o1.team_reward == o2.team_reward);  // pure distance penalty, twice
}

TEST_CASE("worker pool covers every index exactly once", "[framework][engine]") {
    for (int workers : {1, 2, 4}) {
        WorkerPool pool(workers);
        CHECK(pool.size() == workers);
        std::vector<std::atomic<int>> hits(257);
        for (auto& h : hits) h = 0;
        pool.run(257, [&](int i) { hits[static_cast<std::size_t>(i)]++; });
        for (auto& h : hits) CHECK(h == 1);
    }
}

TEST_CASE("worker count does not change results", "[framework][engine]") {
    ScenarioConfig cfg = make_default_config("discovery");
    WorkerPool pool1(1), pool4(4);
    std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5, 6, 7, 8};
    auto [s1, o1] = reset_batch(cfg, seeds, &pool1);
    auto [s4, o4] = reset_batch(cfg, seeds, &pool4);
    CHECK(o1.obs == o4.obs);
    std::vector<int> actions(8 * static_cast<std::size_t>(cfg.num_robots), 4);
    for (int t = 0; t < 5; ++t) {
        auto [n1, out1] = step_batch(s1, actions, cfg, &pool1);
        auto [n4, out4] = step_batch(s4, actions, cfg, &pool4);
        s1 = std::move(n1);
        s4 = std::move(n4);
        for (int e = 0; e < 8; ++e) {
            REQUIRE(poses_equal(s1.envs[static_cast<std::size_t>(e)].poses,
                                s4.envs[static_cast<std::size_t>(e)].poses));
            REQUIRE(out1[static_cast<std::size_t>(e)].obs == out4[static_cast<std::size_t>(e)].obs);
        }
    }
}

TEST_CASE("observation layouts are stable and documented", "[framework][engine]") {
    const std::vector<std::pair<std::string, std::size_t>> expected = {
        {"arctic_transport", 31}, {"discovery", 29}, {"foraging", 16},
        {"material_transport", 20}, {"navigation", 5}, {"predator_prey", 9},
        {"rware", 29}, {"warehouse", 12}, {"random_waypoints", 5},
    };
    SplitRng arng = SplitRng::from_seed(99);
    for (const auto& [name, dim] : expected) {
        ScenarioConfig cfg = make_default_config(name);
        auto scenario = make_scenario(name);
        EnvState st = reset_env(17, cfg, *scenario);
        auto obs0 = assemble_observations(st, cfg, *scenario);
        for (const auto& o : obs0) {
            INFO(name);
            CHECK(o.size() == dim);
        }
        for (int t = 0; t < 20; ++t) {
            std::vector<DiscreteAction> acts;
            for (int r = 0; r < cfg.num_robots; ++r)
                acts.push_back(static_cast<DiscreteAction>(arng.uniform_int(kNumActions)));
            StepOutput out = step_env(st, acts, cfg, *scenario);
            for (const auto& o : out.obs) {
                INFO(name);
                REQUIRE(o.size() == dim);
            }
        }
    }
}
