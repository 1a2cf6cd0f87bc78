#include <gtest/gtest.h>

#include <sstream>

#include "uwnav/config.hpp"
#include "uwnav/io.hpp"

using namespace uwnav;

namespace {

EpisodeRecord sample_episode(std::uint64_t seed) {
    NavigationEnv env(EnvConfig::defaults());
    env.reset(seed);
    Rng rng(seed);
    return record_episode(env, [&](const std::vector<double>&, const NavigationEnv&) {
        return 2 + static_cast<int>(rng.below(3));
    });
}

ppo::Policy sample_policy() {
    Rng rng(4);
    ppo::Policy p;
    p.params = ppo::MlpParams::initialize(84, {16, 8}, 7, rng);
    p.normalizer = ppo::ObsNormalizer(84);
    for (int i = 0; i < 50; ++i) {
        std::vector<double> x(84);
        for (auto& v : x) v = rng.uniform();
        p.normalizer.update(x);
    }
    return p;
}

std::size_t count_lines(const std::string& s) {
    std::size_t n = 0;
    for (char c : s) n += c == '\n';
    return n;
}

std::size_t count_of(const std::string& s, const std::string& needle) {
    std::size_t n = 0;
    for (auto p = s.find(needle); p != std::string::npos; p = s.find(needle, p + 1)) ++n;
    return n;
}

}  // namespace

TEST(Scenario, RoundTripIsExact) {
    const auto cfg = EnvConfig::defaults();
    const auto sc = Scenario::from(cfg, 99, sample_obstacles(99, cfg));
    std::stringstream ss;
    write_scenario(ss, sc);
    const auto back = read_scenario(ss);
    EXPECT_EQ(back.seed, 99u);
    EXPECT_EQ(layout_hash(back.obstacles), layout_hash(sc.obstacles));
    EXPECT_EQ(back.exit_gate.a, cfg.exit_gate.a);
    EXPECT_EQ(back.workspace.vertices(), cfg.workspace.vertices());
}

TEST(Scenario, RejectsMalformedInput) {
    std::stringstream missing("uwnav-scenario 1\nseed 3\n");
    EXPECT_THROW(read_scenario(missing), std::runtime_error);
    std::stringstream bad_count(
        "uwnav-scenario 1\nworkspace 0 0 1 0 1 1 0 1\nentry_gate 0 1 0 0\nexit_gate 1 0 1 1\nobstacles 2\n"
        "obstacle 0.5 0.5 0.1\n");
    EXPECT_THROW(read_scenario(bad_count), std::runtime_error);
    std::stringstream unknown("uwnav-scenario 1\nbogus 1\n");
    EXPECT_THROW(read_scenario(unknown), std::runtime_error);
}

TEST(EpisodeLog, HeaderPlusOneLinePerStep) {
    const auto rec = sample_episode(5);
    std::stringstream ss;
    write_episode_log(ss, rec);
    EXPECT_EQ(count_lines(ss.str()), rec.steps.size() + 1);
    const auto rows = read_episode_log(ss);
    ASSERT_EQ(rows.size(), rec.steps.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        EXPECT_EQ(rows[i].pose.position, rec.steps[i].pose.position);
        EXPECT_EQ(rows[i].reward, rec.steps[i].reward);
        EXPECT_EQ(rows[i].action, rec.steps[i].action);
    }
    EXPECT_EQ(rows.back().cause, rec.cause);
    EXPECT_EQ(rows.front().cause, rec.steps.size() > 1 ? TerminalCause::running : rec.cause);
}

TEST(EpisodeLog, RejectsMissingHeader) {
    std::stringstream ss("1,0,0,0,3,0,0,running\n");
    EXPECT_THROW(read_episode_log(ss), std::runtime_error);
}

TEST(Trajectory, NedColumnsFollowFrameMap) {
    const auto rec = sample_episode(6);
    std::stringstream ss;
    write_trajectory(ss, rec);
    std::string line;
    std::getline(ss, line);
    EXPECT_EQ(line, "step,x_img,y_img,x_ned,y_ned,theta");
    std::size_t rows = 0;
    while (std::getline(ss, line)) {
        double v[6];
        char comma;
        std::istringstream ls(line);
        ls >> v[0];
        for (int i = 1; i < 6; ++i) ls >> comma >> v[i];
        EXPECT_EQ(v[1], v[4]);   // x_img = y_ned
        EXPECT_EQ(v[2], -v[3]);  // y_img = -x_ned
        ++rows;
    }
    EXPECT_EQ(rows, rec.steps.size() + 1);
}

TEST(Svg, OnePathPerEpisode) {
    const std::vector<EpisodeRecord> eps{sample_episode(1), sample_episode(2), sample_episode(3)};
    std::stringstream ss;
    write_svg(ss, EnvConfig::defaults(), eps);
    EXPECT_EQ(count_of(ss.str(), "<path "), 3u);
    EXPECT_EQ(count_of(ss.str(), "<circle "), eps[0].obstacles.size());
}

TEST(Checkpoint, RoundTripPreservesPolicyAndTrainerState) {
    Checkpoint ck;
    ck.config_yaml = "env:\n  seed: 3\n";
    ck.policy = sample_policy();
    ppo::TrainerSnapshot t;
    t.iteration = 12;
    t.kl_coeff = 0.45;
    t.env_steps = 23400;
    t.last_return_mean = 1.0 / 3.0;
    t.last_success_mean = 0.25;
    t.shuffle_rng_state = Rng(5).serialize();
    t.adam_t = 360;
    t.adam_m = ck.policy.params;
    t.adam_v = ck.policy.params;
    t.workers.push_back({Rng(6).serialize(), 77, {3, 3, 4}, 0.125});
    t.workers.push_back({Rng(7).serialize(), 78, {}, 0.0});
    ck.trainer = t;

    std::stringstream ss;
    write_checkpoint(ss, ck);
    const auto back = read_checkpoint(ss, 84);
    EXPECT_EQ(back.config_yaml, ck.config_yaml);
    EXPECT_TRUE(back.policy.params == ck.policy.params);
    EXPECT_EQ(back.policy.normalizer.mean(), ck.policy.normalizer.mean());
    EXPECT_EQ(back.policy.normalizer.m2(), ck.policy.normalizer.m2());
    EXPECT_EQ(back.policy.normalizer.count(), ck.policy.normalizer.count());
    ASSERT_TRUE(back.trainer.has_value());
    EXPECT_EQ(back.trainer->kl_coeff, t.kl_coeff);
    EXPECT_EQ(back.trainer->last_return_mean, t.last_return_mean);
    EXPECT_EQ(back.trainer->shuffle_rng_state, t.shuffle_rng_state);
    EXPECT_TRUE(back.trainer->adam_v == t.adam_v);
    ASSERT_EQ(back.trainer->workers.size(), 2u);
    EXPECT_EQ(back.trainer->workers[0].episode_actions, (std::vector<int>{3, 3, 4}));
    EXPECT_EQ(back.trainer->workers[1].rng_state, t.workers[1].rng_state);
}

TEST(Checkpoint, GreedyActionsSurviveRoundTrip) {
    Checkpoint ck;
    ck.policy = sample_policy();
    std::stringstream ss;
    write_checkpoint(ss, ck);
    const auto back = read_checkpoint(ss);
    EXPECT_FALSE(back.trainer.has_value());
    Rng rng(8);
    for (int i = 0; i < 200; ++i) {
        std::vector<double> obs(84);
        for (auto& v : obs) v = rng.uniform();
        EXPECT_EQ(back.policy.act_greedy(obs), ck.policy.act_greedy(obs));
        EXPECT_EQ(back.policy.evaluate(obs).logits, ck.policy.evaluate(obs).logits);
    }
}

TEST(Checkpoint, ErrorsAreReported) {
    Checkpoint ck;
    ck.policy = sample_policy();
    std::stringstream ss;
    write_checkpoint(ss, ck);
    const std::string text = ss.str();

    std::stringstream wrong_dim(text);
    EXPECT_THROW(read_checkpoint(wrong_dim, 80), CheckpointError);

    std::string v2 = text;
    v2.replace(v2.find("uwnav-checkpoint 1"), 18, "uwnav-checkpoint 2");
    std::stringstream wrong_version(v2);
    EXPECT_THROW(read_checkpoint(wrong_version), CheckpointError);

    std::stringstream truncated(text.substr(0, text.size() / 2));
    EXPECT_THROW(read_checkpoint(truncated), CheckpointError);

    std::stringstream garbage("hello\n");
    EXPECT_THROW(read_checkpoint(garbage), CheckpointError);
}

TEST(Config, DefaultsRoundTripThroughYaml) {
    const RunConfig cfg;
    const auto back = parse_run_config(to_yaml(cfg));
    EXPECT_EQ(to_yaml(back), to_yaml(cfg));
    EXPECT_EQ(back.env.observation_size(), 84u);
    EXPECT_EQ(back.train.train_batch, 1950);
    EXPECT_EQ(back.env.reward.b_prog, 0.07);
}

TEST(Config, ReducedPresetAndOverrides) {
    const auto cfg = parse_run_config("env:\n  preset: reduced\n  max_steps: 100\ntrain:\n  seed: 9\n");
    EXPECT_EQ(cfg.env.n_obstacles, 4);
    EXPECT_EQ(cfg.env.max_steps, 100);
    EXPECT_DOUBLE_EQ(cfg.env.d_max, std::hypot(60.0, 40.0));
    EXPECT_EQ(cfg.train.seed, 9u);
}

TEST(Config, WorkspaceChangeResetsDmax) {
    const auto cfg = parse_run_config(
        "env:\n  workspace: [[0, 0], [30, 0], [30, 20], [0, 20]]\n  entry_gate: [[0, 12], [0, 8]]\n"
        "  exit_gate: [[30, 8], [30, 12]]\n  n_obstacles: 1\n");
    EXPECT_DOUBLE_EQ(cfg.env.d_max, std::hypot(30.0, 20.0));
}

TEST(Config, UnknownKeysAndBadValuesAreErrors) {
    EXPECT_THROW(parse_run_config("env:\n  n_obstacle: 3\n"), std::invalid_argument);
    EXPECT_THROW(parse_run_config("planner:\n  alpha: 1\n"), std::invalid_argument);
    EXPECT_THROW(parse_run_config("env:\n  preset: huge\n"), std::invalid_argument);
    EXPECT_THROW(parse_run_config("train:\n  gamma: 1.5\n"), std::invalid_argument);
    EXPECT_THROW(parse_run_config("dwa:\n  beta: -1\n"), std::invalid_argument);
    EXPECT_THROW(parse_run_config("env:\n  max_steps: lots\n"), std::invalid_argument);
    EXPECT_THROW(parse_run_config("tune:\n  beta: []\n"), std::invalid_argument);
}

TEST(Config, ShippedFilesLoad) {
    for (const char* name : {"default.yaml", "reduced.yaml"}) {
        const auto cfg = load_run_config(std::string(UWNAV_SOURCE_DIR) + "/configs/" + name);
        EXPECT_EQ(cfg.env.observation_size(), 84u);
    }
    EXPECT_EQ(to_yaml(load_run_config(std::string(UWNAV_SOURCE_DIR) + "/configs/default.yaml")),
              to_yaml(RunConfig{}));
}
