#include <gtest/gtest.h>

#include <cmath>

#include "uwnav/environment.hpp"
#include "uwnav/rng.hpp"

using namespace uwnav;

namespace {

EnvState running_state(double progress, std::array<bool, 3> milestones = {}) {
    EnvState s;
    s.progress = progress;
    s.milestones_passed = milestones;
    return s;
}

}  // namespace

TEST(EnvConfig, DefaultsAndObservationSize) {
    const auto cfg = EnvConfig::defaults();
    EXPECT_EQ(cfg.observation_size(), 84u);
    EXPECT_DOUBLE_EQ(cfg.d_max, std::hypot(100.0, 50.0));
    EXPECT_DOUBLE_EQ(cfg.inflation(), 1.0);
    EXPECT_NO_THROW(cfg.validate());
    EXPECT_EQ(EnvConfig::reduced().observation_size(), 84u);
}

TEST(EnvConfig, ValidationRejectsBadValues) {
    auto cfg = EnvConfig::defaults();
    cfg.step_length = 0;
    EXPECT_THROW(cfg.validate(), std::invalid_argument);
    cfg = EnvConfig::defaults();
    cfg.obstacle_radius_min = 6;
    EXPECT_THROW(cfg.validate(), std::invalid_argument);
    cfg = EnvConfig::defaults();
    cfg.exit_gate = Gate{{50, 20}, {50, 30}};  // not on the boundary
    EXPECT_THROW(cfg.validate(), std::invalid_argument);
}

TEST(Sampling, SameSeedSameLayout) {
    const auto cfg = EnvConfig::defaults();
    const auto a = sample_obstacles(17, cfg);
    const auto b = sample_obstacles(17, cfg);
    ASSERT_EQ(a.size(), 10u);
    EXPECT_EQ(layout_hash(a), layout_hash(b));
    EXPECT_NE(layout_hash(a), layout_hash(sample_obstacles(18, cfg)));
}

TEST(Sampling, LayoutsRespectPlacementRules) {
    const auto cfg = EnvConfig::defaults();
    const double infl = cfg.inflation();
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        const auto obs = sample_obstacles(seed, cfg);
        for (std::size_t i = 0; i < obs.size(); ++i) {
            const auto& c = obs[i];
            EXPECT_GE(c.radius, cfg.obstacle_radius_min);
            EXPECT_LE(c.radius, cfg.obstacle_radius_max);
            EXPECT_GE(c.center.x - c.radius, 0.0);
            EXPECT_LE(c.center.x + c.radius, 100.0);
            EXPECT_GE(c.center.y - c.radius, 0.0);
            EXPECT_LE(c.center.y + c.radius, 50.0);
            for (auto g : {cfg.entry_gate.center(), cfg.exit_gate.center()}) {
                EXPECT_GE(distance(g, c.center) - c.radius - infl, 2 * cfg.r_robot + cfg.step_length);
            }
            for (std::size_t j = 0; j < i; ++j) {
                EXPECT_GE(distance(obs[j].center, c.center),
                          obs[j].radius + c.radius + 2 * infl + cfg.step_length);
            }
        }
    }
}

TEST(Sampling, CrowdedWorkspaceThrows) {
    auto cfg = EnvConfig::defaults();
    cfg.n_obstacles = 200;
    EXPECT_THROW(sample_obstacles(1, cfg), PlacementError);
}

TEST(GoalFeatures, FacingGoal) {
    const auto cfg = EnvConfig::defaults();
    const auto f = goal_features({{0, 25}, 0.0}, cfg.exit_gate, cfg.d_max);
    EXPECT_DOUBLE_EQ(f.distance, 100.0 / cfg.d_max);
    EXPECT_DOUBLE_EQ(f.angle, 0.0);
    const auto back = goal_features({{0, 25}, kPi / 2}, cfg.exit_gate, cfg.d_max);
    EXPECT_DOUBLE_EQ(back.angle, 0.5);
}

TEST(OccupancyGrid, EmptyAndSingleObstacle) {
    const auto cfg = EnvConfig::defaults();
    const Pose2D pose{{20, 25}, 0.0};
    for (double v : occupancy_grid(pose, {}, cfg)) EXPECT_EQ(v, 0.0);

    // Obstacle dead ahead at 5.5 m, radius 0.5, inflated to 1.5: spans 4..7 m on the centre
    // column. Touching a band edge counts, so bands 3 through 7 are set.
    const std::vector<CircleObstacle> obs{{{25.5, 25}, 0.5}};
    const auto g = occupancy_grid(pose, obs, cfg);
    const int p = cfg.grid_angles;
    for (int j = 0; j < cfg.grid_distances; ++j) {
        EXPECT_EQ(g[static_cast<std::size_t>(j * p + 3)], (j >= 3 && j <= 7) ? 1.0 : 0.0) << j;
    }
    EXPECT_EQ(g[static_cast<std::size_t>(5 * p + 0)], 0.0);
}

TEST(OccupancyGrid, BearingsMatchActions) {
    for (int k = 0; k < kNumActions; ++k) EXPECT_NEAR(grid_bearing(k, 7), kActionDeltas[static_cast<std::size_t>(k)], 1e-15);
}

TEST(Rays, CentreOfWorkspace) {
    const auto cfg = EnvConfig::defaults();
    const auto r = ray_features({{50, 25}, 0.0}, cfg.workspace, cfg);
    ASSERT_EQ(r.size(), 12u);
    EXPECT_DOUBLE_EQ(r[0], 1.0);         // 50 m ahead, saturates
    EXPECT_DOUBLE_EQ(r[3], 25.0 / 50.0);  // +90 degrees
    EXPECT_DOUBLE_EQ(r[6], 1.0);
    EXPECT_DOUBLE_EQ(r[9], 0.5);
    for (double v : ray_features({{-1, 25}, 0.0}, cfg.workspace, cfg)) EXPECT_EQ(v, 0.0);
}

TEST(Actions, ApplyAndRange) {
    const Pose2D p{{0, 0}, 0.0};
    const auto q = apply_action(p, 6, 1.0);
    EXPECT_DOUBLE_EQ(q.heading, kPi / 4);
    EXPECT_NEAR(q.position.x, std::sqrt(0.5), 1e-15);
    EXPECT_THROW(apply_action(p, 7, 1.0), std::out_of_range);
    EXPECT_THROW(apply_action(p, -1, 1.0), std::out_of_range);
}

TEST(Progress, ProjectionClamped) {
    const auto cfg = EnvConfig::defaults();
    EXPECT_DOUBLE_EQ(progress({0, 25}, cfg.entry_gate, cfg.exit_gate), 0.0);
    EXPECT_DOUBLE_EQ(progress({50, 10}, cfg.entry_gate, cfg.exit_gate), 0.5);
    EXPECT_DOUBLE_EQ(progress({-5, 25}, cfg.entry_gate, cfg.exit_gate), 0.0);
    EXPECT_DOUBLE_EQ(progress({120, 25}, cfg.entry_gate, cfg.exit_gate), 1.0);
}

TEST(Reward, TerminalBranches) {
    const RewardConfig rc;
    const auto prev = running_state(0.3);
    auto next = running_state(0.4);
    next.cause = TerminalCause::collision;
    EXPECT_EQ(reward(prev, next, rc), -10.0);
    next.cause = TerminalCause::out_of_track;
    EXPECT_EQ(reward(prev, next, rc), -10.0);
    next.cause = TerminalCause::success;
    EXPECT_EQ(reward(prev, next, rc), 10.0);
    next.cause = TerminalCause::timeout;
    EXPECT_EQ(reward(prev, next, rc), 0.0);
}

TEST(Reward, ProgressAndMilestones) {
    const RewardConfig rc;
    EXPECT_DOUBLE_EQ(reward(running_state(0.1), running_state(0.2), rc), 0.07 * 0.2);
    EXPECT_EQ(reward(running_state(0.2), running_state(0.2), rc), 0.0);
    EXPECT_EQ(reward(running_state(0.3), running_state(0.2), rc), 0.0);
    // Every combination of newly crossed milestones.
    for (int mask = 0; mask < 8; ++mask) {
        std::array<bool, 3> after{};
        double expected = 0.07 * 0.8;
        for (int i = 0; i < 3; ++i) {
            after[static_cast<std::size_t>(i)] = true;
            if (mask & (1 << i)) continue;  // already passed before
            expected += 1.0;
        }
        std::array<bool, 3> before{};
        for (int i = 0; i < 3; ++i) before[static_cast<std::size_t>(i)] = mask & (1 << i);
        EXPECT_DOUBLE_EQ(reward(running_state(0.7, before), running_state(0.8, after), rc), expected) << mask;
    }
}

TEST(Environment, StepBeforeResetAndAfterDone) {
    NavigationEnv env(EnvConfig::defaults());
    EXPECT_THROW(env.step(3), std::logic_error);
    env.reset_with_layout({});
    // Turn hard left until the vehicle leaves through the top edge.
    StepOutcome out;
    do out = env.step(6);
    while (!out.done);
    EXPECT_THROW(env.step(3), std::logic_error);
}

TEST(Environment, StraightRunSucceedsAndPaysMilestonesOnce) {
    NavigationEnv env(EnvConfig::defaults());
    env.reset_with_layout({});
    EXPECT_DOUBLE_EQ(env.state().pose.heading, 0.0);
    double total = 0.0, prog_sum = 0.0;
    StepOutcome out;
    int steps = 0;
    do {
        out = env.step(3);
        total += out.reward;
        if (!out.done) prog_sum += out.progress;
        ++steps;
    } while (!out.done);
    EXPECT_EQ(out.cause, TerminalCause::success);
    EXPECT_EQ(steps, 100);
    EXPECT_NEAR(total, 0.07 * prog_sum + 3.0 + 10.0, 1e-9);
}

TEST(Environment, CollisionBeatsSuccessOnSameStep) {
    auto cfg = EnvConfig::defaults();
    NavigationEnv env(cfg);
    env.reset_with_layout({{{99.8, 25}, 0.1}});
    StepOutcome out;
    do out = env.step(3);
    while (!out.done);
    EXPECT_EQ(out.cause, TerminalCause::collision);
}

TEST(Environment, TimeoutAtMaxSteps) {
    auto cfg = EnvConfig::defaults();
    cfg.max_steps = 5;
    NavigationEnv env(cfg);
    env.reset_with_layout({});
    StepOutcome out;
    int n = 0;
    do {
        out = env.step(3);
        ++n;
    } while (!out.done);
    EXPECT_EQ(n, 5);
    EXPECT_EQ(out.cause, TerminalCause::timeout);
    EXPECT_EQ(out.reward, 0.0);
}

TEST(Environment, ObservationContractOnRandomRollouts) {
    NavigationEnv env(EnvConfig::defaults());
    Rng rng(9);
    for (int ep = 0; ep < 20; ++ep) {
        auto obs = env.reset(rng.next_u64());
        ASSERT_EQ(obs.size(), 84u);
        bool done = false;
        while (!done) {
            for (double v : obs) {
                EXPECT_GE(v, 0.0);
                EXPECT_LE(v, 1.0);
            }
            auto out = env.step(static_cast<int>(rng.below(7)));
            obs = out.observation;
            done = out.done;
        }
    }
}

TEST(Replay, ActionsReproduceRecord) {
    const auto cfg = EnvConfig::defaults();
    NavigationEnv env(cfg);
    env.reset(123);
    Rng rng(1);
    const auto rec = record_episode(env, [&](const std::vector<double>&, const NavigationEnv&) {
        return static_cast<int>(rng.below(7));
    });
    std::vector<int> actions;
    for (const auto& s : rec.steps) actions.push_back(s.action);
    const auto again = replay_actions(cfg, rec.obstacles, rec.seed, actions);
    ASSERT_EQ(again.steps.size(), rec.steps.size());
    for (std::size_t i = 0; i < rec.steps.size(); ++i) {
        EXPECT_EQ(again.steps[i].observation_hash, rec.steps[i].observation_hash);
        EXPECT_EQ(again.steps[i].pose.position, rec.steps[i].pose.position);
    }
    EXPECT_EQ(again.cause, rec.cause);
    actions.pop_back();
    EXPECT_THROW(replay_actions(cfg, rec.obstacles, rec.seed, actions), std::runtime_error);
}

TEST(TerminalCause, TextRoundTrip) {
    for (auto c : {TerminalCause::running, TerminalCause::success, TerminalCause::collision,
                   TerminalCause::out_of_track, TerminalCause::timeout}) {
        EXPECT_EQ(parse_terminal_cause(to_string(c)), c);
    }
    EXPECT_THROW(parse_terminal_cause("crashed"), std::invalid_argument);
}
