#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "uwnav/dwa.hpp"
#include "uwnav/rng.hpp"

using namespace uwnav;
using namespace uwnav::dwa;

namespace {

std::vector<CircleObstacle> random_obstacles(Rng& rng, Vec2 around, int n) {
    std::vector<CircleObstacle> obs;
    for (int i = 0; i < n; ++i) {
        obs.push_back({{around.x + rng.uniform(-6, 6), around.y + rng.uniform(-6, 6)}, rng.uniform(0.2, 2.5)});
    }
    return obs;
}

}  // namespace

TEST(Dwa, Predict) {
    const Pose2D p{{1, 2}, 0.0};
    const Vec2 a = predict(p, 0.0, 2.0);
    EXPECT_DOUBLE_EQ(a.x, 3.0);
    EXPECT_DOUBLE_EQ(a.y, 2.0);
    const Vec2 b = predict(p, kPi / 2, 1.0);
    EXPECT_NEAR(b.x, 1.0, 1e-15);
    EXPECT_DOUBLE_EQ(b.y, 3.0);
    Rng rng(1);
    for (int i = 0; i < 1000; ++i) {
        const Pose2D q{{rng.uniform(-9, 9), rng.uniform(-9, 9)}, rng.uniform(-kPi, kPi)};
        const double d = rng.uniform(0, 3);
        EXPECT_NEAR(distance(predict(q, rng.uniform(-1, 1), d), q.position), d, 1e-12);
    }
}

TEST(Dwa, GoalCostAndClearanceScore) {
    EXPECT_DOUBLE_EQ(goal_cost({3, 4}, {0, 0}), 5.0);
    EXPECT_DOUBLE_EQ(goal_cost({7, 7}, {7, 7}), 0.0);
    EXPECT_DOUBLE_EQ(clearance_score(10.0, 5.0), 1.0);
    EXPECT_DOUBLE_EQ(clearance_score(2.5, 5.0), 0.5);
    EXPECT_DOUBLE_EQ(clearance_score(kNoObstacleClearance, 5.0), 1.0);
}

TEST(Dwa, WeightCollapse) {
    ScoredCandidate c;
    c.predicted = {3, 4};
    c.distance = 1.0;
    c.clearance = kNoObstacleClearance;
    EXPECT_DOUBLE_EQ(total_score(c, {0, 0}, {1, 0, 0}, 5.0), -5.0);
    EXPECT_DOUBLE_EQ(total_score(c, {0, 0}, {0, 1, 0}, 5.0), 1.0);
    EXPECT_DOUBLE_EQ(total_score(c, {0, 0}, {0, 0, 2}, 5.0), 2.0);
}

TEST(Dwa, OpenFieldGoalAheadTakesLongestStraightStep) {
    DwaConfig cfg;
    cfg.gamma = 0.0;
    const auto cmd = select({{0, 0}, 0.0}, {50, 0}, {}, cfg);
    ASSERT_TRUE(cmd.has_value());
    EXPECT_EQ(cmd->delta_theta, 0.0);
    EXPECT_EQ(cmd->distance, 1.5);
}

TEST(Dwa, EnclosedIsInfeasible) {
    std::vector<CircleObstacle> ring;
    for (int i = 0; i < 16; ++i) ring.push_back({unit_from_angle(kTwoPi * i / 16) * 1.5, 0.6});
    EXPECT_FALSE(select({{0, 0}, 0.0}, {50, 0}, ring, DwaConfig{}).has_value());
}

TEST(Dwa, SelectMatchesExhaustiveArgmax) {
    Rng rng(2);
    for (int scene = 0; scene < 1000; ++scene) {
        DwaConfig cfg;
        cfg.alpha = rng.uniform(0, 3);
        cfg.beta = rng.uniform(0, 3);
        cfg.gamma = rng.uniform(0, 3);
        const Pose2D pose{{0, 0}, rng.uniform(-kPi, kPi)};
        const Vec2 goal{rng.uniform(-30, 30), rng.uniform(-30, 30)};
        const auto obs = random_obstacles(rng, pose.position, static_cast<int>(rng.below(6)));

        // Oracle: recompute every score from scratch, keep the first maximum in angle-major order.
        std::optional<Command> best;
        double best_score = 0.0;
        for (double a : cfg.angle_candidates) {
            for (double d : cfg.distance_candidates) {
                const Vec2 x = pose.position + unit_from_angle(pose.heading + a) * d;
                double delta = kNoObstacleClearance;
                for (const auto& o : obs) delta = std::min(delta, distance(x, o.center) - o.radius - 0.5 - 0.5);
                if (delta <= 0) continue;
                const double j = -cfg.alpha * distance(x, goal) + cfg.beta * std::min(1.0, delta / cfg.d_max) +
                                 cfg.gamma * d;
                if (!best || j > best_score) {
                    best = Command{a, d};
                    best_score = j;
                }
            }
        }
        const auto got = select(pose, goal, obs, cfg);
        ASSERT_EQ(got.has_value(), best.has_value());
        if (got) {
            EXPECT_EQ(got->delta_theta, best->delta_theta);
            EXPECT_EQ(got->distance, best->distance);
        }
    }
}

TEST(Dwa, TieBreakPrefersLowestIndices) {
    DwaConfig cfg;
    cfg.alpha = cfg.beta = cfg.gamma = 0.0;  // every feasible candidate scores 0
    const auto cmd = select({{0, 0}, 0.0}, {10, 0}, {}, cfg);
    ASSERT_TRUE(cmd.has_value());
    EXPECT_EQ(cmd->delta_theta, cfg.angle_candidates.front());
    EXPECT_EQ(cmd->distance, cfg.distance_candidates.front());
}

TEST(Dwa, NeverReturnsInadmissibleCandidate) {
    Rng rng(3);
    for (int scene = 0; scene < 1000; ++scene) {
        const Pose2D pose{{0, 0}, rng.uniform(-kPi, kPi)};
        const auto obs = random_obstacles(rng, pose.position, 1 + static_cast<int>(rng.below(8)));
        DwaConfig cfg;
        const auto cmd = select(pose, {20, 5}, obs, cfg);
        if (!cmd) continue;
        EXPECT_GT(min_clearance(predict(pose, cmd->delta_theta, cmd->distance), obs, 0.5, 0.5), 0.0);
    }
}

TEST(Dwa, ArgmaxInvariantUnderJointScaling) {
    Rng rng(4);
    for (int scene = 0; scene < 500; ++scene) {
        DwaConfig cfg;
        cfg.alpha = rng.uniform(0.1, 2);
        cfg.beta = rng.uniform(0.1, 2);
        cfg.gamma = rng.uniform(0.1, 2);
        const Pose2D pose{{0, 0}, rng.uniform(-kPi, kPi)};
        const auto obs = random_obstacles(rng, pose.position, 4);
        const Vec2 goal{rng.uniform(-30, 30), rng.uniform(-30, 30)};
        auto scaled = cfg;
        const double k = 4.0;  // power of two keeps every product exact
        scaled.alpha *= k;
        scaled.beta *= k;
        scaled.gamma *= k;
        const auto a = select(pose, goal, obs, cfg);
        const auto b = select(pose, goal, obs, scaled);
        ASSERT_EQ(a.has_value(), b.has_value());
        if (a) {
            EXPECT_EQ(a->delta_theta, b->delta_theta);
            EXPECT_EQ(a->distance, b->distance);
        }
    }
}

TEST(Dwa, PureGoalSeekingMinimisesDistance) {
    DwaConfig cfg;
    cfg.beta = cfg.gamma = 0.0;
    Rng rng(5);
    for (int i = 0; i < 200; ++i) {
        const Pose2D pose{{0, 0}, rng.uniform(-kPi, kPi)};
        const Vec2 goal{rng.uniform(-30, 30), rng.uniform(-30, 30)};
        const auto cmd = select(pose, goal, {}, cfg);
        ASSERT_TRUE(cmd.has_value());
        const double chosen = distance(predict(pose, cmd->delta_theta, cmd->distance), goal);
        for (const auto& c : score_candidates(pose, goal, {}, cfg)) EXPECT_LE(chosen, distance(c.predicted, goal));
    }
}

TEST(Dwa, NearestAction) {
    for (int a = 0; a < kNumActions; ++a) EXPECT_EQ(nearest_action(kActionDeltas[static_cast<std::size_t>(a)]), a);
    EXPECT_EQ(nearest_action(0.1), 3);
    EXPECT_EQ(nearest_action(2.0), 6);
    EXPECT_EQ(nearest_action(-2.0), 0);
}

TEST(Dwa, EmptyFieldEpisodeIsStraightLine) {
    const auto env_cfg = EnvConfig::defaults();
    NavigationEnv env(env_cfg);
    env.reset_with_layout({});
    const auto rec = dwa_episode(env, with_env(DwaConfig{}, env_cfg));
    EXPECT_EQ(rec.cause, TerminalCause::success);
    EXPECT_EQ(rec.step_count(), 100);
    for (const auto& s : rec.steps) EXPECT_EQ(s.action, 3);
}

TEST(Dwa, EpisodeIsDeterministicAndDumpsCandidates) {
    const auto env_cfg = EnvConfig::defaults();
    const auto cfg = with_env(DwaConfig{}, env_cfg);
    NavigationEnv a(env_cfg), b(env_cfg);
    a.reset(77);
    b.reset(77);
    std::ostringstream dump;
    const auto ra = dwa_episode(a, cfg, &dump);
    const auto rb = dwa_episode(b, cfg);
    ASSERT_EQ(ra.steps.size(), rb.steps.size());
    for (std::size_t i = 0; i < ra.steps.size(); ++i) EXPECT_EQ(ra.steps[i].action, rb.steps[i].action);
    std::size_t lines = 0;
    for (char ch : dump.str()) lines += ch == '\n';
    EXPECT_EQ(lines, 1 + ra.steps.size() * 21);
}

TEST(Dwa, WallAcrossTrackNeverSucceeds) {
    auto env_cfg = EnvConfig::defaults();
    std::vector<CircleObstacle> wall;
    for (double y = 0.0; y <= 50.0; y += 2.0) wall.push_back({{50, y}, 1.5});
    for (double beta : {0.5, 2.0, 4.0}) {
        DwaConfig cfg = with_env(DwaConfig{}, env_cfg);
        cfg.beta = beta;
        NavigationEnv env(env_cfg);
        env.reset_with_layout(wall);
        const auto rec = dwa_episode(env, cfg);
        EXPECT_NE(rec.cause, TerminalCause::success);
    }
}

TEST(Dwa, ConfigValidation) {
    DwaConfig cfg;
    cfg.d_max = 0;
    EXPECT_THROW(cfg.validate(), std::invalid_argument);
    cfg = DwaConfig{};
    cfg.beta = -1;
    EXPECT_THROW(cfg.validate(), std::invalid_argument);
    cfg = DwaConfig{};
    cfg.distance_candidates.clear();
    EXPECT_THROW(cfg.validate(), std::invalid_argument);
}
