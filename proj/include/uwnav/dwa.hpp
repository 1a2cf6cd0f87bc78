#pragma once

#include <optional>
#include <ostream>
#include <span>
#include <vector>

#include "uwnav/environment.hpp"
#include "uwnav/geometry.hpp"

namespace uwnav::dwa {

struct DwaConfig {
    std::vector<double> angle_candidates{kActionDeltas.begin(), kActionDeltas.end()};
    std::vector<double> distance_candidates{0.5, 1.0, 1.5};
    double alpha = 1.0;  // goal attraction
    double beta = 2.0;   // clearance
    double gamma = 0.5;  // progress
    double d_max = 5.0;  // clearance normaliser
    double r_robot = 0.5;
    double safety_margin = 0.5;

    void validate() const;
};

struct ScoredCandidate {
    std::size_t angle_index = 0;
    std::size_t distance_index = 0;
    double delta_theta = 0.0;
    double distance = 0.0;
    Vec2 predicted;
    double clearance = 0.0;
    double score = 0.0;  // only meaningful when feasible
    bool feasible = false;
};

struct Command {
    double delta_theta;
    double distance;
};

Vec2 predict(const Pose2D& pose, double delta_theta, double distance);
double goal_cost(Vec2 predicted, Vec2 goal);
double clearance_score(double clearance, double d_max);

struct Weights {
    double alpha, beta, gamma;
};

/// J = -alpha * C_goal + beta * S_clear + gamma * d for a feasible candidate.
double total_score(const ScoredCandidate& candidate, Vec2 goal, Weights weights, double d_max);

/// Every (angle, distance) pair in angle-major order. Clearance is measured at
/// the predicted endpoint only.
std::vector<ScoredCandidate> score_candidates(const Pose2D& pose, Vec2 goal,
                                              std::span<const CircleObstacle> obstacles,
                                              const DwaConfig& cfg);

/// Feasible argmax of J; ties go to the lowest angle index, then the lowest
/// distance index. nullopt when every candidate is rejected.
std::optional<Command> select(const Pose2D& pose, Vec2 goal, std::span<const CircleObstacle> obstacles,
                              const DwaConfig& cfg);

/// Action whose heading delta is nearest `delta_theta` (lowest index on ties).
int nearest_action(double delta_theta);

/// Drives a freshly reset env to termination. An infeasible planner output
/// holds heading. When `candidate_dump` is set, every scored candidate is
/// written as a CSV row.
EpisodeRecord dwa_episode(NavigationEnv& env, const DwaConfig& cfg, std::ostream* candidate_dump = nullptr);

/// Copies r_robot and safety_margin from the environment.
DwaConfig with_env(DwaConfig cfg, const EnvConfig& env);

}  // namespace uwnav::dwa
