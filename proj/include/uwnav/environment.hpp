#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "uwnav/env_config.hpp"
#include "uwnav/geometry.hpp"

namespace uwnav {

inline constexpr int kNumActions = 7;

/// Heading deltas indexed by action id: a0 = -pi/4 ... a3 = 0 ... a6 = +pi/4.
inline constexpr std::array<double, kNumActions> kActionDeltas = {
    -kPi / 4.0, -kPi / 6.0, -kPi / 12.0, 0.0, kPi / 12.0, kPi / 6.0, kPi / 4.0};

inline constexpr int kHoldHeadingAction = 3;

enum class TerminalCause { running, success, collision, out_of_track, timeout };

std::string_view to_string(TerminalCause cause);
TerminalCause parse_terminal_cause(std::string_view text);

inline constexpr std::array<double, 3> kMilestones = {0.25, 0.50, 0.75};

struct EnvState {
    Pose2D pose;
    std::vector<CircleObstacle> obstacles;
    double progress = 0.0;
    std::array<bool, 3> milestones_passed{};
    int step_count = 0;
    bool done = false;
    TerminalCause cause = TerminalCause::running;
};

struct StepOutcome {
    std::vector<double> observation;
    double reward = 0.0;
    bool done = false;
    TerminalCause cause = TerminalCause::running;
    double progress = 0.0;
    double clearance = 0.0;
    Vec2 position;
};

class PlacementError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr int kMaxPlacementAttempts = 10000;

/// Rejection-samples the layout for `seed`. Draw order per attempt is
/// (radius, x, y), each from Rng::uniform.
std::vector<CircleObstacle> sample_obstacles(std::uint64_t seed, const EnvConfig& cfg);

std::uint64_t layout_hash(std::span<const CircleObstacle> obstacles);
std::uint64_t observation_hash(std::span<const double> observation);

struct GoalFeatures {
    double distance;  // d_g in [0, 1]
    double angle;     // |wrapped bearing error| / pi in [0, 1]
};

GoalFeatures goal_features(const Pose2D& pose, const Gate& exit_gate, double d_max);

/// Relative bearing of grid column k, evenly spread over [-pi/4, pi/4].
double grid_bearing(int k, int grid_angles);

/// n*p cells, distance-major. A cell is set when the probe segment covering its
/// distance band along its bearing touches an obstacle inflated by r_robot + margin.
std::vector<double> occupancy_grid(const Pose2D& pose, std::span<const CircleObstacle> obstacles,
                                   const EnvConfig& cfg);

/// q normalised boundary distances at body bearings 2*pi*l/q. Rays from a pose
/// outside the workspace read 0.
std::vector<double> ray_features(const Pose2D& pose, const Quadrilateral& workspace,
                                 const EnvConfig& cfg);

std::vector<double> build_observation(const EnvState& state, const EnvConfig& cfg);

/// Throws std::out_of_range for an action outside 0..6.
Pose2D apply_action(const Pose2D& pose, int action, double step_length);

/// Projection onto the entry->exit axis, normalised and clamped to [0, 1].
double progress(Vec2 position, const Gate& entry_gate, const Gate& exit_gate);

/// Piecewise step reward for a transition; `next` already carries the terminal
/// cause, the new progress and the updated milestone set.
double reward(const EnvState& prev, const EnvState& next, const RewardConfig& cfg);

/// Minimal episodic interface the learner trains against.
class EpisodicEnv {
public:
    virtual ~EpisodicEnv() = default;
    virtual std::vector<double> reset(std::uint64_t seed) = 0;
    virtual StepOutcome step(int action) = 0;
    virtual std::size_t observation_size() const = 0;
};

class NavigationEnv final : public EpisodicEnv {
public:
    explicit NavigationEnv(EnvConfig cfg);

    std::vector<double> reset(std::uint64_t seed) override;
    /// Starts an episode on a fixed layout (scenario replay, overrides).
    std::vector<double> reset_with_layout(std::vector<CircleObstacle> obstacles,
                                          std::uint64_t seed = 0);
    /// Throws std::logic_error once the episode is done.
    StepOutcome step(int action) override;
    std::size_t observation_size() const override { return cfg_.observation_size(); }

    std::vector<double> observation() const { return build_observation(state_, cfg_); }
    const EnvState& state() const { return state_; }
    const EnvConfig& config() const { return cfg_; }
    std::uint64_t seed() const { return seed_; }
    Vec2 goal() const { return cfg_.exit_gate.center(); }

private:
    EnvConfig cfg_;
    EnvState state_;
    std::uint64_t seed_ = 0;
    bool started_ = false;
};

struct EpisodeStep {
    int action = 0;
    Pose2D pose;  // pose after the step
    double reward = 0.0;
    double progress = 0.0;
    std::uint64_t observation_hash = 0;
};

struct EpisodeRecord {
    std::uint64_t seed = 0;
    std::uint64_t layout_hash = 0;
    Pose2D start;
    std::vector<CircleObstacle> obstacles;
    std::vector<EpisodeStep> steps;
    TerminalCause cause = TerminalCause::running;
    double total_return = 0.0;

    int step_count() const { return static_cast<int>(steps.size()); }
};

using EnvPolicy = std::function<int(const std::vector<double>& observation, const NavigationEnv& env)>;

/// Runs `policy` from the env's current (freshly reset) state until terminal.
EpisodeRecord record_episode(NavigationEnv& env, const EnvPolicy& policy);

/// Re-simulates a record from its layout and action list.
EpisodeRecord replay_actions(const EnvConfig& cfg, std::vector<CircleObstacle> obstacles,
                             std::uint64_t seed, std::span<const int> actions);

}  // namespace uwnav
