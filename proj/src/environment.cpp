#include "uwnav/environment.hpp"

#include <algorithm>
#include <string>

#include "uwnav/rng.hpp"

namespace uwnav {

std::string_view to_string(TerminalCause cause) {
    switch (cause) {
        case TerminalCause::running: return "running";
        case TerminalCause::success: return "success";
        case TerminalCause::collision: return "collision";
        case TerminalCause::out_of_track: return "out_of_track";
        case TerminalCause::timeout: return "timeout";
    }
    return "running";
}

TerminalCause parse_terminal_cause(std::string_view text) {
    for (auto c : {TerminalCause::running, TerminalCause::success, TerminalCause::collision,
                   TerminalCause::out_of_track, TerminalCause::timeout}) {
        if (to_string(c) == text) return c;
    }
    throw std::invalid_argument("unknown terminal cause '" + std::string(text) + "'");
}

namespace {

struct Bounds {
    double min_x, max_x, min_y, max_y;
};

Bounds bounds_of(const Quadrilateral& q) {
    Bounds b{q.vertex(0).x, q.vertex(0).x, q.vertex(0).y, q.vertex(0).y};
    for (const auto& v : q.vertices()) {
        b.min_x = std::min(b.min_x, v.x);
        b.max_x = std::max(b.max_x, v.x);
        b.min_y = std::min(b.min_y, v.y);
        b.max_y = std::max(b.max_y, v.y);
    }
    return b;
}

bool circle_inside(const CircleObstacle& c, const Quadrilateral& q) {
    if (!point_in_quad(c.center, q)) return false;
    for (std::size_t i = 0; i < 4; ++i) {
        const Vec2 a = q.vertex(i), b = q.vertex(i + 1);
        const Vec2 edge = b - a;
        if (cross(edge, c.center - a) / norm(edge) < c.radius) return false;
    }
    return true;
}

}  // namespace

std::vector<CircleObstacle> sample_obstacles(std::uint64_t seed, const EnvConfig& cfg) {
    std::vector<CircleObstacle> out;
    if (cfg.n_obstacles <= 0) return out;
    out.reserve(static_cast<std::size_t>(cfg.n_obstacles));

    Rng rng(seed);
    const Bounds box = bounds_of(cfg.workspace);
    const double inflation = cfg.inflation();
    const double gate_keepout = 2.0 * cfg.r_robot + cfg.step_length;
    const std::array<Vec2, 2> gate_centers = {cfg.entry_gate.center(), cfg.exit_gate.center()};

    int attempts = 0;
    while (static_cast<int>(out.size()) < cfg.n_obstacles) {
        if (++attempts > kMaxPlacementAttempts) {
            throw PlacementError("could not place " + std::to_string(cfg.n_obstacles) +
                                 " obstacles after " + std::to_string(kMaxPlacementAttempts) +
                                 " attempts; workspace too crowded");
        }
        CircleObstacle c;
        c.radius = rng.uniform(cfg.obstacle_radius_min, cfg.obstacle_radius_max);
        c.center.x = rng.uniform(box.min_x, box.max_x);
        c.center.y = rng.uniform(box.min_y, box.max_y);

        if (!circle_inside(c, cfg.workspace)) continue;
        const bool separated = std::all_of(out.begin(), out.end(), [&](const CircleObstacle& o) {
            return distance(o.center, c.center) >=
                   o.radius + c.radius + 2.0 * inflation + cfg.step_length;
        });
        if (!separated) continue;
        const bool gates_clear = std::all_of(gate_centers.begin(), gate_centers.end(), [&](Vec2 g) {
            return distance(g, c.center) - c.radius - inflation >= gate_keepout;
        });
        if (!gates_clear) continue;
        out.push_back(c);
    }
    return out;
}

std::uint64_t layout_hash(std::span<const CircleObstacle> obstacles) {
    Fnv1a h;
    h.add(static_cast<std::uint64_t>(obstacles.size()));
    for (const auto& o : obstacles) {
        h.add(o.center.x);
        h.add(o.center.y);
        h.add(o.radius);
    }
    return h.value();
}

std::uint64_t observation_hash(std::span<const double> observation) {
    Fnv1a h;
    for (double v : observation) h.add(v);
    return h.value();
}

GoalFeatures goal_features(const Pose2D& pose, const Gate& exit_gate, double d_max) {
    const Vec2 g = exit_gate.center();
    const Vec2 to_goal = g - pose.position;
    const double d = std::min(1.0, norm(to_goal) / d_max);
    const double bearing_error = wrap_angle(std::atan2(to_goal.y, to_goal.x) - pose.heading);
    return {d, std::min(1.0, std::abs(bearing_error) / kPi)};
}

double grid_bearing(int k, int grid_angles) {
    if (grid_angles == 1) return 0.0;
    return -kPi / 4.0 + (kPi / 2.0) * static_cast<double>(k) / static_cast<double>(grid_angles - 1);
}

std::vector<double> occupancy_grid(const Pose2D& pose, std::span<const CircleObstacle> obstacles,
                                   const EnvConfig& cfg) {
    const int n = cfg.grid_distances;
    const int p = cfg.grid_angles;
    std::vector<double> grid(static_cast<std::size_t>(n * p), 0.0);
    if (obstacles.empty()) return grid;

    const double band = cfg.grid_range / n;
    const double inflation = cfg.inflation();
    for (int k = 0; k < p; ++k) {
        const Vec2 dir = unit_from_angle(pose.heading + grid_bearing(k, p));
        for (int j = 0; j < n; ++j) {
            const Vec2 a = pose.position + dir * (band * j);
            const Vec2 b = pose.position + dir * (band * (j + 1));
            for (const auto& o : obstacles) {
                if (segment_hits_circle(a, b, o, inflation)) {
                    grid[static_cast<std::size_t>(j * p + k)] = 1.0;
                    break;
                }
            }
        }
    }
    return grid;
}

std::vector<double> ray_features(const Pose2D& pose, const Quadrilateral& workspace,
                                 const EnvConfig& cfg) {
    std::vector<double> rays(static_cast<std::size_t>(cfg.ray_count), 0.0);
    for (int l = 0; l < cfg.ray_count; ++l) {
        const double bearing = kTwoPi * static_cast<double>(l) / cfg.ray_count;
        const auto hit = ray_quad_intersect(pose.position, unit_from_angle(pose.heading + bearing), workspace);
        if (hit) rays[static_cast<std::size_t>(l)] = std::min(*hit, cfg.ray_max) / cfg.ray_max;
    }
    return rays;
}

std::vector<double> build_observation(const EnvState& state, const EnvConfig& cfg) {
    std::vector<double> obs;
    obs.reserve(cfg.observation_size());
    const GoalFeatures goal = goal_features(state.pose, cfg.exit_gate, cfg.d_max);
    obs.push_back(goal.distance);
    obs.push_back(goal.angle);
    const auto grid = occupancy_grid(state.pose, state.obstacles, cfg);
    obs.insert(obs.end(), grid.begin(), grid.end());
    const auto rays = ray_features(state.pose, cfg.workspace, cfg);
    obs.insert(obs.end(), rays.begin(), rays.end());
    return obs;
}

Pose2D apply_action(const Pose2D& pose, int action, double step_length) {
    if (action < 0 || action >= kNumActions) {
        throw std::out_of_range("action index " + std::to_string(action) + " outside 0..6");
    }
    Pose2D next;
    next.heading = wrap_angle(pose.heading + kActionDeltas[static_cast<std::size_t>(action)]);
    next.position = pose.position + unit_from_angle(next.heading) * step_length;
    return next;
}

double progress(Vec2 position, const Gate& entry_gate, const Gate& exit_gate) {
    const Vec2 start = entry_gate.center();
    const Vec2 axis = exit_gate.center() - start;
    const double len2 = dot(axis, axis);
    return std::clamp(dot(position - start, axis) / len2, 0.0, 1.0);
}

double reward(const EnvState& prev, const EnvState& next, const RewardConfig& cfg) {
    switch (next.cause) {
        case TerminalCause::collision:
        case TerminalCause::out_of_track: return cfg.b_fail;
        case TerminalCause::success: return cfg.b_succ;
        case TerminalCause::timeout: return 0.0;
        case TerminalCause::running: break;
    }
    if (next.progress <= prev.progress) return 0.0;
    double r = cfg.b_prog * next.progress;
    const std::array<double, 3> bonus = {cfg.b_quarter, cfg.b_half, cfg.b_three_quarter};
    for (std::size_t i = 0; i < bonus.size(); ++i) {
        if (next.milestones_passed[i] && !prev.milestones_passed[i]) r += bonus[i];
    }
    return r;
}

NavigationEnv::NavigationEnv(EnvConfig cfg) : cfg_(std::move(cfg)) { cfg_.validate(); }

std::vector<double> NavigationEnv::reset(std::uint64_t seed) {
    return reset_with_layout(sample_obstacles(seed, cfg_), seed);
}

std::vector<double> NavigationEnv::reset_with_layout(std::vector<CircleObstacle> obstacles,
                                                     std::uint64_t seed) {
    seed_ = seed;
    state_ = EnvState{};
    const Vec2 start = cfg_.entry_gate.center();
    const Vec2 to_goal = cfg_.exit_gate.center() - start;
    state_.pose = Pose2D{start, wrap_angle(std::atan2(to_goal.y, to_goal.x))};
    state_.obstacles = std::move(obstacles);
    state_.progress = progress(start, cfg_.entry_gate, cfg_.exit_gate);
    started_ = true;
    return observation();
}

StepOutcome NavigationEnv::step(int action) {
    if (!started_) throw std::logic_error("step called before reset");
    if (state_.done) throw std::logic_error("step called on a finished episode");

    EnvState next = state_;
    next.pose = apply_action(state_.pose, action, cfg_.step_length);
    next.step_count = state_.step_count + 1;
    next.progress = progress(next.pose.position, cfg_.entry_gate, cfg_.exit_gate);

    const Vec2 from = state_.pose.position;
    const Vec2 to = next.pose.position;
    const double inflation = cfg_.inflation();
    const bool collided = std::any_of(next.obstacles.begin(), next.obstacles.end(),
                                      [&](const CircleObstacle& o) { return segment_hits_circle(from, to, o, inflation); });

    if (collided) {
        next.cause = TerminalCause::collision;
    } else if (segments_intersect(from, to, cfg_.exit_gate.a, cfg_.exit_gate.b)) {
        next.cause = TerminalCause::success;
    } else if (!point_in_quad(to, cfg_.workspace)) {
        next.cause = TerminalCause::out_of_track;
    } else if (next.step_count >= cfg_.max_steps) {
        next.cause = TerminalCause::timeout;
    } else {
        next.cause = TerminalCause::running;
        if (next.progress > state_.progress) {
            for (std::size_t i = 0; i < kMilestones.size(); ++i) {
                if (next.progress >= kMilestones[i]) next.milestones_passed[i] = true;
            }
        }
    }
    next.done = next.cause != TerminalCause::running;

    StepOutcome out;
    out.reward = reward(state_, next, cfg_.reward);
    state_ = std::move(next);
    out.observation = observation();
    out.done = state_.done;
    out.cause = state_.cause;
    out.progress = state_.progress;
    out.clearance = min_clearance(state_.pose.position, state_.obstacles, cfg_.r_robot, cfg_.safety_margin);
    out.position = state_.pose.position;
    return out;
}

EpisodeRecord record_episode(NavigationEnv& env, const EnvPolicy& policy) {
    EpisodeRecord rec;
    rec.seed = env.seed();
    rec.obstacles = env.state().obstacles;
    rec.layout_hash = layout_hash(rec.obstacles);
    rec.start = env.state().pose;
    std::vector<double> obs = env.observation();
    while (!env.state().done) {
        const int action = policy(obs, env);
        StepOutcome out = env.step(action);
        rec.steps.push_back(EpisodeStep{action, env.state().pose, out.reward, out.progress,
                                        observation_hash(out.observation)});
        rec.total_return += out.reward;
        obs = std::move(out.observation);
    }
    rec.cause = env.state().cause;
    return rec;
}

EpisodeRecord replay_actions(const EnvConfig& cfg, std::vector<CircleObstacle> obstacles,
                             std::uint64_t seed, std::span<const int> actions) {
    NavigationEnv env(cfg);
    env.reset_with_layout(std::move(obstacles), seed);
    std::size_t i = 0;
    EpisodeRecord rec = record_episode(env, [&](const std::vector<double>&, const NavigationEnv&) {
        if (i >= actions.size()) throw std::runtime_error("action list ended before the episode terminated");
        return actions[i++];
    });
    return rec;
}

}  // namespace uwnav
