#include "uwnav/dwa.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace uwnav::dwa {

void DwaConfig::validate() const {
    if (angle_candidates.empty() || distance_candidates.empty()) {
        throw std::invalid_argument("invalid config: dwa candidate lists must be non-empty");
    }
    if (!(d_max > 0.0)) throw std::invalid_argument("invalid config: dwa.d_max must be positive");
    for (double w : {alpha, beta, gamma}) {
        if (!std::isfinite(w) || w < 0.0) {
            throw std::invalid_argument("invalid config: dwa weights must be finite and >= 0");
        }
    }
}

Vec2 predict(const Pose2D& pose, double delta_theta, double distance) {
    return pose.position + unit_from_angle(pose.heading + delta_theta) * distance;
}

double goal_cost(Vec2 predicted, Vec2 goal) { return distance(predicted, goal); }

double clearance_score(double clearance, double d_max) { return std::min(1.0, clearance / d_max); }

double total_score(const ScoredCandidate& candidate, Vec2 goal, Weights weights, double d_max) {
    return -weights.alpha * goal_cost(candidate.predicted, goal) +
           weights.beta * clearance_score(candidate.clearance, d_max) + weights.gamma * candidate.distance;
}

std::vector<ScoredCandidate> score_candidates(const Pose2D& pose, Vec2 goal,
                                              std::span<const CircleObstacle> obstacles,
                                              const DwaConfig& cfg) {
    std::vector<ScoredCandidate> out;
    out.reserve(cfg.angle_candidates.size() * cfg.distance_candidates.size());
    const Weights w{cfg.alpha, cfg.beta, cfg.gamma};
    for (std::size_t ai = 0; ai < cfg.angle_candidates.size(); ++ai) {
        for (std::size_t di = 0; di < cfg.distance_candidates.size(); ++di) {
            ScoredCandidate c;
            c.angle_index = ai;
            c.distance_index = di;
            c.delta_theta = cfg.angle_candidates[ai];
            c.distance = cfg.distance_candidates[di];
            c.predicted = predict(pose, c.delta_theta, c.distance);
            c.clearance = min_clearance(c.predicted, obstacles, cfg.r_robot, cfg.safety_margin);
            c.feasible = c.clearance > 0.0;
            if (c.feasible) c.score = total_score(c, goal, w, cfg.d_max);
            out.push_back(c);
        }
    }
    return out;
}

std::optional<Command> select(const Pose2D& pose, Vec2 goal, std::span<const CircleObstacle> obstacles,
                              const DwaConfig& cfg) {
    const auto scored = score_candidates(pose, goal, obstacles, cfg);
    const ScoredCandidate* best = nullptr;
    for (const auto& c : scored) {
        if (!c.feasible) continue;
        if (best == nullptr || c.score > best->score) best = &c;
    }
    if (best == nullptr) return std::nullopt;
    return Command{best->delta_theta, best->distance};
}

int nearest_action(double delta_theta) {
    int best = 0;
    double best_gap = std::abs(wrap_angle(delta_theta - kActionDeltas[0]));
    for (int a = 1; a < kNumActions; ++a) {
        const double gap = std::abs(wrap_angle(delta_theta - kActionDeltas[static_cast<std::size_t>(a)]));
        if (gap < best_gap) {
            best = a;
            best_gap = gap;
        }
    }
    return best;
}

EpisodeRecord dwa_episode(NavigationEnv& env, const DwaConfig& cfg, std::ostream* candidate_dump) {
    cfg.validate();
    if (candidate_dump != nullptr) {
        *candidate_dump << "step,angle_index,distance_index,delta_theta,distance,pred_x,pred_y,clearance,score,feasible\n";
    }
    return record_episode(env, [&](const std::vector<double>&, const NavigationEnv& e) {
        const auto& state = e.state();
        if (candidate_dump != nullptr) {
            for (const auto& c : score_candidates(state.pose, e.goal(), state.obstacles, cfg)) {
                *candidate_dump << state.step_count << ',' << c.angle_index << ',' << c.distance_index << ','
                                << c.delta_theta << ',' << c.distance << ',' << c.predicted.x << ','
                                << c.predicted.y << ',' << c.clearance << ',' << c.score << ','
                                << (c.feasible ? 1 : 0) << '\n';
            }
        }
        const auto cmd = select(state.pose, e.goal(), state.obstacles, cfg);
        return cmd ? nearest_action(cmd->delta_theta) : kHoldHeadingAction;
    });
}

DwaConfig with_env(DwaConfig cfg, const EnvConfig& env) {
    cfg.r_robot = env.r_robot;
    cfg.safety_margin = env.safety_margin;
    return cfg;
}

}  // namespace uwnav::dwa
