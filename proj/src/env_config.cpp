#include "uwnav/env_config.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace uwnav {

namespace {

void require(bool ok, const char* what) {
    if (!ok) throw std::invalid_argument(std::string("invalid config: ") + what);
}

}  // namespace

void RewardConfig::validate() const {
    require(b_fail < 0.0, "reward.b_fail must be negative");
    require(b_succ > 0.0, "reward.b_succ must be positive");
    require(b_quarter >= 0.0 && b_half >= 0.0 && b_three_quarter >= 0.0,
            "milestone bonuses must be non-negative");
    require(std::isfinite(b_prog), "reward.b_prog must be finite");
}

void EnvConfig::validate() const {
    require(n_obstacles >= 0, "env.n_obstacles must be >= 0");
    require(obstacle_radius_min > 0.0 && obstacle_radius_min <= obstacle_radius_max,
            "env.obstacle_radius_range must satisfy 0 < min <= max");
    require(step_length > 0.0, "env.step_length must be positive");
    require(d_max >= workspace.diameter() - kGeomEps, "env.d_max must cover the workspace diameter");
    require(ray_count > 0 && ray_max > 0.0, "env.ray_count and env.ray_max must be positive");
    require(grid_distances > 0 && grid_angles > 0 && grid_range > 0.0,
            "env grid dimensions must be positive");
    require(r_robot >= 0.0 && safety_margin >= 0.0, "env.r_robot and env.safety_margin must be >= 0");
    require(max_steps > 0, "env.max_steps must be positive");
    require(gate_edge(entry_gate, workspace).has_value(), "env.entry_gate must lie on a workspace edge");
    require(gate_edge(exit_gate, workspace).has_value(), "env.exit_gate must lie on a workspace edge");
    require(entry_gate.width() > 0.0 && exit_gate.width() > 0.0, "gates must have positive width");
    require(distance(entry_gate.center(), exit_gate.center()) > 0.0, "gates must not coincide");
    reward.validate();
}

EnvConfig EnvConfig::defaults() { return EnvConfig{}; }

EnvConfig EnvConfig::reduced() {
    EnvConfig cfg;
    cfg.workspace = Quadrilateral::axis_aligned(60.0, 40.0);
    cfg.entry_gate = Gate{{0.0, 25.0}, {0.0, 15.0}};
    cfg.exit_gate = Gate{{60.0, 15.0}, {60.0, 25.0}};
    cfg.n_obstacles = 4;
    cfg.d_max = std::hypot(60.0, 40.0);
    cfg.max_steps = 250;
    return cfg;
}

}  // namespace uwnav
