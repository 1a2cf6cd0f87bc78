#pragma once

#include <cstddef>
#include <cstdint>

#include "uwnav/geometry.hpp"

namespace uwnav {

struct RewardConfig {
    double b_prog = 0.07;
    double b_quarter = 1.0;
    double b_half = 1.0;
    double b_three_quarter = 1.0;
    double b_fail = -10.0;
    double b_succ = 10.0;

    void validate() const;
};

struct EnvConfig {
    Quadrilateral workspace = Quadrilateral::axis_aligned(100.0, 50.0);
    Gate entry_gate{{0.0, 30.0}, {0.0, 20.0}};
    Gate exit_gate{{100.0, 20.0}, {100.0, 30.0}};
    int n_obstacles = 10;
    double obstacle_radius_min = 2.0;
    double obstacle_radius_max = 5.0;
    double step_length = 1.0;      // metres travelled per step
    double d_max = 111.80339887498948;  // goal-distance normaliser (workspace diagonal)
    int ray_count = 12;
    double ray_max = 50.0;
    int grid_distances = 10;
    int grid_angles = 7;
    double grid_range = 10.0;
    double r_robot = 0.5;
    double safety_margin = 0.5;
    int max_steps = 400;
    RewardConfig reward;
    std::uint64_t seed = 0;

    std::size_t observation_size() const {
        return 2 + static_cast<std::size_t>(grid_distances) * grid_angles + ray_count;
    }
    double inflation() const { return r_robot + safety_margin; }

    /// Throws std::invalid_argument describing the first violated invariant.
    void validate() const;

    /// 100 m x 50 m track with ten obstacles.
    static EnvConfig defaults();
    /// 60 m x 40 m track with four obstacles and a 250-step limit.
    static EnvConfig reduced();
};

}  // namespace uwnav
