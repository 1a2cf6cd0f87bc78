#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "uwnav/environment.hpp"
#include "uwnav/ppo.hpp"
#include "uwnav/trainer.hpp"

namespace uwnav {

// ---------------------------------------------------------------------------
// Scenario files
//
//   # comment lines are ignored
//   uwnav-scenario 1
//   seed <uint64>
//   workspace x0 y0 x1 y1 x2 y2 x3 y3     (image frame, metres, counterclockwise)
//   entry_gate ax ay bx by
//   exit_gate ax ay bx by
//   obstacles <count>
//   obstacle cx cy radius                  (one row per obstacle)
//
// Numbers are written with 17 significant digits.
// ---------------------------------------------------------------------------

struct Scenario {
    std::uint64_t seed = 0;
    Quadrilateral workspace = Quadrilateral::axis_aligned(1.0, 1.0);
    Gate entry_gate;
    Gate exit_gate;
    std::vector<CircleObstacle> obstacles;

    static Scenario from(const EnvConfig& cfg, std::uint64_t seed, std::vector<CircleObstacle> obstacles);
    /// Copies workspace and gates into `cfg`.
    EnvConfig apply_to(EnvConfig cfg) const;
};

void write_scenario(std::ostream& out, const Scenario& s);
Scenario read_scenario(std::istream& in);
void save_scenario(const std::filesystem::path& path, const Scenario& s);
Scenario load_scenario(const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// Episode logs: CSV, mandatory header, one row per step.
//   step,x,y,theta,action,reward,progress,terminal_cause
// ---------------------------------------------------------------------------

inline constexpr const char* kEpisodeLogHeader = "step,x,y,theta,action,reward,progress,terminal_cause";

struct EpisodeLogRow {
    int step = 0;
    Pose2D pose;
    int action = 0;
    double reward = 0.0;
    double progress = 0.0;
    TerminalCause cause = TerminalCause::running;
};

void write_episode_log(std::ostream& out, const EpisodeRecord& rec);
std::vector<EpisodeLogRow> read_episode_log(std::istream& in);

/// Trajectory with the start pose as row 0, in both frames:
///   step,x_img,y_img,x_ned,y_ned,theta
void write_trajectory(std::ostream& out, const EpisodeRecord& rec);

/// Static SVG: workspace, gates, obstacles and one <path> per episode.
void write_svg(std::ostream& out, const EnvConfig& cfg, const std::vector<EpisodeRecord>& episodes);

// ---------------------------------------------------------------------------
// Checkpoints: versioned text container with a config echo, the observation
// normaliser, every weight array with its declared shape, and optionally the
// trainer state needed to resume.
// ---------------------------------------------------------------------------

inline constexpr int kCheckpointVersion = 1;

struct Checkpoint {
    std::string config_yaml;
    ppo::Policy policy;
    std::optional<ppo::TrainerSnapshot> trainer;
};

class CheckpointError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

void write_checkpoint(std::ostream& out, const Checkpoint& ckpt);
/// Throws CheckpointError on version mismatch, truncation or corruption, and
/// when `expected_obs_dim` is given but differs from the stored network.
Checkpoint read_checkpoint(std::istream& in, std::optional<std::size_t> expected_obs_dim = std::nullopt);

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::filesystem::path& path,
                           std::optional<std::size_t> expected_obs_dim = std::nullopt);

}  // namespace uwnav
