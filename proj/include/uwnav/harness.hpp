#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "uwnav/config.hpp"
#include "uwnav/environment.hpp"
#include "uwnav/ppo.hpp"
#include "uwnav/trainer.hpp"

namespace uwnav::harness {

namespace fs = std::filesystem;

std::string code_version();

/// Reproducibility record written as manifest.json in every output directory.
struct RunManifest {
    std::string command;
    std::string config_yaml;
    std::string code_version;
    std::uint64_t master_seed = 0;
    std::string start_time;  // UTC, ISO 8601
    std::vector<std::string> outputs;  // relative to the output directory

    void write(const fs::path& out_dir) const;
};

inline constexpr const char* kManifestName = "manifest.json";

/// `n` layout seeds derived from a master seed.
std::vector<std::uint64_t> derive_seeds(std::uint64_t master_seed, int n);

// --- outcome statistics -------------------------------------------------------

struct OutcomeCounts {
    int episodes = 0;
    int success = 0;
    int collision = 0;
    int out_of_track = 0;
    int timeout = 0;

    void add(TerminalCause cause);
    double rate(int count) const { return episodes ? static_cast<double>(count) / episodes : 0.0; }
    /// 95% normal-approximation half-width of a rate, in the same units.
    double half_width(int count) const;
};

struct MethodResult {
    std::string name;
    OutcomeCounts counts;
    std::vector<TerminalCause> causes;  // by episode index
    std::vector<int> steps;
    std::vector<double> returns;
};

// --- train ------------------------------------------------------------------

struct CurveSummary {
    double mean = 0.0, median = 0.0, min = 0.0, max = 0.0;
};
CurveSummary summarize(std::vector<double> values);

struct TrainResult {
    std::vector<ppo::IterationMetrics> metrics;  // full history, including resumed part
    fs::path final_checkpoint;
    CurveSummary success;
    CurveSummary episode_return;
};

/// Trains until `iterations` total iterations. With `resume_from`, learner and
/// worker state come from that checkpoint and metrics.jsonl is cut back to it.
TrainResult cmd_train(const RunConfig& cfg, int iterations, const fs::path& out_dir,
                      const std::optional<fs::path>& resume_from, std::ostream& log);

std::string format_train_summary(const TrainResult& r);

// --- compare ----------------------------------------------------------------

class ProtocolViolation : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct ComparisonReport {
    std::uint64_t master_seed = 0;
    std::vector<std::uint64_t> layout_seeds;
    std::vector<std::uint64_t> layout_hashes;
    bool empty_override = false;
    std::string ppo_mode = "greedy";
    MethodResult dwa;
    MethodResult ppo;
};

struct CompareOptions {
    int episodes = 100;
    std::uint64_t master_seed = 0;
    bool greedy = true;
    bool empty_obstacles = false;
    /// When set, every DWA episode writes its per-step candidate scores to
    /// <dir>/ep_NNNN.csv.
    std::optional<fs::path> dwa_dump_dir;
};

ComparisonReport run_comparison(const RunConfig& cfg, const ppo::Policy& policy, const CompareOptions& opt);
std::string format_report(const ComparisonReport& r);

/// Loads the checkpoint, runs the comparison and writes report.txt and
/// compare_episodes.csv into `out_dir`.
ComparisonReport cmd_compare(const RunConfig& cfg, const fs::path& checkpoint, const CompareOptions& opt,
                             const fs::path& out_dir, std::ostream& log);

// --- eval -------------------------------------------------------------------

struct EvalResult {
    std::string mode;
    std::vector<std::uint64_t> seeds;
    MethodResult result;
    std::vector<EpisodeRecord> records;
};

EvalResult run_eval(const RunConfig& cfg, const ppo::Policy& policy, int episodes, std::uint64_t seed, bool greedy);
std::string format_eval(const EvalResult& r);

/// Writes episodes/ep_NNNN.csv with a same-stem .scenario file per episode and
/// eval_summary.txt.
EvalResult cmd_eval(const RunConfig& cfg, const fs::path& checkpoint, int episodes, std::uint64_t seed,
                    bool greedy, const fs::path& out_dir, std::ostream& log);

// --- replay -----------------------------------------------------------------

class ReplayDivergence : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr double kReplayTolerance = 1e-9;

/// Re-simulates a logged episode (scenario read from the log's sibling
/// .scenario file) and checks every row against the log.
EpisodeRecord replay_log(const RunConfig& cfg, const fs::path& episode_log);
EpisodeRecord replay_scenario(const RunConfig& cfg, const fs::path& scenario, const std::vector<int>& actions);

/// Writes <stem>.trajectory.csv per episode and replay.svg with all of them.
void cmd_replay(const RunConfig& cfg, const std::vector<fs::path>& logs,
                const std::optional<fs::path>& scenario, const std::vector<int>& actions, const fs::path& out_dir,
                std::ostream& log);

// --- tune-dwa ---------------------------------------------------------------

struct TuneCell {
    double alpha = 0.0, beta = 0.0, gamma = 0.0, d_max = 0.0;
    OutcomeCounts counts;
};

struct TuneResult {
    std::vector<TuneCell> cells;  // lexicographic (alpha, beta, gamma, d_max) order
    std::size_t best = 0;
};

TuneResult run_tune(const RunConfig& cfg, int episodes, std::uint64_t seed);
/// Index of the best cell: highest success, then fewest collisions, then
/// earliest in lexicographic order.
std::size_t best_cell(const std::vector<TuneCell>& cells);

/// Writes tune.csv and best_dwa.yaml.
TuneResult cmd_tune_dwa(const RunConfig& cfg, int episodes, std::uint64_t seed, const fs::path& out_dir,
                        std::ostream& log);

}  // namespace uwnav::harness
