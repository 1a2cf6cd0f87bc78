// Command-line front end: train | eval | compare | replay | tune-dwa.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "uwnav/config.hpp"
#include "uwnav/harness.hpp"

namespace fs = std::filesystem;
using namespace uwnav;

namespace {

struct Common {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::string out = "out";
};

void add_common(CLI::App* cmd, Common& c) {
    cmd->add_option("--config", c.config, "YAML config file (built-in defaults when omitted)")
        ->check(CLI::ExistingFile);
    cmd->add_option("--seed", c.seed, "Master seed (train: learner seed)");
    cmd->add_option("--out", c.out, "Output directory")->capture_default_str();
}

RunConfig load(const Common& c) { return c.config.empty() ? RunConfig{} : load_run_config(c.config); }

std::vector<int> parse_actions(const std::string& text) {
    std::vector<int> actions;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (tok.empty()) continue;
        actions.push_back(std::stoi(tok));
    }
    return actions;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Planar underwater navigation: PPO learner, DWA baseline and benchmark harness"};
    app.require_subcommand(1);

    Common common;
    int iterations = 300;
    int episodes = 100;
    std::string checkpoint;
    bool stochastic = false;
    bool empty_obstacles = false;
    bool dump_dwa = false;
    std::vector<std::string> logs;
    std::string scenario;
    std::string actions;

    auto* train = app.add_subcommand("train", "Train the PPO policy");
    add_common(train, common);
    train->add_option("--iterations", iterations, "Total training iterations")->capture_default_str();
    train->add_option("--checkpoint", checkpoint, "Resume from this checkpoint")->check(CLI::ExistingFile);

    auto add_mode = [&](CLI::App* cmd) {
        auto* g = cmd->add_flag("--greedy", "Argmax actions (default)");
        auto* s = cmd->add_flag("--stochastic", stochastic, "Sample actions from the policy");
        g->excludes(s);
    };

    auto* eval = app.add_subcommand("eval", "Evaluate a trained policy alone");
    add_common(eval, common);
    eval->add_option("--checkpoint", checkpoint, "Policy checkpoint")->required()->check(CLI::ExistingFile);
    eval->add_option("--episodes", episodes, "Number of episodes")->capture_default_str();
    add_mode(eval);

    auto* compare = app.add_subcommand("compare", "Paired DWA vs PPO comparison");
    add_common(compare, common);
    compare->add_option("--checkpoint", checkpoint, "Policy checkpoint")->required()->check(CLI::ExistingFile);
    compare->add_option("--episodes", episodes, "Number of paired layouts")->capture_default_str();
    compare->add_flag("--empty-obstacles", empty_obstacles, "Run every layout with no obstacles");
    compare->add_flag("-v,--dump-dwa", dump_dwa, "Write per-step DWA candidate scores to dwa_candidates/");
    add_mode(compare);

    auto* replay = app.add_subcommand("replay", "Re-simulate logged episodes and export trajectories");
    add_common(replay, common);
    replay->add_option("--log", logs, "Episode log CSV (repeatable); reads the sibling .scenario file")
        ->check(CLI::ExistingFile);
    replay->add_option("--scenario", scenario, "Scenario file to replay an action list on")
        ->check(CLI::ExistingFile);
    replay->add_option("--actions", actions, "Comma-separated action ids for --scenario");

    auto* tune = app.add_subcommand("tune-dwa", "Grid search over DWA weights");
    add_common(tune, common);
    tune->add_option("--episodes", episodes, "Layouts per grid point")->capture_default_str();

    CLI11_PARSE(app, argc, argv);

    try {
        RunConfig cfg = load(common);
        const fs::path out = common.out;
        if (train->parsed()) {
            if (common.seed) cfg.train.seed = *common.seed;
            std::optional<fs::path> resume;
            if (!checkpoint.empty()) resume = checkpoint;
            harness::cmd_train(cfg, iterations, out, resume, std::cout);
        } else if (eval->parsed()) {
            harness::cmd_eval(cfg, checkpoint, episodes, common.seed.value_or(cfg.env.seed), !stochastic, out,
                              std::cout);
        } else if (compare->parsed()) {
            harness::CompareOptions opt;
            opt.episodes = episodes;
            opt.master_seed = common.seed.value_or(cfg.env.seed);
            opt.greedy = !stochastic;
            opt.empty_obstacles = empty_obstacles;
            if (dump_dwa) opt.dwa_dump_dir = out / "dwa_candidates";
            harness::cmd_compare(cfg, checkpoint, opt, out, std::cout);
        } else if (replay->parsed()) {
            if (!actions.empty() && scenario.empty()) throw std::invalid_argument("--actions needs --scenario");
            std::vector<fs::path> paths(logs.begin(), logs.end());
            std::optional<fs::path> sc;
            if (!scenario.empty()) sc = scenario;
            harness::cmd_replay(cfg, paths, sc, parse_actions(actions), out, std::cout);
        } else if (tune->parsed()) {
            harness::cmd_tune_dwa(cfg, episodes, common.seed.value_or(cfg.env.seed), out, std::cout);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
