#include "uwnav/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <json.hpp>

#include "uwnav/dwa.hpp"
#include "uwnav/io.hpp"
#include "uwnav/rng.hpp"

#ifndef UWNAV_VERSION
#define UWNAV_VERSION "unknown"
#endif

namespace uwnav::harness {

using Json = nlohmann::ordered_json;

namespace {

constexpr double kZ95 = 1.959963984540054;

std::ofstream open_out(const fs::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    return out;
}

std::string episode_stem(std::size_t i) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "ep_%04zu", i);
    return buf;
}

std::string utc_now() {
    const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::string pct(double rate) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.1f", 100.0 * rate);
    return buf;
}

std::string fixed(double v, int digits) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

std::string hex(std::uint64_t v) {
    char buf[24];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

RunManifest make_manifest(const std::string& command, const RunConfig& cfg, std::uint64_t seed) {
    RunManifest m;
    m.command = command;
    m.config_yaml = to_yaml(cfg);
    m.code_version = code_version();
    m.master_seed = seed;
    m.start_time = utc_now();
    return m;
}

void record(MethodResult& m, const EpisodeRecord& rec, std::size_t i) {
    m.causes[i] = rec.cause;
    m.steps[i] = rec.step_count();
    m.returns[i] = rec.total_return;
}

MethodResult empty_result(std::string name, std::size_t n) {
    MethodResult m;
    m.name = std::move(name);
    m.causes.assign(n, TerminalCause::running);
    m.steps.assign(n, 0);
    m.returns.assign(n, 0.0);
    return m;
}

void tally(MethodResult& m) {
    m.counts = {};
    for (auto c : m.causes) m.counts.add(c);
}

EpisodeRecord ppo_episode(NavigationEnv& env, const ppo::Policy& policy, bool greedy, std::uint64_t seed) {
    Rng rng(seed ^ 0x9e3779b97f4a7c15ULL);
    return record_episode(env, [&](const std::vector<double>& obs, const NavigationEnv&) {
        return greedy ? policy.act_greedy(obs) : policy.act_stochastic(obs, rng).action;
    });
}

ppo::Policy load_policy(const fs::path& checkpoint, const RunConfig& cfg) {
    return load_checkpoint(checkpoint, cfg.env.observation_size()).policy;
}

Json metrics_json(const ppo::IterationMetrics& m) {
    Json j;
    j["iteration"] = m.iteration;
    j["episode_return_mean"] = m.episode_return_mean;
    j["arrival_success_mean"] = m.arrival_success_mean;
    j["episodes"] = m.episodes;
    j["kl"] = m.kl;
    j["kl_coeff"] = m.kl_coeff;
    j["policy_loss"] = m.policy_loss;
    j["vf_loss"] = m.vf_loss;
    j["entropy"] = m.entropy;
    j["env_steps"] = m.env_steps;
    j["manifest"] = kManifestName;
    return j;
}

ppo::IterationMetrics metrics_from_json(const Json& j) {
    ppo::IterationMetrics m;
    m.iteration = j.at("iteration").get<int>();
    m.episode_return_mean = j.at("episode_return_mean").get<double>();
    m.arrival_success_mean = j.at("arrival_success_mean").get<double>();
    m.episodes = j.at("episodes").get<int>();
    m.kl = j.at("kl").get<double>();
    m.kl_coeff = j.at("kl_coeff").get<double>();
    m.policy_loss = j.at("policy_loss").get<double>();
    m.vf_loss = j.at("vf_loss").get<double>();
    m.entropy = j.at("entropy").get<double>();
    m.env_steps = j.at("env_steps").get<std::int64_t>();
    return m;
}

/// Keeps the lines of a JSON-lines file whose "iteration" is <= `last`.
std::vector<std::string> kept_lines(const fs::path& path, int last) {
    std::vector<std::string> kept;
    std::ifstream in(path);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (Json::parse(line).at("iteration").get<int>() <= last) kept.push_back(line);
    }
    return kept;
}

std::string iter_name(int iteration) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "iter_%06d.ckpt", iteration);
    return buf;
}

}  // namespace

std::string code_version() { return UWNAV_VERSION; }

void RunManifest::write(const fs::path& out_dir) const {
    Json j;
    j["command"] = command;
    j["code_version"] = code_version;
    j["master_seed"] = master_seed;
    j["start_time"] = start_time;
    j["outputs"] = outputs;
    j["config"] = config_yaml;
    auto out = open_out(out_dir / kManifestName);
    out << j.dump(2) << '\n';
}

std::vector<std::uint64_t> derive_seeds(std::uint64_t master_seed, int n) {
    Rng rng(master_seed);
    std::vector<std::uint64_t> seeds(static_cast<std::size_t>(std::max(n, 0)));
    for (auto& s : seeds) s = rng.next_u64();
    return seeds;
}

void OutcomeCounts::add(TerminalCause cause) {
    ++episodes;
    switch (cause) {
        case TerminalCause::success: ++success; break;
        case TerminalCause::collision: ++collision; break;
        case TerminalCause::out_of_track: ++out_of_track; break;
        case TerminalCause::timeout: ++timeout; break;
        case TerminalCause::running: throw std::logic_error("episode recorded without a terminal cause");
    }
}

double OutcomeCounts::half_width(int count) const {
    if (episodes == 0) return 0.0;
    const double p = rate(count);
    return kZ95 * std::sqrt(p * (1.0 - p) / episodes);
}

CurveSummary summarize(std::vector<double> values) {
    CurveSummary s;
    if (values.empty()) return s;
    std::sort(values.begin(), values.end());
    double sum = 0.0;
    for (double v : values) sum += v;
    const std::size_t n = values.size();
    s.mean = sum / static_cast<double>(n);
    s.median = n % 2 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
    s.min = values.front();
    s.max = values.back();
    return s;
}

// --- train ------------------------------------------------------------------

TrainResult cmd_train(const RunConfig& cfg, int iterations, const fs::path& out_dir,
                      const std::optional<fs::path>& resume_from, std::ostream& log) {
    if (iterations < 1) throw std::invalid_argument("iterations must be >= 1");
    cfg.validate();
    fs::create_directories(out_dir / "checkpoints");
    const std::string cfg_yaml = to_yaml(cfg);
    const auto env_cfg = cfg.env;
    ppo::Trainer trainer(cfg.train, [env_cfg] { return std::make_unique<NavigationEnv>(env_cfg); });

    TrainResult result;
    const fs::path metrics_path = out_dir / "metrics.jsonl";
    const fs::path timing_path = out_dir / "timing.jsonl";
    std::vector<std::string> metric_lines, timing_lines;
    if (resume_from) {
        auto ckpt = load_checkpoint(*resume_from, cfg.env.observation_size());
        if (!ckpt.trainer) throw CheckpointError("checkpoint has no trainer state; cannot resume");
        if (ckpt.config_yaml != cfg_yaml) {
            throw std::invalid_argument("checkpoint was written with a different configuration");
        }
        trainer.restore(ckpt.policy, *ckpt.trainer);
        const int at = ckpt.trainer->iteration;
        metric_lines = kept_lines(metrics_path, at);
        timing_lines = kept_lines(timing_path, at);
        if (static_cast<int>(metric_lines.size()) != at) {
            throw std::runtime_error("metrics.jsonl in " + out_dir.string() + " does not cover the first " +
                                     std::to_string(at) + " iterations");
        }
        for (const auto& l : metric_lines) result.metrics.push_back(metrics_from_json(Json::parse(l)));
        log << "resumed from " << resume_from->string() << " at iteration " << at << '\n';
    }

    RunManifest manifest = make_manifest("train", cfg, cfg.train.seed);
    manifest.outputs = {"metrics.jsonl", "timing.jsonl", "summary.txt", "final.ckpt", "checkpoints/"};
    manifest.write(out_dir);

    // Rewrite from the kept prefix so an interrupted tail never survives a resume.
    std::ofstream metrics_out = open_out(metrics_path);
    std::ofstream timing_out = open_out(timing_path);
    for (const auto& l : metric_lines) metrics_out << l << '\n';
    for (const auto& l : timing_lines) timing_out << l << '\n';
    metrics_out.flush();
    timing_out.flush();

    auto save = [&](const fs::path& path) {
        Checkpoint ck{cfg_yaml, trainer.policy(), trainer.snapshot()};
        save_checkpoint(path, ck);
    };

    const auto t0 = std::chrono::steady_clock::now();
    while (trainer.iteration() < iterations) {
        const auto m = trainer.train_iteration();
        const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        metrics_out << metrics_json(m).dump() << '\n';
        metrics_out.flush();
        Json t;
        t["iteration"] = m.iteration;
        t["wall_time"] = wall;
        timing_out << t.dump() << '\n';
        timing_out.flush();
        result.metrics.push_back(m);
        log << "iter " << m.iteration << "  return " << fixed(m.episode_return_mean, 3) << "  success "
            << fixed(m.arrival_success_mean, 3) << "  kl " << fixed(m.kl, 5) << "  episodes " << m.episodes
            << "  (" << fixed(wall, 1) << " s)\n";
        if (cfg.train.checkpoint_every > 0 && m.iteration % cfg.train.checkpoint_every == 0) {
            save(out_dir / "checkpoints" / iter_name(m.iteration));
        }
    }
    result.final_checkpoint = out_dir / "final.ckpt";
    save(result.final_checkpoint);

    std::vector<double> success, returns;
    for (const auto& m : result.metrics) {
        success.push_back(m.arrival_success_mean);
        returns.push_back(m.episode_return_mean);
    }
    result.success = summarize(success);
    result.episode_return = summarize(returns);
    const std::string summary = format_train_summary(result);
    open_out(out_dir / "summary.txt") << summary;
    log << summary;
    return result;
}

std::string format_train_summary(const TrainResult& r) {
    std::ostringstream s;
    auto row = [&](const char* name, const CurveSummary& c) {
        s << name << "  mean: " << fixed(c.mean, 3) << "  median: " << fixed(c.median, 3)
          << "  min: " << fixed(c.min, 3) << "  max: " << fixed(c.max, 3) << '\n';
    };
    s << "training summary over " << r.metrics.size() << " iterations\n";
    row("arrival_success_mean", r.success);
    row("episode_return_mean ", r.episode_return);
    return s.str();
}

// --- compare ----------------------------------------------------------------

ComparisonReport run_comparison(const RunConfig& cfg, const ppo::Policy& policy, const CompareOptions& opt) {
    if (opt.episodes < 1) throw std::invalid_argument("episodes must be >= 1");
    cfg.validate();
    ComparisonReport r;
    r.master_seed = opt.master_seed;
    r.empty_override = opt.empty_obstacles;
    r.ppo_mode = opt.greedy ? "greedy" : "stochastic";
    r.layout_seeds = derive_seeds(opt.master_seed, opt.episodes);
    const std::size_t n = r.layout_seeds.size();
    r.layout_hashes.assign(n, 0);
    r.dwa = empty_result("DWA", n);
    r.ppo = empty_result("PPO", n);
    const auto planner = cfg.planner();
    if (opt.dwa_dump_dir) fs::create_directories(*opt.dwa_dump_dir);

    std::vector<std::uint8_t> mismatch(n, 0);
#pragma omp parallel for schedule(dynamic)
    for (std::size_t i = 0; i < n; ++i) {
        const std::uint64_t seed = r.layout_seeds[i];
        NavigationEnv dwa_env(cfg.env), ppo_env(cfg.env);
        if (opt.empty_obstacles) {
            dwa_env.reset_with_layout({}, seed);
            ppo_env.reset_with_layout({}, seed);
        } else {
            dwa_env.reset(seed);
            ppo_env.reset(seed);
        }
        std::ofstream dump;
        // No throwing inside the parallel region; a failed open only loses the dump.
        if (opt.dwa_dump_dir) dump.open(*opt.dwa_dump_dir / (episode_stem(i) + ".csv"));
        const auto a = dwa::dwa_episode(dwa_env, planner, opt.dwa_dump_dir ? &dump : nullptr);
        const auto b = ppo_episode(ppo_env, policy, opt.greedy, seed);
        r.layout_hashes[i] = a.layout_hash;
        mismatch[i] = a.layout_hash != b.layout_hash;
        record(r.dwa, a, i);
        record(r.ppo, b, i);
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (mismatch[i]) {
            throw ProtocolViolation("layout hash mismatch between methods for layout seed " +
                                    std::to_string(r.layout_seeds[i]));
        }
    }
    tally(r.dwa);
    tally(r.ppo);
    return r;
}

std::string format_report(const ComparisonReport& r) {
    std::ostringstream s;
    s << "comparison report\n";
    s << "manifest: " << kManifestName << '\n';
    s << "episodes: " << r.layout_seeds.size() << "   master seed: " << r.master_seed
      << "   ppo mode: " << r.ppo_mode << "   obstacles: " << (r.empty_override ? "none (override)" : "sampled")
      << "\n\n";
    s << "rates in %, +/- is the 95% normal-approximation half-width\n\n";
    s << std::left << std::setw(8) << "method" << std::setw(16) << "success" << std::setw(16) << "collisions"
      << std::setw(16) << "out-of-area" << std::setw(16) << "timeout" << '\n';
    for (const auto* m : {&r.dwa, &r.ppo}) {
        const auto& c = m->counts;
        auto cell = [&](int count) { return pct(c.rate(count)) + " +/- " + pct(c.half_width(count)); };
        s << std::setw(8) << m->name << std::setw(16) << cell(c.success) << std::setw(16) << cell(c.collision)
          << std::setw(16) << cell(c.out_of_track) << std::setw(16) << cell(c.timeout) << '\n';
    }
    s << "\ncounts (success/collision/out-of-area/timeout of episodes)\n";
    for (const auto* m : {&r.dwa, &r.ppo}) {
        const auto& c = m->counts;
        s << std::setw(8) << m->name << c.success << '/' << c.collision << '/' << c.out_of_track << '/'
          << c.timeout << " of " << c.episodes << '\n';
    }
    s << "\nlayouts (index, seed, obstacle hash)\n";
    for (std::size_t i = 0; i < r.layout_seeds.size(); ++i) {
        s << i << ' ' << r.layout_seeds[i] << ' ' << hex(r.layout_hashes[i]) << '\n';
    }
    return s.str();
}

ComparisonReport cmd_compare(const RunConfig& cfg, const fs::path& checkpoint, const CompareOptions& opt,
                             const fs::path& out_dir, std::ostream& log) {
    const auto policy = load_policy(checkpoint, cfg);
    fs::create_directories(out_dir);
    RunManifest manifest = make_manifest("compare", cfg, opt.master_seed);
    manifest.outputs = {"report.txt", "compare_episodes.csv"};
    if (opt.dwa_dump_dir) manifest.outputs.push_back(fs::relative(*opt.dwa_dump_dir, out_dir).generic_string() + "/");
    manifest.write(out_dir);

    const auto r = run_comparison(cfg, policy, opt);
    const std::string text = format_report(r);
    open_out(out_dir / "report.txt") << text;
    auto csv = open_out(out_dir / "compare_episodes.csv");
    csv << "episode,layout_seed,layout_hash,dwa_cause,dwa_steps,dwa_return,ppo_cause,ppo_steps,ppo_return\n";
    for (std::size_t i = 0; i < r.layout_seeds.size(); ++i) {
        csv << i << ',' << r.layout_seeds[i] << ',' << hex(r.layout_hashes[i]) << ',' << to_string(r.dwa.causes[i])
            << ',' << r.dwa.steps[i] << ',' << fixed(r.dwa.returns[i], 6) << ',' << to_string(r.ppo.causes[i])
            << ',' << r.ppo.steps[i] << ',' << fixed(r.ppo.returns[i], 6) << '\n';
    }
    log << text;
    return r;
}

// --- eval -------------------------------------------------------------------

EvalResult run_eval(const RunConfig& cfg, const ppo::Policy& policy, int episodes, std::uint64_t seed, bool greedy) {
    if (episodes < 1) throw std::invalid_argument("episodes must be >= 1");
    cfg.validate();
    EvalResult r;
    r.mode = greedy ? "greedy" : "stochastic";
    r.seeds = derive_seeds(seed, episodes);
    const std::size_t n = r.seeds.size();
    r.result = empty_result("PPO", n);
    r.records.resize(n);
#pragma omp parallel for schedule(dynamic)
    for (std::size_t i = 0; i < n; ++i) {
        NavigationEnv env(cfg.env);
        env.reset(r.seeds[i]);
        r.records[i] = ppo_episode(env, policy, greedy, r.seeds[i]);
        record(r.result, r.records[i], i);
    }
    tally(r.result);
    return r;
}

std::string format_eval(const EvalResult& r) {
    const auto& c = r.result.counts;
    std::ostringstream s;
    s << "evaluation (" << r.mode << ")\n";
    s << "manifest: " << kManifestName << '\n';
    s << "episodes: " << c.episodes << '\n';
    s << "success:     " << pct(c.rate(c.success)) << "% +/- " << pct(c.half_width(c.success)) << '\n';
    s << "collision:   " << pct(c.rate(c.collision)) << "% +/- " << pct(c.half_width(c.collision)) << '\n';
    s << "out-of-area: " << pct(c.rate(c.out_of_track)) << "% +/- " << pct(c.half_width(c.out_of_track)) << '\n';
    s << "timeout:     " << pct(c.rate(c.timeout)) << "% +/- " << pct(c.half_width(c.timeout)) << '\n';
    double ret = 0.0;
    for (double v : r.result.returns) ret += v;
    s << "mean return: " << fixed(ret / std::max(c.episodes, 1), 3) << '\n';
    return s.str();
}

EvalResult cmd_eval(const RunConfig& cfg, const fs::path& checkpoint, int episodes, std::uint64_t seed, bool greedy,
                    const fs::path& out_dir, std::ostream& log) {
    const auto policy = load_policy(checkpoint, cfg);
    fs::create_directories(out_dir / "episodes");
    RunManifest manifest = make_manifest("eval", cfg, seed);
    manifest.outputs = {"eval_summary.txt", "episodes/"};
    manifest.write(out_dir);

    auto r = run_eval(cfg, policy, episodes, seed, greedy);
    for (std::size_t i = 0; i < r.records.size(); ++i) {
        const std::string stem = episode_stem(i);
        const auto& rec = r.records[i];
        auto csv = open_out(out_dir / "episodes" / (stem + ".csv"));
        write_episode_log(csv, rec);
        auto sc = open_out(out_dir / "episodes" / (stem + ".scenario"));
        sc << "# manifest: ../" << kManifestName << '\n';
        write_scenario(sc, Scenario::from(cfg.env, rec.seed, rec.obstacles));
    }
    const std::string text = format_eval(r);
    open_out(out_dir / "eval_summary.txt") << text;
    log << text;
    return r;
}

// --- replay -----------------------------------------------------------------

namespace {

void check_close(double logged, double replayed, const char* what, int step) {
    if (!(std::abs(logged - replayed) <= kReplayTolerance)) {
        std::ostringstream s;
        s << std::setprecision(17) << "replay diverged at step " << step << ": " << what << " logged " << logged
          << " but re-simulated " << replayed;
        throw ReplayDivergence(s.str());
    }
}

}  // namespace

EpisodeRecord replay_log(const RunConfig& cfg, const fs::path& episode_log) {
    fs::path scenario_path = episode_log;
    scenario_path.replace_extension(".scenario");
    const Scenario sc = load_scenario(scenario_path);
    std::ifstream in(episode_log);
    if (!in) throw std::runtime_error("cannot open " + episode_log.string());
    const auto rows = read_episode_log(in);
    if (rows.empty()) throw ReplayDivergence("episode log has no steps");
    std::vector<int> actions;
    for (const auto& row : rows) actions.push_back(row.action);

    const auto rec = replay_actions(sc.apply_to(cfg.env), sc.obstacles, sc.seed, actions);
    if (rec.steps.size() != rows.size()) {
        throw ReplayDivergence("re-simulated episode ended after " + std::to_string(rec.steps.size()) +
                               " steps but the log has " + std::to_string(rows.size()));
    }
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& row = rows[i];
        const auto& st = rec.steps[i];
        const int step = static_cast<int>(i + 1);
        if (row.step != step) throw ReplayDivergence("episode log step numbers are not consecutive");
        check_close(row.pose.position.x, st.pose.position.x, "x", step);
        check_close(row.pose.position.y, st.pose.position.y, "y", step);
        check_close(row.pose.heading, st.pose.heading, "theta", step);
        check_close(row.reward, st.reward, "reward", step);
        check_close(row.progress, st.progress, "progress", step);
    }
    if (rows.back().cause != rec.cause) {
        throw ReplayDivergence("terminal cause differs: logged " + std::string(to_string(rows.back().cause)) +
                               ", re-simulated " + std::string(to_string(rec.cause)));
    }
    return rec;
}

EpisodeRecord replay_scenario(const RunConfig& cfg, const fs::path& scenario, const std::vector<int>& actions) {
    const Scenario sc = load_scenario(scenario);
    return replay_actions(sc.apply_to(cfg.env), sc.obstacles, sc.seed, actions);
}

void cmd_replay(const RunConfig& cfg, const std::vector<fs::path>& logs, const std::optional<fs::path>& scenario,
                const std::vector<int>& actions, const fs::path& out_dir, std::ostream& log) {
    if (logs.empty() && !scenario) throw std::invalid_argument("replay needs episode logs or a scenario file");
    fs::create_directories(out_dir);
    RunManifest manifest = make_manifest("replay", cfg, 0);

    std::vector<EpisodeRecord> records;
    std::vector<std::string> stems;
    EnvConfig shown = cfg.env;
    for (const auto& p : logs) {
        records.push_back(replay_log(cfg, p));
        stems.push_back(p.stem().string());
        fs::path sp = p;
        if (records.size() == 1) shown = load_scenario(sp.replace_extension(".scenario")).apply_to(cfg.env);
        log << p.string() << ": " << records.back().step_count() << " steps, "
            << to_string(records.back().cause) << ", no divergence\n";
    }
    if (scenario) {
        records.push_back(replay_scenario(cfg, *scenario, actions));
        stems.push_back(scenario->stem().string());
        if (records.size() == 1) shown = load_scenario(*scenario).apply_to(cfg.env);
        log << scenario->string() << ": " << records.back().step_count() << " steps, "
            << to_string(records.back().cause) << '\n';
    }
    for (std::size_t i = 0; i < records.size(); ++i) {
        const std::string name = stems[i] + ".trajectory.csv";
        auto out = open_out(out_dir / name);
        write_trajectory(out, records[i]);
        manifest.outputs.push_back(name);
    }
    {
        auto svg = open_out(out_dir / "replay.svg");
        svg << "<!-- manifest: " << kManifestName << " -->\n";
        write_svg(svg, shown, records);
    }
    manifest.outputs.push_back("replay.svg");
    manifest.write(out_dir);
}

// --- tune-dwa ---------------------------------------------------------------

namespace {

std::vector<double> sorted_unique(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return v;
}

}  // namespace

std::size_t best_cell(const std::vector<TuneCell>& cells) {
    if (cells.empty()) throw std::invalid_argument("empty tuning grid");
    std::size_t best = 0;
    for (std::size_t i = 1; i < cells.size(); ++i) {
        const auto& a = cells[i].counts;
        const auto& b = cells[best].counts;
        if (a.success > b.success || (a.success == b.success && a.collision < b.collision)) best = i;
    }
    return best;
}

TuneResult run_tune(const RunConfig& cfg, int episodes, std::uint64_t seed) {
    if (episodes < 1) throw std::invalid_argument("episodes must be >= 1");
    cfg.validate();
    TuneResult r;
    for (double a : sorted_unique(cfg.tune.alpha))
        for (double b : sorted_unique(cfg.tune.beta))
            for (double g : sorted_unique(cfg.tune.gamma))
                for (double d : sorted_unique(cfg.tune.d_max)) r.cells.push_back({a, b, g, d, {}});

    const auto seeds = derive_seeds(seed, episodes);
    const std::size_t n = seeds.size();
    const std::size_t total = r.cells.size() * n;
    std::vector<TerminalCause> causes(total, TerminalCause::running);
    const auto base = cfg.planner();

#pragma omp parallel for schedule(dynamic)
    for (std::size_t k = 0; k < total; ++k) {
        const auto& cell = r.cells[k / n];
        auto p = base;
        p.alpha = cell.alpha;
        p.beta = cell.beta;
        p.gamma = cell.gamma;
        p.d_max = cell.d_max;
        NavigationEnv env(cfg.env);
        env.reset(seeds[k % n]);
        causes[k] = dwa::dwa_episode(env, p).cause;
    }
    for (std::size_t k = 0; k < total; ++k) r.cells[k / n].counts.add(causes[k]);
    r.best = best_cell(r.cells);
    return r;
}

TuneResult cmd_tune_dwa(const RunConfig& cfg, int episodes, std::uint64_t seed, const fs::path& out_dir,
                        std::ostream& log) {
    fs::create_directories(out_dir);
    RunManifest manifest = make_manifest("tune-dwa", cfg, seed);
    manifest.outputs = {"tune.csv", "best_dwa.yaml"};
    manifest.write(out_dir);

    auto r = run_tune(cfg, episodes, seed);
    auto csv = open_out(out_dir / "tune.csv");
    csv << "alpha,beta,gamma,d_max,episodes,success,collision,out_of_track,timeout\n";
    csv << std::setprecision(17);
    for (const auto& c : r.cells) {
        csv << c.alpha << ',' << c.beta << ',' << c.gamma << ',' << c.d_max << ',' << c.counts.episodes << ','
            << c.counts.success << ',' << c.counts.collision << ',' << c.counts.out_of_track << ','
            << c.counts.timeout << '\n';
    }
    const auto& b = r.cells[r.best];
    auto yaml = open_out(out_dir / "best_dwa.yaml");
    yaml << "# manifest: " << kManifestName << "\n# success " << b.counts.success << '/' << b.counts.episodes
         << ", collision " << b.counts.collision << '/' << b.counts.episodes << "\n";
    yaml << std::setprecision(17) << "dwa:\n  alpha: " << b.alpha << "\n  beta: " << b.beta << "\n  gamma: " << b.gamma
         << "\n  d_max: " << b.d_max << '\n';
    log << "evaluated " << r.cells.size() << " grid points on " << episodes << " layouts\n";
    log << "best: alpha " << b.alpha << " beta " << b.beta << " gamma " << b.gamma << " d_max " << b.d_max
        << "  success " << pct(b.counts.rate(b.counts.success)) << "%  collision "
        << pct(b.counts.rate(b.counts.collision)) << "%\n";
    return r;
}

}  // namespace uwnav::harness
