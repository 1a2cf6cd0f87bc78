#include "uwnav/config.hpp"

#include <yaml-cpp/yaml.h>

#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace uwnav {

namespace {

[[noreturn]] void fail(const std::string& msg) { throw std::invalid_argument("config: " + msg); }

void check_keys(const YAML::Node& node, const std::string& section, const std::set<std::string>& allowed) {
    if (!node.IsMap()) fail("section '" + section + "' must be a mapping");
    for (const auto& kv : node) {
        const auto key = kv.first.as<std::string>();
        if (!allowed.contains(key)) fail("unknown key '" + section + "." + key + "'");
    }
}

template <typename T>
void read(const YAML::Node& node, const char* key, T& out) {
    if (const auto v = node[key]) {
        try {
            out = v.as<T>();
        } catch (const YAML::Exception& e) {
            fail(std::string("bad value for '") + key + "': " + e.what());
        }
    }
}

Vec2 read_point(const YAML::Node& n, const std::string& what) {
    if (!n.IsSequence() || n.size() != 2) fail(what + " must be a [x, y] pair");
    return {n[0].as<double>(), n[1].as<double>()};
}

Gate read_gate(const YAML::Node& n, const std::string& what) {
    if (!n.IsSequence() || n.size() != 2) fail(what + " must list two endpoints");
    return {read_point(n[0], what), read_point(n[1], what)};
}

void parse_env(const YAML::Node& n, EnvConfig& env) {
    check_keys(n, "env",
               {"preset", "workspace", "entry_gate", "exit_gate", "n_obstacles", "obstacle_radius_range",
                "step_length", "d_max", "ray_count", "ray_max", "grid_distances", "grid_angles", "grid_range",
                "r_robot", "safety_margin", "max_steps", "seed"});
    if (const auto p = n["preset"]) {
        const auto name = p.as<std::string>();
        if (name == "default") {
            env = EnvConfig::defaults();
        } else if (name == "reduced") {
            env = EnvConfig::reduced();
        } else {
            fail("unknown env.preset '" + name + "'");
        }
    }
    if (const auto w = n["workspace"]) {
        if (!w.IsSequence() || w.size() != 4) fail("env.workspace must list four vertices");
        std::array<Vec2, 4> v;
        for (std::size_t i = 0; i < 4; ++i) v[i] = read_point(w[i], "env.workspace vertex");
        env.workspace = Quadrilateral(v);
        if (!n["d_max"]) env.d_max = env.workspace.diameter();
    }
    if (const auto g = n["entry_gate"]) env.entry_gate = read_gate(g, "env.entry_gate");
    if (const auto g = n["exit_gate"]) env.exit_gate = read_gate(g, "env.exit_gate");
    if (const auto r = n["obstacle_radius_range"]) {
        const auto pr = read_point(r, "env.obstacle_radius_range");
        env.obstacle_radius_min = pr.x;
        env.obstacle_radius_max = pr.y;
    }
    read(n, "n_obstacles", env.n_obstacles);
    read(n, "step_length", env.step_length);
    read(n, "d_max", env.d_max);
    read(n, "ray_count", env.ray_count);
    read(n, "ray_max", env.ray_max);
    read(n, "grid_distances", env.grid_distances);
    read(n, "grid_angles", env.grid_angles);
    read(n, "grid_range", env.grid_range);
    read(n, "r_robot", env.r_robot);
    read(n, "safety_margin", env.safety_margin);
    read(n, "max_steps", env.max_steps);
    read(n, "seed", env.seed);
}

void parse_reward(const YAML::Node& n, RewardConfig& r) {
    check_keys(n, "reward", {"b_prog", "b_quarter", "b_half", "b_three_quarter", "b_fail", "b_succ"});
    read(n, "b_prog", r.b_prog);
    read(n, "b_quarter", r.b_quarter);
    read(n, "b_half", r.b_half);
    read(n, "b_three_quarter", r.b_three_quarter);
    read(n, "b_fail", r.b_fail);
    read(n, "b_succ", r.b_succ);
}

void parse_dwa(const YAML::Node& n, dwa::DwaConfig& d) {
    check_keys(n, "dwa", {"angle_candidates", "distance_candidates", "alpha", "beta", "gamma", "d_max"});
    read(n, "angle_candidates", d.angle_candidates);
    read(n, "distance_candidates", d.distance_candidates);
    read(n, "alpha", d.alpha);
    read(n, "beta", d.beta);
    read(n, "gamma", d.gamma);
    read(n, "d_max", d.d_max);
}

void parse_train(const YAML::Node& n, ppo::TrainConfig& t) {
    check_keys(n, "train",
               {"learning_rate", "gamma", "lambda", "clip", "kl_target", "kl_coeff_init", "entropy_coeff",
                "vf_coeff", "vf_clip", "epochs", "fragment_length", "train_batch", "minibatch", "num_workers",
                "hidden", "normalize_advantages", "normalize_observations", "adam_beta1", "adam_beta2",
                "adam_eps", "init_gain_trunk", "init_gain_policy", "init_gain_value", "seed",
                "checkpoint_every"});
    read(n, "learning_rate", t.learning_rate);
    read(n, "gamma", t.gamma);
    read(n, "lambda", t.lambda);
    read(n, "clip", t.clip);
    read(n, "kl_target", t.kl_target);
    read(n, "kl_coeff_init", t.kl_coeff_init);
    read(n, "entropy_coeff", t.entropy_coeff);
    read(n, "vf_coeff", t.vf_coeff);
    read(n, "vf_clip", t.vf_clip);
    read(n, "epochs", t.epochs);
    read(n, "fragment_length", t.fragment_length);
    read(n, "train_batch", t.train_batch);
    read(n, "minibatch", t.minibatch);
    read(n, "num_workers", t.num_workers);
    read(n, "hidden", t.hidden);
    read(n, "normalize_advantages", t.normalize_advantages);
    read(n, "normalize_observations", t.normalize_observations);
    read(n, "adam_beta1", t.adam_beta1);
    read(n, "adam_beta2", t.adam_beta2);
    read(n, "adam_eps", t.adam_eps);
    read(n, "init_gain_trunk", t.init.trunk);
    read(n, "init_gain_policy", t.init.policy);
    read(n, "init_gain_value", t.init.value);
    read(n, "seed", t.seed);
    read(n, "checkpoint_every", t.checkpoint_every);
}

void parse_tune(const YAML::Node& n, TuneGrid& g) {
    check_keys(n, "tune", {"alpha", "beta", "gamma", "d_max"});
    read(n, "alpha", g.alpha);
    read(n, "beta", g.beta);
    read(n, "gamma", g.gamma);
    read(n, "d_max", g.d_max);
}

}  // namespace

void RunConfig::validate() const {
    env.validate();
    dwa.validate();
    train.validate();
    if (tune.alpha.empty() || tune.beta.empty() || tune.gamma.empty() || tune.d_max.empty()) {
        fail("tune grid axes must be non-empty");
    }
}

RunConfig parse_run_config(const std::string& yaml_text) {
    YAML::Node root;
    try {
        root = YAML::Load(yaml_text);
    } catch (const YAML::Exception& e) {
        fail(std::string("parse error: ") + e.what());
    }
    RunConfig cfg;
    if (root.IsNull()) return cfg;
    check_keys(root, "<root>", {"env", "reward", "dwa", "train", "tune"});
    try {
        if (const auto n = root["env"]) parse_env(n, cfg.env);
        if (const auto n = root["reward"]) parse_reward(n, cfg.env.reward);
        if (const auto n = root["dwa"]) parse_dwa(n, cfg.dwa);
        if (const auto n = root["train"]) parse_train(n, cfg.train);
        if (const auto n = root["tune"]) parse_tune(n, cfg.tune);
    } catch (const YAML::Exception& e) {
        fail(e.what());
    }
    cfg.validate();
    return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("config: cannot open " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_run_config(ss.str());
}

namespace {

void emit_point(YAML::Emitter& out, Vec2 p) {
    out << YAML::Flow << YAML::BeginSeq << p.x << p.y << YAML::EndSeq;
}

template <typename T>
void emit_list(YAML::Emitter& out, const char* key, const std::vector<T>& values) {
    out << YAML::Key << key << YAML::Value << YAML::Flow << YAML::BeginSeq;
    for (const auto& v : values) out << v;
    out << YAML::EndSeq;
}

}  // namespace

std::string to_yaml(const RunConfig& cfg) {
    YAML::Emitter out;
    out.SetDoublePrecision(17);
    out << YAML::BeginMap;

    const auto& e = cfg.env;
    out << YAML::Key << "env" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "workspace" << YAML::Value << YAML::BeginSeq;
    for (const auto& v : e.workspace.vertices()) emit_point(out, v);
    out << YAML::EndSeq;
    out << YAML::Key << "entry_gate" << YAML::Value << YAML::BeginSeq;
    emit_point(out, e.entry_gate.a);
    emit_point(out, e.entry_gate.b);
    out << YAML::EndSeq;
    out << YAML::Key << "exit_gate" << YAML::Value << YAML::BeginSeq;
    emit_point(out, e.exit_gate.a);
    emit_point(out, e.exit_gate.b);
    out << YAML::EndSeq;
    out << YAML::Key << "n_obstacles" << YAML::Value << e.n_obstacles;
    out << YAML::Key << "obstacle_radius_range" << YAML::Value;
    emit_point(out, {e.obstacle_radius_min, e.obstacle_radius_max});
    out << YAML::Key << "step_length" << YAML::Value << e.step_length;
    out << YAML::Key << "d_max" << YAML::Value << e.d_max;
    out << YAML::Key << "ray_count" << YAML::Value << e.ray_count;
    out << YAML::Key << "ray_max" << YAML::Value << e.ray_max;
    out << YAML::Key << "grid_distances" << YAML::Value << e.grid_distances;
    out << YAML::Key << "grid_angles" << YAML::Value << e.grid_angles;
    out << YAML::Key << "grid_range" << YAML::Value << e.grid_range;
    out << YAML::Key << "r_robot" << YAML::Value << e.r_robot;
    out << YAML::Key << "safety_margin" << YAML::Value << e.safety_margin;
    out << YAML::Key << "max_steps" << YAML::Value << e.max_steps;
    out << YAML::Key << "seed" << YAML::Value << e.seed;
    out << YAML::EndMap;

    const auto& r = e.reward;
    out << YAML::Key << "reward" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "b_prog" << YAML::Value << r.b_prog;
    out << YAML::Key << "b_quarter" << YAML::Value << r.b_quarter;
    out << YAML::Key << "b_half" << YAML::Value << r.b_half;
    out << YAML::Key << "b_three_quarter" << YAML::Value << r.b_three_quarter;
    out << YAML::Key << "b_fail" << YAML::Value << r.b_fail;
    out << YAML::Key << "b_succ" << YAML::Value << r.b_succ;
    out << YAML::EndMap;

    const auto& d = cfg.dwa;
    out << YAML::Key << "dwa" << YAML::Value << YAML::BeginMap;
    emit_list(out, "angle_candidates", d.angle_candidates);
    emit_list(out, "distance_candidates", d.distance_candidates);
    out << YAML::Key << "alpha" << YAML::Value << d.alpha;
    out << YAML::Key << "beta" << YAML::Value << d.beta;
    out << YAML::Key << "gamma" << YAML::Value << d.gamma;
    out << YAML::Key << "d_max" << YAML::Value << d.d_max;
    out << YAML::EndMap;

    const auto& t = cfg.train;
    out << YAML::Key << "train" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "learning_rate" << YAML::Value << t.learning_rate;
    out << YAML::Key << "gamma" << YAML::Value << t.gamma;
    out << YAML::Key << "lambda" << YAML::Value << t.lambda;
    out << YAML::Key << "clip" << YAML::Value << t.clip;
    out << YAML::Key << "kl_target" << YAML::Value << t.kl_target;
    out << YAML::Key << "kl_coeff_init" << YAML::Value << t.kl_coeff_init;
    out << YAML::Key << "entropy_coeff" << YAML::Value << t.entropy_coeff;
    out << YAML::Key << "vf_coeff" << YAML::Value << t.vf_coeff;
    out << YAML::Key << "vf_clip" << YAML::Value << t.vf_clip;
    out << YAML::Key << "epochs" << YAML::Value << t.epochs;
    out << YAML::Key << "fragment_length" << YAML::Value << t.fragment_length;
    out << YAML::Key << "train_batch" << YAML::Value << t.train_batch;
    out << YAML::Key << "minibatch" << YAML::Value << t.minibatch;
    out << YAML::Key << "num_workers" << YAML::Value << t.num_workers;
    emit_list(out, "hidden", t.hidden);
    out << YAML::Key << "normalize_advantages" << YAML::Value << t.normalize_advantages;
    out << YAML::Key << "normalize_observations" << YAML::Value << t.normalize_observations;
    out << YAML::Key << "adam_beta1" << YAML::Value << t.adam_beta1;
    out << YAML::Key << "adam_beta2" << YAML::Value << t.adam_beta2;
    out << YAML::Key << "adam_eps" << YAML::Value << t.adam_eps;
    out << YAML::Key << "init_gain_trunk" << YAML::Value << t.init.trunk;
    out << YAML::Key << "init_gain_policy" << YAML::Value << t.init.policy;
    out << YAML::Key << "init_gain_value" << YAML::Value << t.init.value;
    out << YAML::Key << "seed" << YAML::Value << t.seed;
    out << YAML::Key << "checkpoint_every" << YAML::Value << t.checkpoint_every;
    out << YAML::EndMap;

    const auto& g = cfg.tune;
    out << YAML::Key << "tune" << YAML::Value << YAML::BeginMap;
    emit_list(out, "alpha", g.alpha);
    emit_list(out, "beta", g.beta);
    emit_list(out, "gamma", g.gamma);
    emit_list(out, "d_max", g.d_max);
    out << YAML::EndMap;

    out << YAML::EndMap;
    return std::string(out.c_str()) + "\n";
}

}  // namespace uwnav
