#include "uwnav/io.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace uwnav {

namespace {

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

double parse_double(const std::string& token, const char* what) {
    char* end = nullptr;
    const double v = std::strtod(token.c_str(), &end);
    if (token.empty() || end != token.c_str() + token.size()) {
        throw std::runtime_error(std::string("cannot parse ") + what + " from '" + token + "'");
    }
    return v;
}

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, sep)) out.push_back(field);
    if (!line.empty() && line.back() == sep) out.emplace_back();
    return out;
}

std::string trim_cr(std::string s) {
    if (!s.empty() && s.back() == '\r') s.pop_back();
    return s;
}

}  // namespace

// --- scenario ---------------------------------------------------------------

Scenario Scenario::from(const EnvConfig& cfg, std::uint64_t seed, std::vector<CircleObstacle> obstacles) {
    Scenario s;
    s.seed = seed;
    s.workspace = cfg.workspace;
    s.entry_gate = cfg.entry_gate;
    s.exit_gate = cfg.exit_gate;
    s.obstacles = std::move(obstacles);
    return s;
}

EnvConfig Scenario::apply_to(EnvConfig cfg) const {
    cfg.workspace = workspace;
    cfg.entry_gate = entry_gate;
    cfg.exit_gate = exit_gate;
    if (cfg.d_max < workspace.diameter()) cfg.d_max = workspace.diameter();
    return cfg;
}

void write_scenario(std::ostream& out, const Scenario& s) {
    out << "# obstacle layout; image frame, metres\n";
    out << "uwnav-scenario 1\n";
    out << "seed " << s.seed << '\n';
    out << "workspace";
    for (const auto& v : s.workspace.vertices()) out << ' ' << num(v.x) << ' ' << num(v.y);
    out << '\n';
    out << "entry_gate " << num(s.entry_gate.a.x) << ' ' << num(s.entry_gate.a.y) << ' ' << num(s.entry_gate.b.x)
        << ' ' << num(s.entry_gate.b.y) << '\n';
    out << "exit_gate " << num(s.exit_gate.a.x) << ' ' << num(s.exit_gate.a.y) << ' ' << num(s.exit_gate.b.x) << ' '
        << num(s.exit_gate.b.y) << '\n';
    out << "obstacles " << s.obstacles.size() << '\n';
    for (const auto& o : s.obstacles) {
        out << "obstacle " << num(o.center.x) << ' ' << num(o.center.y) << ' ' << num(o.radius) << '\n';
    }
}

Scenario read_scenario(std::istream& in) {
    Scenario s;
    std::string line;
    bool have_header = false, have_workspace = false, have_entry = false, have_exit = false;
    std::optional<std::size_t> declared;
    auto numbers = [](std::istringstream& ls, std::size_t n, const char* what) {
        std::vector<double> v;
        std::string tok;
        while (ls >> tok) v.push_back(parse_double(tok, what));
        if (v.size() != n) throw std::runtime_error(std::string("scenario: wrong field count for ") + what);
        return v;
    };
    while (std::getline(in, line)) {
        line = trim_cr(line);
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        std::string key;
        ls >> key;
        if (key == "uwnav-scenario") {
            int version = 0;
            ls >> version;
            if (version != 1) throw std::runtime_error("scenario: unsupported version");
            have_header = true;
        } else if (key == "seed") {
            ls >> s.seed;
        } else if (key == "workspace") {
            const auto v = numbers(ls, 8, "workspace");
            s.workspace = Quadrilateral({Vec2{v[0], v[1]}, Vec2{v[2], v[3]}, Vec2{v[4], v[5]}, Vec2{v[6], v[7]}});
            have_workspace = true;
        } else if (key == "entry_gate" || key == "exit_gate") {
            const auto v = numbers(ls, 4, "gate");
            Gate g{{v[0], v[1]}, {v[2], v[3]}};
            if (key == "entry_gate") {
                s.entry_gate = g;
                have_entry = true;
            } else {
                s.exit_gate = g;
                have_exit = true;
            }
        } else if (key == "obstacles") {
            std::size_t n = 0;
            ls >> n;
            declared = n;
        } else if (key == "obstacle") {
            const auto v = numbers(ls, 3, "obstacle");
            if (!(v[2] > 0.0)) throw std::runtime_error("scenario: obstacle radius must be positive");
            s.obstacles.push_back({{v[0], v[1]}, v[2]});
        } else {
            throw std::runtime_error("scenario: unknown record '" + key + "'");
        }
    }
    if (!have_header || !have_workspace || !have_entry || !have_exit) {
        throw std::runtime_error("scenario: missing header, workspace or gate records");
    }
    if (declared && *declared != s.obstacles.size()) {
        throw std::runtime_error("scenario: obstacle count does not match the declared count");
    }
    return s;
}

void save_scenario(const std::filesystem::path& path, const Scenario& s) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    write_scenario(out, s);
}

Scenario load_scenario(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    return read_scenario(in);
}

// --- episode logs -------------------------------------------------------------

void write_episode_log(std::ostream& out, const EpisodeRecord& rec) {
    out << kEpisodeLogHeader << '\n';
    for (std::size_t i = 0; i < rec.steps.size(); ++i) {
        const auto& s = rec.steps[i];
        const bool last = i + 1 == rec.steps.size();
        out << (i + 1) << ',' << num(s.pose.position.x) << ',' << num(s.pose.position.y) << ','
            << num(s.pose.heading) << ',' << s.action << ',' << num(s.reward) << ',' << num(s.progress) << ','
            << to_string(last ? rec.cause : TerminalCause::running) << '\n';
    }
}

std::vector<EpisodeLogRow> read_episode_log(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || trim_cr(line) != kEpisodeLogHeader) {
        throw std::runtime_error("episode log: missing or unexpected header");
    }
    std::vector<EpisodeLogRow> rows;
    while (std::getline(in, line)) {
        line = trim_cr(line);
        if (line.empty()) continue;
        const auto f = split(line, ',');
        if (f.size() != 8) throw std::runtime_error("episode log: expected 8 fields in '" + line + "'");
        EpisodeLogRow r;
        r.step = std::stoi(f[0]);
        r.pose.position.x = parse_double(f[1], "x");
        r.pose.position.y = parse_double(f[2], "y");
        r.pose.heading = parse_double(f[3], "theta");
        r.action = std::stoi(f[4]);
        r.reward = parse_double(f[5], "reward");
        r.progress = parse_double(f[6], "progress");
        r.cause = parse_terminal_cause(f[7]);
        rows.push_back(r);
    }
    return rows;
}

void write_trajectory(std::ostream& out, const EpisodeRecord& rec) {
    out << "step,x_img,y_img,x_ned,y_ned,theta\n";
    auto row = [&](int step, const Pose2D& p) {
        const Vec2 ned = img_to_ned(p.position);
        out << step << ',' << num(p.position.x) << ',' << num(p.position.y) << ',' << num(ned.x) << ','
            << num(ned.y) << ',' << num(p.heading) << '\n';
    };
    row(0, rec.start);
    for (std::size_t i = 0; i < rec.steps.size(); ++i) row(static_cast<int>(i + 1), rec.steps[i].pose);
}

void write_svg(std::ostream& out, const EnvConfig& cfg, const std::vector<EpisodeRecord>& episodes) {
    double min_x = cfg.workspace.vertex(0).x, max_x = min_x;
    double min_y = cfg.workspace.vertex(0).y, max_y = min_y;
    for (const auto& v : cfg.workspace.vertices()) {
        min_x = std::min(min_x, v.x);
        max_x = std::max(max_x, v.x);
        min_y = std::min(min_y, v.y);
        max_y = std::max(max_y, v.y);
    }
    const double pad = 2.0;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"" << num(min_x - pad) << ' ' << num(min_y - pad)
        << ' ' << num(max_x - min_x + 2 * pad) << ' ' << num(max_y - min_y + 2 * pad) << "\">\n";
    out << "  <polygon points=\"";
    for (const auto& v : cfg.workspace.vertices()) out << num(v.x) << ',' << num(v.y) << ' ';
    out << "\" fill=\"#eef5fb\" stroke=\"#333\" stroke-width=\"0.3\"/>\n";
    for (const auto* g : {&cfg.entry_gate, &cfg.exit_gate}) {
        out << "  <line x1=\"" << num(g->a.x) << "\" y1=\"" << num(g->a.y) << "\" x2=\"" << num(g->b.x) << "\" y2=\""
            << num(g->b.y) << "\" stroke=\"" << (g == &cfg.exit_gate ? "#2a2" : "#22a")
            << "\" stroke-width=\"0.8\"/>\n";
    }
    if (!episodes.empty()) {
        for (const auto& o : episodes.front().obstacles) {
            out << "  <circle cx=\"" << num(o.center.x) << "\" cy=\"" << num(o.center.y) << "\" r=\""
                << num(o.radius) << "\" fill=\"#999\"/>\n";
        }
    }
    for (const auto& ep : episodes) {
        out << "  <path d=\"M " << num(ep.start.position.x) << ' ' << num(ep.start.position.y);
        for (const auto& s : ep.steps) out << " L " << num(s.pose.position.x) << ' ' << num(s.pose.position.y);
        out << "\" fill=\"none\" stroke=\"#c22\" stroke-width=\"0.3\"/>\n";
    }
    out << "</svg>\n";
}

// --- checkpoints ---------------------------------------------------------------

namespace {

void write_values(std::ostream& out, std::span<const double> v) {
    for (std::size_t i = 0; i < v.size(); ++i) out << (i ? " " : "") << num(v[i]);
    out << '\n';
}

void write_tensors(std::ostream& out, const std::string& prefix, const ppo::MlpParams& p) {
    auto layer = [&](const std::string& name, const ppo::DenseLayer& l) {
        out << "tensor " << prefix << name << ".weight " << l.in << ' ' << l.out << '\n';
        write_values(out, l.weight);
        out << "tensor " << prefix << name << ".bias 1 " << l.out << '\n';
        write_values(out, l.bias);
    };
    for (std::size_t i = 0; i < p.trunk.size(); ++i) layer("trunk." + std::to_string(i), p.trunk[i]);
    layer("policy", p.policy_head);
    layer("value", p.value_head);
}

class LineReader {
public:
    explicit LineReader(std::istream& in) {
        std::string line;
        while (std::getline(in, line)) lines_.push_back(trim_cr(line));
    }

    std::string next() {
        if (pos_ >= lines_.size()) throw CheckpointError("checkpoint: unexpected end of file");
        return lines_[pos_++];
    }

    /// Next line, which must start with `key`; returns the remaining fields.
    std::istringstream expect(const std::string& key) {
        const std::string line = next();
        std::istringstream ls(line);
        std::string k;
        ls >> k;
        if (k != key) throw CheckpointError("checkpoint: expected '" + key + "' but found '" + k + "'");
        return ls;
    }

    std::vector<double> values(std::size_t n) {
        std::istringstream ls(next());
        std::vector<double> v;
        v.reserve(n);
        std::string tok;
        while (ls >> tok) {
            try {
                v.push_back(parse_double(tok, "value"));
            } catch (const std::runtime_error& e) {
                throw CheckpointError(std::string("checkpoint: ") + e.what());
            }
        }
        if (v.size() != n) throw CheckpointError("checkpoint: value count does not match the declared shape");
        return v;
    }

private:
    std::vector<std::string> lines_;
    std::size_t pos_ = 0;
};

void read_tensors(LineReader& r, const std::string& prefix, ppo::MlpParams& p) {
    auto layer = [&](const std::string& name, ppo::DenseLayer& l) {
        for (const auto* part : {".weight", ".bias"}) {
            auto ls = r.expect("tensor");
            std::string got;
            std::size_t rows = 0, cols = 0;
            ls >> got >> rows >> cols;
            const bool weight = std::string(part) == ".weight";
            if (got != prefix + name + part || cols != l.out || rows != (weight ? l.in : 1)) {
                throw CheckpointError("checkpoint: tensor '" + got + "' has an unexpected name or shape");
            }
            auto v = r.values(rows * cols);
            (weight ? l.weight : l.bias) = std::move(v);
        }
    };
    for (std::size_t i = 0; i < p.trunk.size(); ++i) layer("trunk." + std::to_string(i), p.trunk[i]);
    layer("policy", p.policy_head);
    layer("value", p.value_head);
}

}  // namespace

void write_checkpoint(std::ostream& out, const Checkpoint& ckpt) {
    const auto& params = ckpt.policy.params;
    const auto& norm = ckpt.policy.normalizer;
    out << "uwnav-checkpoint " << kCheckpointVersion << '\n';

    std::vector<std::string> cfg_lines;
    {
        std::istringstream ss(ckpt.config_yaml);
        std::string l;
        while (std::getline(ss, l)) cfg_lines.push_back(l);
    }
    out << "config " << cfg_lines.size() << '\n';
    for (const auto& l : cfg_lines) out << l << '\n';

    out << "network " << params.input_size() << ' ' << params.n_actions() << ' ' << params.trunk.size();
    for (auto h : params.hidden_sizes()) out << ' ' << h;
    out << '\n';
    out << "normalizer " << norm.dim() << ' ' << num(norm.count()) << ' ' << num(norm.eps()) << ' '
        << num(norm.clip()) << '\n';
    write_values(out, norm.mean());
    write_values(out, norm.m2());
    write_tensors(out, "", params);

    out << "trainer " << (ckpt.trainer ? 1 : 0) << '\n';
    if (ckpt.trainer) {
        const auto& t = *ckpt.trainer;
        out << "iteration " << t.iteration << '\n';
        out << "kl_coeff " << num(t.kl_coeff) << '\n';
        out << "env_steps " << t.env_steps << '\n';
        out << "last_means " << num(t.last_return_mean) << ' ' << num(t.last_success_mean) << '\n';
        out << "shuffle_rng " << t.shuffle_rng_state << '\n';
        out << "adam_t " << t.adam_t << '\n';
        write_tensors(out, "adam_m.", t.adam_m);
        write_tensors(out, "adam_v.", t.adam_v);
        out << "workers " << t.workers.size() << '\n';
        for (const auto& w : t.workers) {
            out << "worker " << w.episode_seed << ' ' << num(w.episode_return) << ' ' << w.episode_actions.size();
            for (int a : w.episode_actions) out << ' ' << a;
            out << '\n';
            out << "worker_rng " << w.rng_state << '\n';
        }
    }
    out << "end\n";
}

Checkpoint read_checkpoint(std::istream& in, std::optional<std::size_t> expected_obs_dim) {
    LineReader r(in);
    Checkpoint ckpt;
    {
        std::string magic;
        int version = 0;
        std::istringstream ls(r.next());
        ls >> magic >> version;
        if (magic != "uwnav-checkpoint") throw CheckpointError("checkpoint: not a checkpoint file");
        if (version != kCheckpointVersion) {
            throw CheckpointError("checkpoint: version " + std::to_string(version) + " is not supported (expected " +
                                  std::to_string(kCheckpointVersion) + ")");
        }
    }
    {
        std::size_t n = 0;
        r.expect("config") >> n;
        for (std::size_t i = 0; i < n; ++i) ckpt.config_yaml += r.next() + "\n";
    }
    std::size_t obs_dim = 0, n_actions = 0, depth = 0;
    std::vector<std::size_t> hidden;
    {
        auto ls = r.expect("network");
        ls >> obs_dim >> n_actions >> depth;
        hidden.resize(depth);
        for (auto& h : hidden) ls >> h;
        if (!ls || obs_dim == 0 || n_actions == 0) throw CheckpointError("checkpoint: corrupt network header");
    }
    if (expected_obs_dim && *expected_obs_dim != obs_dim) {
        throw CheckpointError("checkpoint: network expects " + std::to_string(obs_dim) +
                              " observation components but the environment provides " +
                              std::to_string(*expected_obs_dim));
    }
    {
        std::size_t dim = 0;
        std::string count, eps, clip;
        r.expect("normalizer") >> dim >> count >> eps >> clip;
        if (dim != obs_dim) throw CheckpointError("checkpoint: normalizer size does not match the network");
        auto mean = r.values(dim);
        auto m2 = r.values(dim);
        ckpt.policy.normalizer = ppo::ObsNormalizer(dim);
        ckpt.policy.normalizer.restore(parse_double(count, "count"), std::move(mean), std::move(m2),
                                       parse_double(eps, "eps"), parse_double(clip, "clip"));
    }
    ckpt.policy.params = ppo::MlpParams::zeros(obs_dim, hidden, n_actions);
    read_tensors(r, "", ckpt.policy.params);

    int has_trainer = 0;
    r.expect("trainer") >> has_trainer;
    if (has_trainer) {
        ppo::TrainerSnapshot t;
        r.expect("iteration") >> t.iteration;
        std::string tok;
        r.expect("kl_coeff") >> tok;
        t.kl_coeff = parse_double(tok, "kl_coeff");
        r.expect("env_steps") >> t.env_steps;
        {
            std::string a, b;
            r.expect("last_means") >> a >> b;
            t.last_return_mean = parse_double(a, "last_return_mean");
            t.last_success_mean = parse_double(b, "last_success_mean");
        }
        {
            auto ls = r.expect("shuffle_rng");
            std::getline(ls >> std::ws, t.shuffle_rng_state);
        }
        r.expect("adam_t") >> t.adam_t;
        t.adam_m = ppo::MlpParams::zeros(obs_dim, hidden, n_actions);
        t.adam_v = ppo::MlpParams::zeros(obs_dim, hidden, n_actions);
        read_tensors(r, "adam_m.", t.adam_m);
        read_tensors(r, "adam_v.", t.adam_v);
        std::size_t n_workers = 0;
        r.expect("workers") >> n_workers;
        for (std::size_t i = 0; i < n_workers; ++i) {
            ppo::WorkerSnapshot w;
            auto ls = r.expect("worker");
            std::string ret;
            std::size_t n_act = 0;
            ls >> w.episode_seed >> ret >> n_act;
            w.episode_return = parse_double(ret, "episode_return");
            w.episode_actions.resize(n_act);
            for (auto& a : w.episode_actions) ls >> a;
            if (!ls) throw CheckpointError("checkpoint: corrupt worker record");
            auto rs = r.expect("worker_rng");
            std::getline(rs >> std::ws, w.rng_state);
            t.workers.push_back(std::move(w));
        }
        ckpt.trainer = std::move(t);
    }
    if (r.next() != "end") throw CheckpointError("checkpoint: missing end marker");
    return ckpt;
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt) {
    // Write then rename so an interrupted save never clobbers the last good file.
    const auto tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp);
        if (!out) throw std::runtime_error("cannot write " + tmp);
        write_checkpoint(out, ckpt);
        if (!out) throw std::runtime_error("failed writing " + tmp);
    }
    std::filesystem::rename(tmp, path);
}

Checkpoint load_checkpoint(const std::filesystem::path& path, std::optional<std::size_t> expected_obs_dim) {
    std::ifstream in(path);
    if (!in) throw CheckpointError("cannot open checkpoint " + path.string());
    return read_checkpoint(in, expected_obs_dim);
}

}  // namespace uwnav
