#include "uwnav/trainer.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace uwnav::ppo {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

struct FinishedEpisode {
    double total_return;
    bool success;
};

}  // namespace

void TrainConfig::validate() const {
    auto require = [](bool ok, const char* what) {
        if (!ok) throw std::invalid_argument(std::string("invalid config: ") + what);
    };
    require(learning_rate >= 0.0, "train.learning_rate must be >= 0");
    require(gamma >= 0.0 && gamma < 1.0, "train.gamma must lie in [0, 1)");
    require(lambda >= 0.0 && lambda <= 1.0, "train.lambda must lie in [0, 1]");
    require(clip > 0.0, "train.clip must be positive");
    require(kl_target > 0.0 && kl_coeff_init > 0.0, "train.kl_target and train.kl_coeff_init must be positive");
    require(vf_clip > 0.0, "train.vf_clip must be positive");
    require(epochs > 0, "train.epochs must be positive");
    require(fragment_length > 0 && train_batch > 0, "train.fragment_length and train.train_batch must be positive");
    require(train_batch % fragment_length == 0, "train.train_batch must be a multiple of train.fragment_length");
    require(num_workers > 0 && fragments() % num_workers == 0,
            "train.num_workers must divide the number of fragments");
    require(minibatch > 0 && minibatch <= train_batch, "train.minibatch must lie in [1, train_batch]");
    require(!hidden.empty(), "train.hidden must list at least one layer");
    require(checkpoint_every > 0, "train.checkpoint_every must be positive");
}

struct Trainer::Rollout {
    std::size_t steps = 0;
    std::vector<double> obs_norm;
    std::vector<double> obs_raw;
    std::vector<int> actions;
    std::vector<double> log_probs;
    std::vector<double> logits;
    std::vector<double> values;
    std::vector<double> rewards;
    std::vector<std::uint8_t> dones;
    std::vector<double> bootstrap;  // one per fragment
    std::vector<std::vector<FinishedEpisode>> episodes;  // per worker

    Rollout(std::size_t n, std::size_t dim, std::size_t n_actions, std::size_t fragments, std::size_t workers)
        : steps(n),
          obs_norm(n * dim),
          obs_raw(n * dim),
          actions(n),
          log_probs(n),
          logits(n * n_actions),
          values(n),
          rewards(n),
          dones(n),
          bootstrap(fragments),
          episodes(workers) {}
};

Trainer::Trainer(TrainConfig cfg, EnvFactory factory) : cfg_(std::move(cfg)), factory_(std::move(factory)) {
    cfg_.validate();
    workers_.resize(static_cast<std::size_t>(cfg_.num_workers));
    for (std::size_t w = 0; w < workers_.size(); ++w) {
        workers_[w].rng = Rng(cfg_.seed ^ static_cast<std::uint64_t>(w));
        workers_[w].env = factory_();
    }
    obs_dim_ = workers_.front().env->observation_size();

    Rng init_rng(splitmix64(cfg_.seed));
    policy_.params = MlpParams::initialize(obs_dim_, cfg_.hidden, kNumActions, init_rng, cfg_.init);
    policy_.normalizer = ObsNormalizer(obs_dim_);
    adam_ = Adam(policy_.params, cfg_.learning_rate, cfg_.adam_beta1, cfg_.adam_beta2, cfg_.adam_eps);
    shuffle_rng_ = Rng(splitmix64(cfg_.seed ^ 0x5bd1e995ULL));
    kl_coeff_ = cfg_.kl_coeff_init;

    for (auto& w : workers_) start_episode(w);
}

void Trainer::start_episode(Worker& w) {
    w.episode_seed = w.rng.next_u64();
    w.obs = w.env->reset(w.episode_seed);
    w.episode_actions.clear();
    w.episode_return = 0.0;
}

void Trainer::collect(Worker& w, Rollout& out, std::size_t worker_index) const {
    const std::size_t T = static_cast<std::size_t>(cfg_.fragment_length);
    const std::size_t F = static_cast<std::size_t>(cfg_.fragments_per_worker());
    const std::size_t A = kNumActions;
    const std::size_t D = obs_dim_;
    auto& finished = out.episodes[worker_index];

    for (std::size_t f = 0; f < F; ++f) {
        const std::size_t frag = worker_index * F + f;
        for (std::size_t t = 0; t < T; ++t) {
            const std::size_t i = frag * T + t;
            std::copy(w.obs.begin(), w.obs.end(), out.obs_raw.begin() + static_cast<std::ptrdiff_t>(i * D));
            const std::span<double> norm(out.obs_norm.data() + i * D, D);
            if (cfg_.normalize_observations) {
                policy_.normalizer.normalize(w.obs, norm);
            } else {
                std::copy(w.obs.begin(), w.obs.end(), norm.begin());
            }
            const PolicyOutput pol = forward(policy_.params, norm);
            const SampledAction sa = sample_action(pol.logits, w.rng);
            std::copy(pol.logits.begin(), pol.logits.end(), out.logits.begin() + static_cast<std::ptrdiff_t>(i * A));
            out.actions[i] = sa.action;
            out.log_probs[i] = sa.log_prob;
            out.values[i] = pol.value;

            StepOutcome step = w.env->step(sa.action);
            w.episode_actions.push_back(sa.action);
            w.episode_return += step.reward;
            out.rewards[i] = step.reward;
            out.dones[i] = step.done ? 1 : 0;
            if (step.done) {
                finished.push_back({w.episode_return, step.cause == TerminalCause::success});
                start_episode(w);
            } else {
                w.obs = std::move(step.observation);
            }
        }
        const std::size_t last = frag * T + T - 1;
        if (out.dones[last]) {
            out.bootstrap[frag] = 0.0;
        } else {
            std::vector<double> norm(D);
            if (cfg_.normalize_observations) {
                policy_.normalizer.normalize(w.obs, norm);
            } else {
                norm = w.obs;
            }
            out.bootstrap[frag] = forward(policy_.params, norm).value;
        }
    }
}

IterationMetrics Trainer::train_iteration() {
    const std::size_t N = static_cast<std::size_t>(cfg_.train_batch);
    const std::size_t T = static_cast<std::size_t>(cfg_.fragment_length);
    const std::size_t A = kNumActions;
    const std::size_t D = obs_dim_;
    const std::size_t n_frag = static_cast<std::size_t>(cfg_.fragments());

    Rollout ro(N, D, A, n_frag, workers_.size());
    const auto n_workers = static_cast<long>(workers_.size());
#pragma omp parallel for schedule(static)
    for (long w = 0; w < n_workers; ++w) {
        collect(workers_[static_cast<std::size_t>(w)], ro, static_cast<std::size_t>(w));
    }

    // Advantages per fragment.
    std::vector<double> advantages(N), targets(N);
    for (std::size_t f = 0; f < n_frag; ++f) {
        const std::size_t s = f * T;
        const Advantage adv = compute_gae(std::span(ro.rewards).subspan(s, T), std::span(ro.values).subspan(s, T),
                                          std::span(ro.dones).subspan(s, T), ro.bootstrap[f], cfg_.gamma,
                                          cfg_.lambda);
        std::copy(adv.advantages.begin(), adv.advantages.end(), advantages.begin() + static_cast<std::ptrdiff_t>(s));
        std::copy(adv.returns.begin(), adv.returns.end(), targets.begin() + static_cast<std::ptrdiff_t>(s));
    }

    if (cfg_.normalize_observations) {
        for (std::size_t i = 0; i < N; ++i) policy_.normalizer.update(std::span(ro.obs_raw).subspan(i * D, D));
    }

    LossCoefficients coeffs;
    coeffs.clip = cfg_.clip;
    coeffs.vf_coeff = cfg_.vf_coeff;
    coeffs.vf_clip = cfg_.vf_clip;
    coeffs.kl_coeff = kl_coeff_;
    coeffs.entropy_coeff = cfg_.entropy_coeff;

    std::vector<std::size_t> order(N);
    std::iota(order.begin(), order.end(), std::size_t{0});
    MlpParams grad = policy_.params;
    Minibatch mb;
    double policy_loss_sum = 0.0, vf_loss_sum = 0.0, entropy_sum = 0.0;
    int updates = 0;
    const std::size_t M = static_cast<std::size_t>(cfg_.minibatch);
    for (int epoch = 0; epoch < cfg_.epochs; ++epoch) {
        shuffle(order.begin(), order.end(), shuffle_rng_);
        for (std::size_t start = 0; start < N; start += M) {
            const std::size_t size = std::min(M, N - start);
            mb.size = size;
            mb.observations.resize(size * D);
            mb.actions.resize(size);
            mb.old_log_probs.resize(size);
            mb.old_logits.resize(size * A);
            mb.old_values.resize(size);
            mb.advantages.resize(size);
            mb.value_targets.resize(size);
            for (std::size_t b = 0; b < size; ++b) {
                const std::size_t i = order[start + b];
                std::copy_n(ro.obs_norm.begin() + static_cast<std::ptrdiff_t>(i * D), D,
                            mb.observations.begin() + static_cast<std::ptrdiff_t>(b * D));
                std::copy_n(ro.logits.begin() + static_cast<std::ptrdiff_t>(i * A), A,
                            mb.old_logits.begin() + static_cast<std::ptrdiff_t>(b * A));
                mb.actions[b] = ro.actions[i];
                mb.old_log_probs[b] = ro.log_probs[i];
                mb.old_values[b] = ro.values[i];
                mb.advantages[b] = advantages[i];
                mb.value_targets[b] = targets[i];
            }
            if (cfg_.normalize_advantages) normalize_advantages(mb.advantages);
            const LossResult loss = total_loss(policy_.params, mb, coeffs, &grad);
            adam_.step(policy_.params, grad);
            policy_loss_sum += loss.policy_loss;
            vf_loss_sum += loss.vf_loss;
            entropy_sum += loss.entropy;
            ++updates;
        }
    }

    BatchForward after;
    forward_batch(policy_.params, ro.obs_norm, N, after);
    const double kl = kl_estimate(ro.logits, after.logits, A);
    kl_coeff_ = adaptive_kl_update(kl_coeff_, kl, cfg_.kl_target);

    ++iteration_;
    env_steps_ += static_cast<std::int64_t>(N);

    IterationMetrics m;
    m.iteration = iteration_;
    double ret_sum = 0.0;
    int successes = 0;
    for (const auto& per_worker : ro.episodes) {
        for (const auto& e : per_worker) {
            ret_sum += e.total_return;
            successes += e.success ? 1 : 0;
            ++m.episodes;
        }
    }
    if (m.episodes > 0) {
        last_return_mean_ = ret_sum / m.episodes;
        last_success_mean_ = static_cast<double>(successes) / m.episodes;
    }
    m.episode_return_mean = last_return_mean_;
    m.arrival_success_mean = last_success_mean_;
    m.kl = kl;
    m.kl_coeff = kl_coeff_;
    m.policy_loss = policy_loss_sum / updates;
    m.vf_loss = vf_loss_sum / updates;
    m.entropy = entropy_sum / updates;
    m.env_steps = env_steps_;
    return m;
}

TrainerSnapshot Trainer::snapshot() const {
    TrainerSnapshot s;
    s.iteration = iteration_;
    s.kl_coeff = kl_coeff_;
    s.env_steps = env_steps_;
    s.last_return_mean = last_return_mean_;
    s.last_success_mean = last_success_mean_;
    s.shuffle_rng_state = shuffle_rng_.serialize();
    s.adam_t = adam_.t;
    s.adam_m = adam_.m;
    s.adam_v = adam_.v;
    for (const auto& w : workers_) {
        s.workers.push_back({w.rng.serialize(), w.episode_seed, w.episode_actions, w.episode_return});
    }
    return s;
}

void Trainer::restore(const Policy& policy, const TrainerSnapshot& snap) {
    if (policy.params.input_size() != obs_dim_) {
        throw std::invalid_argument("restore: checkpoint observation size does not match the environment");
    }
    if (snap.workers.size() != workers_.size()) {
        throw std::invalid_argument("restore: worker count differs from the training config");
    }
    policy_ = policy;
    iteration_ = snap.iteration;
    kl_coeff_ = snap.kl_coeff;
    env_steps_ = snap.env_steps;
    last_return_mean_ = snap.last_return_mean;
    last_success_mean_ = snap.last_success_mean;
    shuffle_rng_.deserialize(snap.shuffle_rng_state);
    adam_.t = snap.adam_t;
    adam_.m = snap.adam_m;
    adam_.v = snap.adam_v;
    for (std::size_t i = 0; i < workers_.size(); ++i) {
        auto& w = workers_[i];
        const auto& ws = snap.workers[i];
        w.episode_seed = ws.episode_seed;
        w.obs = w.env->reset(ws.episode_seed);
        for (int a : ws.episode_actions) {
            StepOutcome out = w.env->step(a);
            if (out.done) throw std::runtime_error("restore: replayed worker episode terminated early");
            w.obs = std::move(out.observation);
        }
        w.episode_actions = ws.episode_actions;
        w.episode_return = ws.episode_return;
        w.rng.deserialize(ws.rng_state);
    }
}

}  // namespace uwnav::ppo
