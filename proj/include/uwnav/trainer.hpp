#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "uwnav/environment.hpp"
#include "uwnav/ppo.hpp"
#include "uwnav/rng.hpp"

namespace uwnav::ppo {

struct TrainConfig {
    double learning_rate = 2.5e-4;
    double gamma = 0.95;
    double lambda = 1.0;
    double clip = 0.3;
    double kl_target = 0.01;
    double kl_coeff_init = 0.2;
    double entropy_coeff = 0.0;
    double vf_coeff = 1.0;
    double vf_clip = 10.0;
    int epochs = 30;
    int fragment_length = 30;
    int train_batch = 1950;
    int minibatch = 128;
    int num_workers = 5;
    std::vector<std::size_t> hidden{128, 128, 128};
    bool normalize_advantages = true;
    bool normalize_observations = true;
    double adam_beta1 = 0.9;
    double adam_beta2 = 0.999;
    double adam_eps = 1e-8;
    InitGains init;
    std::uint64_t seed = 0;
    int checkpoint_every = 10;

    int fragments() const { return train_batch / fragment_length; }
    int fragments_per_worker() const { return fragments() / num_workers; }

    void validate() const;
};

struct IterationMetrics {
    int iteration = 0;
    double episode_return_mean = 0.0;
    double arrival_success_mean = 0.0;
    int episodes = 0;
    double kl = 0.0;
    double kl_coeff = 0.0;
    double policy_loss = 0.0;
    double vf_loss = 0.0;
    double entropy = 0.0;
    std::int64_t env_steps = 0;
};

/// Enough to rebuild a worker bit-exactly: its RNG and the current episode,
/// which is restored by replaying `episode_actions` from `episode_seed`.
struct WorkerSnapshot {
    std::string rng_state;
    std::uint64_t episode_seed = 0;
    std::vector<int> episode_actions;
    double episode_return = 0.0;
};

struct TrainerSnapshot {
    int iteration = 0;
    double kl_coeff = 0.0;
    std::int64_t env_steps = 0;
    double last_return_mean = 0.0;
    double last_success_mean = 0.0;
    std::string shuffle_rng_state;
    std::int64_t adam_t = 0;
    MlpParams adam_m;
    MlpParams adam_v;
    std::vector<WorkerSnapshot> workers;
};

using EnvFactory = std::function<std::unique_ptr<EpisodicEnv>()>;

/// PPO learner. Rollouts run on `num_workers` independent environments (one
/// OpenMP task each); buffers are merged in worker order, so results do not
/// depend on the thread count.
class Trainer {
public:
    Trainer(TrainConfig cfg, EnvFactory factory);

    IterationMetrics train_iteration();

    const TrainConfig& config() const { return cfg_; }
    const Policy& policy() const { return policy_; }
    double kl_coeff() const { return kl_coeff_; }
    int iteration() const { return iteration_; }
    std::size_t observation_size() const { return obs_dim_; }

    TrainerSnapshot snapshot() const;
    /// Replaces learner state and rebuilds each worker's current episode.
    void restore(const Policy& policy, const TrainerSnapshot& snap);

private:
    struct Worker {
        Rng rng;
        std::unique_ptr<EpisodicEnv> env;
        std::vector<double> obs;
        std::uint64_t episode_seed = 0;
        std::vector<int> episode_actions;
        double episode_return = 0.0;
    };

    struct Rollout;
    void collect(Worker& w, Rollout& out, std::size_t offset) const;
    static void start_episode(Worker& w);

    TrainConfig cfg_;
    EnvFactory factory_;
    std::size_t obs_dim_ = 0;
    Policy policy_;
    Adam adam_;
    Rng shuffle_rng_;
    double kl_coeff_ = 0.0;
    int iteration_ = 0;
    std::int64_t env_steps_ = 0;
    double last_return_mean_ = 0.0;
    double last_success_mean_ = 0.0;
    std::vector<Worker> workers_;
};

}  // namespace uwnav::ppo
