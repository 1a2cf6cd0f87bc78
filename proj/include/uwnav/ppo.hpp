#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "uwnav/mlp.hpp"
#include "uwnav/rng.hpp"

namespace uwnav::ppo {

std::vector<double> log_softmax(std::span<const double> logits);
std::vector<double> softmax(std::span<const double> logits);

struct SampledAction {
    int action;
    double log_prob;
};

/// Categorical draw consuming exactly one Rng::uniform.
SampledAction sample_action(std::span<const double> logits, Rng& rng);
/// Lowest index among the maximal logits.
int greedy_action(std::span<const double> logits);

struct Advantage {
    std::vector<double> advantages;
    std::vector<double> returns;  // value targets: advantage + value
};

/// GAE over one rollout fragment. dones[t] != 0 means the episode ended at
/// step t, which cuts both the bootstrap and the recursion. `bootstrap` is
/// V(s_T) for the state after the last step. Throws on length mismatch.
Advantage compute_gae(std::span<const double> rewards, std::span<const double> values,
                      std::span<const std::uint8_t> dones, double bootstrap, double gamma, double lambda);

/// min(r * A, clip(r, 1 - eps, 1 + eps) * A) with r = exp(new - old).
double clipped_surrogate(double log_prob_new, double log_prob_old, double advantage, double clip);

/// max((V - target)^2, (V_old + clamp(V - V_old, -c, c) - target)^2)
double value_loss(double value_new, double value_old, double target, double vf_clip);

/// KL(old || new) for one categorical pair given logits.
double kl_categorical(std::span<const double> logits_old, std::span<const double> logits_new);

double entropy(std::span<const double> logits);

/// Mean KL(old || new) over a batch of logit rows.
double kl_estimate(std::span<const double> logits_old, std::span<const double> logits_new,
                   std::size_t n_actions);

struct Minibatch {
    std::size_t size = 0;
    std::vector<double> observations;  // size x obs_dim, already normalised
    std::vector<int> actions;
    std::vector<double> old_log_probs;
    std::vector<double> old_logits;  // size x n_actions
    std::vector<double> old_values;
    std::vector<double> advantages;
    std::vector<double> value_targets;
};

struct LossCoefficients {
    double clip = 0.3;
    double vf_coeff = 1.0;
    double vf_clip = 10.0;
    double kl_coeff = 0.2;
    double entropy_coeff = 0.0;
};

struct LossResult {
    double total = 0.0;
    double policy_loss = 0.0;  // -mean(surrogate)
    double vf_loss = 0.0;
    double kl = 0.0;
    double entropy = 0.0;
};

class NonFiniteLoss : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// loss = -mean(surr) + vf * mean(value_loss) + kl_coeff * mean(KL) - ent * mean(H).
/// Writes exact gradients into `grad` (same shapes as params) when non-null.
/// Throws NonFiniteLoss if the loss is not finite.
LossResult total_loss(const MlpParams& params, const Minibatch& mb, const LossCoefficients& coeffs,
                      MlpParams* grad);

/// Subtract mean, divide by (std + 1e-8).
void normalize_advantages(std::span<double> advantages);

/// x1.5 above twice the target, x0.5 below half of it.
double adaptive_kl_update(double kl_coeff, double measured_kl, double kl_target);

class Adam {
public:
    Adam() = default;
    Adam(const MlpParams& shape, double learning_rate, double beta1 = 0.9, double beta2 = 0.999,
         double eps = 1e-8);

    void step(MlpParams& params, const MlpParams& grad);

    double learning_rate = 0.0;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    std::int64_t t = 0;
    MlpParams m;
    MlpParams v;
};

/// Running per-component mean and variance (Welford); normalised values are
/// clipped to +-clip.
class ObsNormalizer {
public:
    ObsNormalizer() = default;
    explicit ObsNormalizer(std::size_t dim, double eps = 1e-8, double clip = 10.0)
        : mean_(dim, 0.0), m2_(dim, 0.0), eps_(eps), clip_(clip) {}

    void update(std::span<const double> obs);
    void normalize(std::span<const double> obs, std::span<double> out) const;
    std::vector<double> normalize(std::span<const double> obs) const;

    std::size_t dim() const { return mean_.size(); }
    double count() const { return count_; }
    double variance(std::size_t i) const { return count_ > 0 ? m2_[i] / count_ : 1.0; }
    const std::vector<double>& mean() const { return mean_; }
    const std::vector<double>& m2() const { return m2_; }
    double eps() const { return eps_; }
    double clip() const { return clip_; }

    void restore(double count, std::vector<double> mean, std::vector<double> m2, double eps, double clip);

private:
    std::vector<double> mean_;
    std::vector<double> m2_;
    double count_ = 0.0;
    double eps_ = 1e-8;
    double clip_ = 10.0;
};

/// Network plus frozen observation statistics; what evaluation runs.
struct Policy {
    MlpParams params;
    ObsNormalizer normalizer;

    PolicyOutput evaluate(std::span<const double> raw_obs) const;
    int act_greedy(std::span<const double> raw_obs) const;
    SampledAction act_stochastic(std::span<const double> raw_obs, Rng& rng) const;
};

}  // namespace uwnav::ppo
