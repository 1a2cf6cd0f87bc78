#include "uwnav/ppo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>

namespace uwnav::ppo {

std::vector<double> log_softmax(std::span<const double> logits) {
    const double mx = *std::max_element(logits.begin(), logits.end());
    double sum = 0.0;
    for (double z : logits) sum += std::exp(z - mx);
    const double log_sum = std::log(sum);
    std::vector<double> out(logits.size());
    for (std::size_t k = 0; k < logits.size(); ++k) out[k] = (logits[k] - mx) - log_sum;
    return out;
}

std::vector<double> softmax(std::span<const double> logits) {
    auto out = log_softmax(logits);
    for (double& v : out) v = std::exp(v);
    return out;
}

SampledAction sample_action(std::span<const double> logits, Rng& rng) {
    const auto logp = log_softmax(logits);
    const double u = rng.uniform();
    double cum = 0.0;
    int chosen = -1;
    int last_positive = 0;
    for (std::size_t k = 0; k < logp.size(); ++k) {
        const double p = std::exp(logp[k]);
        if (p > 0.0) last_positive = static_cast<int>(k);
        cum += p;
        if (chosen < 0 && u < cum && p > 0.0) chosen = static_cast<int>(k);
    }
    // Rounding can leave cum slightly below u.
    if (chosen < 0) chosen = last_positive;
    return {chosen, logp[static_cast<std::size_t>(chosen)]};
}

int greedy_action(std::span<const double> logits) {
    return static_cast<int>(std::max_element(logits.begin(), logits.end()) - logits.begin());
}

Advantage compute_gae(std::span<const double> rewards, std::span<const double> values,
                      std::span<const std::uint8_t> dones, double bootstrap, double gamma, double lambda) {
    const std::size_t n = rewards.size();
    if (values.size() != n || dones.size() != n) {
        throw std::invalid_argument("compute_gae: rewards, values and dones must have equal length");
    }
    Advantage out;
    out.advantages.assign(n, 0.0);
    out.returns.assign(n, 0.0);
    double next_value = bootstrap;
    double next_adv = 0.0;
    for (std::size_t t = n; t-- > 0;) {
        const double live = dones[t] ? 0.0 : 1.0;
        const double delta = rewards[t] + gamma * next_value * live - values[t];
        const double adv = delta + gamma * lambda * live * next_adv;
        out.advantages[t] = adv;
        out.returns[t] = adv + values[t];
        next_value = values[t];
        next_adv = adv;
    }
    return out;
}

double clipped_surrogate(double log_prob_new, double log_prob_old, double advantage, double clip) {
    const double ratio = std::exp(log_prob_new - log_prob_old);
    const double clipped = std::clamp(ratio, 1.0 - clip, 1.0 + clip);
    return std::min(ratio * advantage, clipped * advantage);
}

double value_loss(double value_new, double value_old, double target, double vf_clip) {
    const double unclipped = (value_new - target) * (value_new - target);
    const double v_clipped = value_old + std::clamp(value_new - value_old, -vf_clip, vf_clip);
    const double clipped = (v_clipped - target) * (v_clipped - target);
    return std::max(unclipped, clipped);
}

double kl_categorical(std::span<const double> logits_old, std::span<const double> logits_new) {
    const auto lp_old = log_softmax(logits_old);
    const auto lp_new = log_softmax(logits_new);
    double kl = 0.0;
    for (std::size_t k = 0; k < lp_old.size(); ++k) {
        const double p = std::exp(lp_old[k]);
        if (p > 0.0) kl += p * (lp_old[k] - lp_new[k]);
    }
    return kl;
}

double entropy(std::span<const double> logits) {
    const auto lp = log_softmax(logits);
    double h = 0.0;
    for (double l : lp) {
        const double p = std::exp(l);
        if (p > 0.0) h -= p * l;
    }
    return h;
}

double kl_estimate(std::span<const double> logits_old, std::span<const double> logits_new,
                   std::size_t n_actions) {
    const std::size_t rows = logits_old.size() / n_actions;
    if (rows == 0) return 0.0;
    double sum = 0.0;
    for (std::size_t r = 0; r < rows; ++r) {
        sum += kl_categorical(logits_old.subspan(r * n_actions, n_actions),
                              logits_new.subspan(r * n_actions, n_actions));
    }
    return sum / static_cast<double>(rows);
}

LossResult total_loss(const MlpParams& params, const Minibatch& mb, const LossCoefficients& coeffs,
                      MlpParams* grad) {
    const std::size_t n = mb.size;
    const std::size_t n_actions = params.n_actions();
    BatchForward fwd;
    forward_batch(params, mb.observations, n, fwd);

    std::vector<double> dlogits(n * n_actions, 0.0);
    std::vector<double> dvalues(n, 0.0);
    const double inv_n = 1.0 / static_cast<double>(n);

    LossResult res;
    double surr_sum = 0.0, vf_sum = 0.0, kl_sum = 0.0, ent_sum = 0.0;
    for (std::size_t b = 0; b < n; ++b) {
        const std::span<const double> z(fwd.logits.data() + b * n_actions, n_actions);
        const std::span<const double> z_old(mb.old_logits.data() + b * n_actions, n_actions);
        const auto logp = log_softmax(z);
        const auto logp_old = log_softmax(z_old);
        const auto a = static_cast<std::size_t>(mb.actions[b]);
        const double adv = mb.advantages[b];

        // Policy term.
        const double ratio = std::exp(logp[a] - mb.old_log_probs[b]);
        const double clipped = std::clamp(ratio, 1.0 - coeffs.clip, 1.0 + coeffs.clip);
        const bool unclipped_active = ratio * adv <= clipped * adv;
        surr_sum += std::min(ratio * adv, clipped * adv);
        const double dsurr_dlogp = unclipped_active ? ratio * adv : 0.0;

        double kl = 0.0, h = 0.0;
        std::vector<double> p(n_actions);
        for (std::size_t k = 0; k < n_actions; ++k) {
            p[k] = std::exp(logp[k]);
            const double po = std::exp(logp_old[k]);
            if (po > 0.0) kl += po * (logp_old[k] - logp[k]);
            if (p[k] > 0.0) h -= p[k] * logp[k];
        }
        kl_sum += kl;
        ent_sum += h;

        double* dz = dlogits.data() + b * n_actions;
        for (std::size_t k = 0; k < n_actions; ++k) {
            const double po = std::exp(logp_old[k]);
            const double dlogp_a = (k == a ? 1.0 : 0.0) - p[k];
            double g = -inv_n * dsurr_dlogp * dlogp_a;
            g += coeffs.kl_coeff * inv_n * (p[k] - po);
            if (coeffs.entropy_coeff != 0.0 && p[k] > 0.0) {
                g += coeffs.entropy_coeff * inv_n * p[k] * (logp[k] + h);
            }
            dz[k] = g;
        }

        // Value term.
        const double v = fwd.values[b];
        const double v_old = mb.old_values[b];
        const double target = mb.value_targets[b];
        const double unclipped_err = (v - target) * (v - target);
        const double delta = v - v_old;
        const double v_clipped = v_old + std::clamp(delta, -coeffs.vf_clip, coeffs.vf_clip);
        const double clipped_err = (v_clipped - target) * (v_clipped - target);
        vf_sum += std::max(unclipped_err, clipped_err);
        double dv = 0.0;
        if (unclipped_err >= clipped_err) {
            dv = 2.0 * (v - target);
        } else if (std::abs(delta) < coeffs.vf_clip) {
            dv = 2.0 * (v_clipped - target);
        }
        dvalues[b] = coeffs.vf_coeff * inv_n * dv;
    }

    res.policy_loss = -surr_sum * inv_n;
    res.vf_loss = vf_sum * inv_n;
    res.kl = kl_sum * inv_n;
    res.entropy = ent_sum * inv_n;
    res.total = res.policy_loss + coeffs.vf_coeff * res.vf_loss + coeffs.kl_coeff * res.kl -
                coeffs.entropy_coeff * res.entropy;
    if (!std::isfinite(res.total)) {
        std::ostringstream msg;
        msg << "non-finite PPO loss (policy " << res.policy_loss << ", vf " << res.vf_loss << ", kl " << res.kl
            << ", entropy " << res.entropy << ")";
        throw NonFiniteLoss(msg.str());
    }
    if (grad != nullptr) backward_batch(params, fwd, dlogits, dvalues, *grad);
    return res;
}

void normalize_advantages(std::span<double> advantages) {
    if (advantages.empty()) return;
    const double n = static_cast<double>(advantages.size());
    double mean = 0.0;
    for (double a : advantages) mean += a;
    mean /= n;
    double var = 0.0;
    for (double a : advantages) var += (a - mean) * (a - mean);
    const double sd = std::sqrt(var / n);
    for (double& a : advantages) a = (a - mean) / (sd + 1e-8);
}

double adaptive_kl_update(double kl_coeff, double measured_kl, double kl_target) {
    if (measured_kl > 2.0 * kl_target) return kl_coeff * 1.5;
    if (measured_kl < 0.5 * kl_target) return kl_coeff * 0.5;
    return kl_coeff;
}

Adam::Adam(const MlpParams& shape, double lr, double b1, double b2, double epsilon)
    : learning_rate(lr), beta1(b1), beta2(b2), eps(epsilon), m(shape), v(shape) {
    m.set_zero();
    v.set_zero();
}

void Adam::step(MlpParams& params, const MlpParams& grad) {
    ++t;
    const double c1 = 1.0 - std::pow(beta1, static_cast<double>(t));
    const double c2 = 1.0 - std::pow(beta2, static_cast<double>(t));

    std::vector<std::span<double>> p_t, m_t, v_t;
    std::vector<std::span<const double>> g_t;
    params.for_each_tensor([&](std::span<double> s) { p_t.push_back(s); });
    m.for_each_tensor([&](std::span<double> s) { m_t.push_back(s); });
    v.for_each_tensor([&](std::span<double> s) { v_t.push_back(s); });
    grad.for_each_tensor([&](std::span<const double> s) { g_t.push_back(s); });

    for (std::size_t k = 0; k < p_t.size(); ++k) {
        auto p = p_t[k];
        auto mk = m_t[k];
        auto vk = v_t[k];
        auto g = g_t[k];
        for (std::size_t i = 0; i < p.size(); ++i) {
            mk[i] = beta1 * mk[i] + (1.0 - beta1) * g[i];
            vk[i] = beta2 * vk[i] + (1.0 - beta2) * g[i] * g[i];
            const double m_hat = mk[i] / c1;
            const double v_hat = vk[i] / c2;
            p[i] -= learning_rate * m_hat / (std::sqrt(v_hat) + eps);
        }
    }
}

void ObsNormalizer::update(std::span<const double> obs) {
    if (obs.size() != mean_.size()) throw std::invalid_argument("normalizer: observation size mismatch");
    count_ += 1.0;
    for (std::size_t i = 0; i < obs.size(); ++i) {
        const double delta = obs[i] - mean_[i];
        mean_[i] += delta / count_;
        m2_[i] += delta * (obs[i] - mean_[i]);
    }
}

void ObsNormalizer::normalize(std::span<const double> obs, std::span<double> out) const {
    if (obs.size() != mean_.size() || out.size() != obs.size()) {
        throw std::invalid_argument("normalizer: observation size mismatch");
    }
    if (count_ == 0.0) {
        std::copy(obs.begin(), obs.end(), out.begin());
        return;
    }
    for (std::size_t i = 0; i < obs.size(); ++i) {
        const double z = (obs[i] - mean_[i]) / std::sqrt(m2_[i] / count_ + eps_);
        out[i] = std::clamp(z, -clip_, clip_);
    }
}

std::vector<double> ObsNormalizer::normalize(std::span<const double> obs) const {
    std::vector<double> out(obs.size());
    normalize(obs, out);
    return out;
}

void ObsNormalizer::restore(double count, std::vector<double> mean, std::vector<double> m2, double eps,
                            double clip) {
    if (mean.size() != m2.size()) throw std::invalid_argument("normalizer: inconsistent state");
    count_ = count;
    mean_ = std::move(mean);
    m2_ = std::move(m2);
    eps_ = eps;
    clip_ = clip;
}

PolicyOutput Policy::evaluate(std::span<const double> raw_obs) const {
    return forward(params, normalizer.normalize(raw_obs));
}

int Policy::act_greedy(std::span<const double> raw_obs) const { return greedy_action(evaluate(raw_obs).logits); }

SampledAction Policy::act_stochastic(std::span<const double> raw_obs, Rng& rng) const {
    return sample_action(evaluate(raw_obs).logits, rng);
}

}  // namespace uwnav::ppo
