#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "uwnav/rng.hpp"

namespace uwnav::ppo {

/// Fully connected layer; weight is [in x out] row-major.
struct DenseLayer {
    std::size_t in = 0;
    std::size_t out = 0;
    std::vector<double> weight;
    std::vector<double> bias;

    DenseLayer() = default;
    DenseLayer(std::size_t in_size, std::size_t out_size)
        : in(in_size), out(out_size), weight(in_size * out_size, 0.0), bias(out_size, 0.0) {}
};

struct InitGains {
    double trunk = 1.4142135623730951;
    double policy = 0.01;
    double value = 1.0;
};

/// Shared tanh trunk with a linear policy head (logits) and a linear value head.
struct MlpParams {
    std::vector<DenseLayer> trunk;
    DenseLayer policy_head;
    DenseLayer value_head;

    static MlpParams zeros(std::size_t input_size, const std::vector<std::size_t>& hidden,
                           std::size_t n_actions);
    /// Orthogonal weights scaled by the per-part gain, zero biases.
    static MlpParams initialize(std::size_t input_size, const std::vector<std::size_t>& hidden,
                                std::size_t n_actions, Rng& rng, InitGains gains = {});

    std::size_t input_size() const { return trunk.empty() ? policy_head.in : trunk.front().in; }
    std::size_t n_actions() const { return policy_head.out; }
    std::vector<std::size_t> hidden_sizes() const;
    std::size_t parameter_count() const;

    /// Visits weight and bias buffers in a fixed order.
    template <typename F>
    void for_each_tensor(F&& f) {
        for (auto& l : trunk) {
            f(std::span<double>(l.weight));
            f(std::span<double>(l.bias));
        }
        f(std::span<double>(policy_head.weight));
        f(std::span<double>(policy_head.bias));
        f(std::span<double>(value_head.weight));
        f(std::span<double>(value_head.bias));
    }
    template <typename F>
    void for_each_tensor(F&& f) const {
        for (const auto& l : trunk) {
            f(std::span<const double>(l.weight));
            f(std::span<const double>(l.bias));
        }
        f(std::span<const double>(policy_head.weight));
        f(std::span<const double>(policy_head.bias));
        f(std::span<const double>(value_head.weight));
        f(std::span<const double>(value_head.bias));
    }

    void set_zero();
    bool operator==(const MlpParams& other) const;
};

/// Activations kept for the backward pass.
struct BatchForward {
    std::size_t batch = 0;
    std::vector<std::vector<double>> activations;  // [0] = input, [l + 1] = tanh output of trunk l
    std::vector<double> logits;                    // batch x n_actions
    std::vector<double> values;                    // batch
};

/// Throws std::invalid_argument on a shape mismatch.
void forward_batch(const MlpParams& params, std::span<const double> inputs, std::size_t batch,
                   BatchForward& out);

struct PolicyOutput {
    std::vector<double> logits;
    double value = 0.0;
};

PolicyOutput forward(const MlpParams& params, std::span<const double> input);

/// Overwrites `grad` with dL/dparams given dL/dlogits and dL/dvalues.
void backward_batch(const MlpParams& params, const BatchForward& fwd, std::span<const double> dlogits,
                    std::span<const double> dvalues, MlpParams& grad);

}  // namespace uwnav::ppo
