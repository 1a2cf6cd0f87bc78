#include "uwnav/mlp.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "uwnav/kernels.hpp"

namespace uwnav::ppo {

namespace {

// Gaussian matrix with orthonormal rows or columns (whichever is the smaller
// set), via modified Gram-Schmidt. Stored [in x out].
std::vector<double> orthogonal(std::size_t in, std::size_t out, double gain, Rng& rng) {
    std::vector<double> m(in * out);
    for (double& v : m) v = rng.normal();

    // Orthonormalise the `count` vectors of length `len`; vectors are either
    // the rows (in <= out) or the columns of m.
    const bool rows = in <= out;
    const std::size_t count = rows ? in : out;
    const std::size_t len = rows ? out : in;
    auto at = [&](std::size_t vec, std::size_t k) -> double& {
        return rows ? m[vec * out + k] : m[k * out + vec];
    };
    for (std::size_t a = 0; a < count; ++a) {
        for (std::size_t b = 0; b < a; ++b) {
            double proj = 0.0;
            for (std::size_t k = 0; k < len; ++k) proj += at(a, k) * at(b, k);
            for (std::size_t k = 0; k < len; ++k) at(a, k) -= proj * at(b, k);
        }
        double nrm = 0.0;
        for (std::size_t k = 0; k < len; ++k) nrm += at(a, k) * at(a, k);
        nrm = std::sqrt(nrm);
        for (std::size_t k = 0; k < len; ++k) at(a, k) /= nrm;
    }
    for (double& v : m) v *= gain;
    return m;
}

}  // namespace

MlpParams MlpParams::zeros(std::size_t input_size, const std::vector<std::size_t>& hidden,
                           std::size_t n_actions) {
    MlpParams p;
    std::size_t prev = input_size;
    for (std::size_t h : hidden) {
        p.trunk.emplace_back(prev, h);
        prev = h;
    }
    p.policy_head = DenseLayer(prev, n_actions);
    p.value_head = DenseLayer(prev, 1);
    return p;
}

MlpParams MlpParams::initialize(std::size_t input_size, const std::vector<std::size_t>& hidden,
                                std::size_t n_actions, Rng& rng, InitGains gains) {
    MlpParams p = zeros(input_size, hidden, n_actions);
    for (auto& l : p.trunk) l.weight = orthogonal(l.in, l.out, gains.trunk, rng);
    p.policy_head.weight = orthogonal(p.policy_head.in, p.policy_head.out, gains.policy, rng);
    p.value_head.weight = orthogonal(p.value_head.in, p.value_head.out, gains.value, rng);
    return p;
}

std::vector<std::size_t> MlpParams::hidden_sizes() const {
    std::vector<std::size_t> out;
    for (const auto& l : trunk) out.push_back(l.out);
    return out;
}

std::size_t MlpParams::parameter_count() const {
    std::size_t n = 0;
    for_each_tensor([&](std::span<const double> t) { n += t.size(); });
    return n;
}

void MlpParams::set_zero() {
    for_each_tensor([](std::span<double> t) {
        for (double& v : t) v = 0.0;
    });
}

bool MlpParams::operator==(const MlpParams& other) const {
    if (trunk.size() != other.trunk.size()) return false;
    for (std::size_t l = 0; l < trunk.size(); ++l) {
        if (trunk[l].weight != other.trunk[l].weight || trunk[l].bias != other.trunk[l].bias) return false;
    }
    return policy_head.weight == other.policy_head.weight && policy_head.bias == other.policy_head.bias &&
           value_head.weight == other.value_head.weight && value_head.bias == other.value_head.bias;
}

void forward_batch(const MlpParams& params, std::span<const double> inputs, std::size_t batch,
                   BatchForward& out) {
    const std::size_t in = params.input_size();
    if (inputs.size() != batch * in) {
        throw std::invalid_argument("forward: expected " + std::to_string(batch * in) + " inputs, got " +
                                    std::to_string(inputs.size()));
    }
    out.batch = batch;
    out.activations.resize(params.trunk.size() + 1);
    out.activations[0].assign(inputs.begin(), inputs.end());
    for (std::size_t l = 0; l < params.trunk.size(); ++l) {
        const auto& layer = params.trunk[l];
        auto& next = out.activations[l + 1];
        next.resize(batch * layer.out);
        kernels::affine_forward(out.activations[l], batch, layer.in, layer.weight, layer.bias, layer.out, next);
        kernels::tanh_inplace(next);
    }
    const auto& features = out.activations.back();
    const auto& ph = params.policy_head;
    out.logits.resize(batch * ph.out);
    kernels::affine_forward(features, batch, ph.in, ph.weight, ph.bias, ph.out, out.logits);
    const auto& vh = params.value_head;
    out.values.resize(batch);
    kernels::affine_forward(features, batch, vh.in, vh.weight, vh.bias, 1, out.values);
}

PolicyOutput forward(const MlpParams& params, std::span<const double> input) {
    BatchForward fwd;
    forward_batch(params, input, 1, fwd);
    return {std::move(fwd.logits), fwd.values[0]};
}

void backward_batch(const MlpParams& params, const BatchForward& fwd, std::span<const double> dlogits,
                    std::span<const double> dvalues, MlpParams& grad) {
    const std::size_t batch = fwd.batch;
    grad.set_zero();
    const auto& features = fwd.activations.back();
    const auto& ph = params.policy_head;
    const auto& vh = params.value_head;

    kernels::affine_backward_params(dlogits, features, batch, ph.in, ph.out, grad.policy_head.weight,
                                    grad.policy_head.bias);
    kernels::affine_backward_params(dvalues, features, batch, vh.in, 1, grad.value_head.weight,
                                    grad.value_head.bias);

    if (params.trunk.empty()) return;

    std::vector<double> dfeat(batch * ph.in);
    std::vector<double> dfeat_value(batch * vh.in);
    kernels::affine_backward_input(dlogits, batch, ph.out, ph.weight, ph.in, dfeat);
    kernels::affine_backward_input(dvalues, batch, 1, vh.weight, vh.in, dfeat_value);
    for (std::size_t k = 0; k < dfeat.size(); ++k) dfeat[k] += dfeat_value[k];

    std::vector<double> dprev;
    for (std::size_t l = params.trunk.size(); l-- > 0;) {
        const auto& layer = params.trunk[l];
        kernels::tanh_backward_inplace(fwd.activations[l + 1], dfeat);
        kernels::affine_backward_params(dfeat, fwd.activations[l], batch, layer.in, layer.out,
                                        grad.trunk[l].weight, grad.trunk[l].bias);
        if (l == 0) break;
        dprev.resize(batch * layer.in);
        kernels::affine_backward_input(dfeat, batch, layer.out, layer.weight, layer.in, dprev);
        std::swap(dfeat, dprev);
    }
}

}  // namespace uwnav::ppo
