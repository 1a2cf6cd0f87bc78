#include "uwnav/kernels.hpp"

#include <cmath>
#include <vector>

namespace uwnav::kernels {

namespace {

// Below this many multiply-adds a parallel region costs more than it saves.
constexpr std::size_t kParallelWork = 1 << 14;

}  // namespace

void affine_forward(std::span<const double> x, std::size_t rows, std::size_t in,
                    std::span<const double> weight, std::span<const double> bias, std::size_t out,
                    std::span<double> y) {
    const double* xp = x.data();
    const double* wp = weight.data();
    const double* bp = bias.data();
    double* yp = y.data();
    const auto n = static_cast<long>(rows);
#pragma omp parallel for schedule(static) if (rows * in * out > kParallelWork)
    for (long r = 0; r < n; ++r) {
        double* yr = yp + r * out;
        const double* xr = xp + r * in;
        for (std::size_t o = 0; o < out; ++o) yr[o] = bp[o];
        for (std::size_t i = 0; i < in; ++i) {
            const double xi = xr[i];
            const double* wi = wp + i * out;
            for (std::size_t o = 0; o < out; ++o) yr[o] += xi * wi[o];
        }
    }
}

void affine_backward_input(std::span<const double> dy, std::size_t rows, std::size_t out,
                           std::span<const double> weight, std::size_t in, std::span<double> dx) {
    // Transposed copy so the inner loop runs over contiguous memory.
    std::vector<double> wt(in * out);
    for (std::size_t i = 0; i < in; ++i)
        for (std::size_t o = 0; o < out; ++o) wt[o * in + i] = weight[i * out + o];

    const double* dyp = dy.data();
    const double* wtp = wt.data();
    double* dxp = dx.data();
    const auto n = static_cast<long>(rows);
#pragma omp parallel for schedule(static) if (rows * in * out > kParallelWork)
    for (long r = 0; r < n; ++r) {
        double* dxr = dxp + r * in;
        const double* dyr = dyp + r * out;
        for (std::size_t i = 0; i < in; ++i) dxr[i] = 0.0;
        for (std::size_t o = 0; o < out; ++o) {
            const double g = dyr[o];
            const double* wo = wtp + o * in;
            for (std::size_t i = 0; i < in; ++i) dxr[i] += g * wo[i];
        }
    }
}

void affine_backward_params(std::span<const double> dy, std::span<const double> x, std::size_t rows,
                            std::size_t in, std::size_t out, std::span<double> dweight,
                            std::span<double> dbias) {
    const double* dyp = dy.data();
    const double* xp = x.data();
    double* dwp = dweight.data();
    const auto n_in = static_cast<long>(in);
#pragma omp parallel for schedule(static) if (rows * in * out > kParallelWork)
    for (long i = 0; i < n_in; ++i) {
        double* dwi = dwp + i * out;
        for (std::size_t r = 0; r < rows; ++r) {
            const double xi = xp[r * in + i];
            const double* dyr = dyp + r * out;
            for (std::size_t o = 0; o < out; ++o) dwi[o] += xi * dyr[o];
        }
    }
    for (std::size_t r = 0; r < rows; ++r) {
        const double* dyr = dyp + r * out;
        for (std::size_t o = 0; o < out; ++o) dbias[o] += dyr[o];
    }
}

void tanh_inplace(std::span<double> v) {
    for (double& e : v) e = std::tanh(e);
}

void tanh_backward_inplace(std::span<const double> act, std::span<double> grad) {
    for (std::size_t k = 0; k < grad.size(); ++k) grad[k] *= 1.0 - act[k] * act[k];
}

namespace reference {

void affine_forward(std::span<const double> x, std::size_t rows, std::size_t in,
                    std::span<const double> weight, std::span<const double> bias, std::size_t out,
                    std::span<double> y) {
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t o = 0; o < out; ++o) {
            double acc = bias[o];
            for (std::size_t i = 0; i < in; ++i) acc += x[r * in + i] * weight[i * out + o];
            y[r * out + o] = acc;
        }
    }
}

void affine_backward_input(std::span<const double> dy, std::size_t rows, std::size_t out,
                           std::span<const double> weight, std::size_t in, std::span<double> dx) {
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t i = 0; i < in; ++i) {
            double acc = 0.0;
            for (std::size_t o = 0; o < out; ++o) acc += dy[r * out + o] * weight[i * out + o];
            dx[r * in + i] = acc;
        }
    }
}

void affine_backward_params(std::span<const double> dy, std::span<const double> x, std::size_t rows,
                            std::size_t in, std::size_t out, std::span<double> dweight,
                            std::span<double> dbias) {
    for (std::size_t i = 0; i < in; ++i) {
        for (std::size_t o = 0; o < out; ++o) {
            double acc = dweight[i * out + o];
            for (std::size_t r = 0; r < rows; ++r) acc += x[r * in + i] * dy[r * out + o];
            dweight[i * out + o] = acc;
        }
    }
    for (std::size_t o = 0; o < out; ++o) {
        double acc = dbias[o];
        for (std::size_t r = 0; r < rows; ++r) acc += dy[r * out + o];
        dbias[o] = acc;
    }
}

}  // namespace reference

}  // namespace uwnav::kernels
