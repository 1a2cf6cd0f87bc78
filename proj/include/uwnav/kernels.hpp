#pragma once

#include <cstddef>
#include <span>

// Dense kernels behind the MLP. All matrices are row-major.
//   x      [rows x in]     layer input
//   weight [in x out]      weight[i * out + o] connects input i to output o
//   y      [rows x out]
//
// Every output element is accumulated in a fixed order (bias first, then
// inputs in increasing index, or batch rows in increasing index for
// parameter gradients). The OpenMP kernels only split work across whole
// output elements, so they are bit-identical to the serial reference for any
// thread count.

namespace uwnav::kernels {

/// y = x * weight + bias
void affine_forward(std::span<const double> x, std::size_t rows, std::size_t in,
                    std::span<const double> weight, std::span<const double> bias, std::size_t out,
                    std::span<double> y);

/// dx = dy * weight^T
void affine_backward_input(std::span<const double> dy, std::size_t rows, std::size_t out,
                           std::span<const double> weight, std::size_t in, std::span<double> dx);

/// dweight += x^T * dy, dbias += column sums of dy
void affine_backward_params(std::span<const double> dy, std::span<const double> x, std::size_t rows,
                            std::size_t in, std::size_t out, std::span<double> dweight,
                            std::span<double> dbias);

void tanh_inplace(std::span<double> v);

/// grad *= (1 - act^2), act being tanh outputs.
void tanh_backward_inplace(std::span<const double> act, std::span<double> grad);

namespace reference {

void affine_forward(std::span<const double> x, std::size_t rows, std::size_t in,
                    std::span<const double> weight, std::span<const double> bias, std::size_t out,
                    std::span<double> y);
void affine_backward_input(std::span<const double> dy, std::size_t rows, std::size_t out,
                           std::span<const double> weight, std::size_t in, std::span<double> dx);
void affine_backward_params(std::span<const double> dy, std::span<const double> x, std::size_t rows,
                            std::size_t in, std::size_t out, std::span<double> dweight,
                            std::span<double> dbias);

}  // namespace reference

}  // namespace uwnav::kernels
