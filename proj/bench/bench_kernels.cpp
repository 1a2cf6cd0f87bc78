// Serial reference vs OpenMP kernels on training-sized shapes.
// Args: rows, in, out. Thread count follows OMP_NUM_THREADS.

#include <benchmark/benchmark.h>

#include <vector>

#include "uwnav/kernels.hpp"
#include "uwnav/rng.hpp"

namespace {

using namespace uwnav;

struct Buffers {
    std::size_t rows, in, out;
    std::vector<double> x, w, b, y, dy, dx, dw, db;

    explicit Buffers(const benchmark::State& st)
        : rows(static_cast<std::size_t>(st.range(0))),
          in(static_cast<std::size_t>(st.range(1))),
          out(static_cast<std::size_t>(st.range(2))) {
        Rng rng(1);
        auto fill = [&](std::vector<double>& v, std::size_t n) {
            v.resize(n);
            for (auto& e : v) e = rng.normal();
        };
        fill(x, rows * in);
        fill(w, in * out);
        fill(b, out);
        fill(dy, rows * out);
        y.resize(rows * out);
        dx.resize(rows * in);
        dw.assign(in * out, 0.0);
        db.assign(out, 0.0);
    }

    void count(benchmark::State& st) const {
        st.SetItemsProcessed(static_cast<std::int64_t>(st.iterations() * rows * in * out));
    }
};

template <bool Parallel>
void Forward(benchmark::State& st) {
    Buffers m(st);
    for (auto _ : st) {
        if constexpr (Parallel) kernels::affine_forward(m.x, m.rows, m.in, m.w, m.b, m.out, m.y);
        else kernels::reference::affine_forward(m.x, m.rows, m.in, m.w, m.b, m.out, m.y);
        benchmark::DoNotOptimize(m.y.data());
    }
    m.count(st);
}

template <bool Parallel>
void BackwardInput(benchmark::State& st) {
    Buffers m(st);
    for (auto _ : st) {
        if constexpr (Parallel) kernels::affine_backward_input(m.dy, m.rows, m.out, m.w, m.in, m.dx);
        else kernels::reference::affine_backward_input(m.dy, m.rows, m.out, m.w, m.in, m.dx);
        benchmark::DoNotOptimize(m.dx.data());
    }
    m.count(st);
}

template <bool Parallel>
void BackwardParams(benchmark::State& st) {
    Buffers m(st);
    for (auto _ : st) {
        if constexpr (Parallel) kernels::affine_backward_params(m.dy, m.x, m.rows, m.in, m.out, m.dw, m.db);
        else kernels::reference::affine_backward_params(m.dy, m.x, m.rows, m.in, m.out, m.dw, m.db);
        benchmark::DoNotOptimize(m.dw.data());
    }
    m.count(st);
}

// Minibatch through the first and hidden layers, and a full training batch.
void Shapes(benchmark::internal::Benchmark* b) {
    b->Args({128, 84, 128})->Args({128, 128, 128})->Args({1950, 128, 128})->Unit(benchmark::kMicrosecond);
}

BENCHMARK(Forward<false>)->Name("forward/reference")->Apply(Shapes);
BENCHMARK(Forward<true>)->Name("forward/openmp")->Apply(Shapes);
BENCHMARK(BackwardInput<false>)->Name("backward_input/reference")->Apply(Shapes);
BENCHMARK(BackwardInput<true>)->Name("backward_input/openmp")->Apply(Shapes);
BENCHMARK(BackwardParams<false>)->Name("backward_params/reference")->Apply(Shapes);
BENCHMARK(BackwardParams<true>)->Name("backward_params/openmp")->Apply(Shapes);

}  // namespace

BENCHMARK_MAIN();
