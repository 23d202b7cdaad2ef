#include <benchmark/benchmark.h>

#include "adact/activation.hpp"
#include "adact/network.hpp"
#include "adact/rng.hpp"
#include "adact/tensor.hpp"
#include "adact/trainer.hpp"

using namespace adact;

namespace {

Tensor random_tensor(std::vector<std::size_t> shape, Rng& rng) {
    Tensor t(std::move(shape));
    for (double& v : t.data()) v = rng.uniform(-1.0, 1.0);
    return t;
}

void BM_matmul(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    Rng rng(1);
    Tensor a = random_tensor({n, n}, rng);
    Tensor b = random_tensor({n, n}, rng);
    for (auto _ : state) {
        Tensor c = matmul(a, b);
        benchmark::DoNotOptimize(c.data().data());
    }
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) * n * n * n);
}
BENCHMARK(BM_matmul)->Arg(32)->Arg(128)->Arg(256);

void BM_activation_value(benchmark::State& state) {
    const auto kind = static_cast<ActivationKind>(state.range(0));
    Rng rng(2);
    std::vector<double> xs(4096);
    for (double& x : xs) x = rng.uniform(-10.0, 10.0);
    for (auto _ : state) {
        double acc = 0.0;
        for (double x : xs) acc += act_value(kind, 1.3, x);
        benchmark::DoNotOptimize(acc);
    }
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) * xs.size());
}
BENCHMARK(BM_activation_value)
    ->Arg(static_cast<int>(ActivationKind::Sigmoid))
    ->Arg(static_cast<int>(ActivationKind::AdaptiveGumbel))
    ->Arg(static_cast<int>(ActivationKind::AdaptiveReLUExp))
    ->Arg(static_cast<int>(ActivationKind::AdaptiveReLULogistic));

void BM_activation_dalpha(benchmark::State& state) {
    Rng rng(3);
    std::vector<double> xs(4096);
    for (double& x : xs) x = rng.uniform(-10.0, 10.0);
    for (auto _ : state) {
        double acc = 0.0;
        for (double x : xs) acc += act_dalpha(ActivationKind::AdaptiveGumbel, 1.3, x);
        benchmark::DoNotOptimize(acc);
    }
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) * xs.size());
}
BENCHMARK(BM_activation_dalpha);

void BM_mlp_forward(benchmark::State& state) {
    const auto width = static_cast<std::size_t>(state.range(0));
    Network net = make_mlp(10, 2, width, ActivationKind::AdaptiveGumbel,
                           OutputKind::BinaryLogistic);
    Rng rng(4);
    init_network(net, InitScheme::LeCun, rng);
    Tensor x = random_tensor({20, 10}, rng);
    for (auto _ : state) {
        Tensor p = forward(net, x);
        benchmark::DoNotOptimize(p.data().data());
    }
}
BENCHMARK(BM_mlp_forward)->Arg(10)->Arg(100);

void BM_mlp_train_step(benchmark::State& state) {
    Network net = make_mlp(10, 2, 10, ActivationKind::AdaptiveGumbel,
                           OutputKind::BinaryLogistic);
    Rng rng(5);
    init_network(net, InitScheme::LeCun, rng);
    Tensor x = random_tensor({20, 10}, rng);
    std::vector<int> y(20);
    for (int& v : y) v = static_cast<int>(rng.index(2));
    TrainConfig cfg;
    LossSpec loss{BaseLoss::CrossEntropy, 0.001, 0.001};
    for (auto _ : state) {
        forward(net, x);
        Gradients g = backward(net, x, y, loss);
        sgd_step(net, g, cfg);
    }
}
BENCHMARK(BM_mlp_train_step);

void BM_conv_forward(benchmark::State& state) {
    Network net;
    net.layers.emplace_back(Conv2DLayer(6, 1, 5, 5, ActivationKind::ReLU));
    net.layers.emplace_back(MaxPool2DLayer{});
    net.layers.emplace_back(FlattenLayer{});
    net.layers.emplace_back(DenseLayer(6 * 12 * 12, 10, ActivationKind::Identity));
    net.output = OutputKind::SoftmaxK;
    Rng rng(6);
    init_network(net, InitScheme::LeCun, rng);
    Tensor x({8, 1, 28, 28});
    for (double& v : x.data()) v = rng.uniform(0.0, 1.0);
    for (auto _ : state) {
        Tensor p = forward(net, x);
        benchmark::DoNotOptimize(p.data().data());
    }
}
BENCHMARK(BM_conv_forward);

}  // namespace

BENCHMARK_MAIN();
