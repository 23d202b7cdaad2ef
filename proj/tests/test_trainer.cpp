#include "doctest.h"

#include <cmath>

#include "adact/error.hpp"
#include "adact/network.hpp"
#include "adact/rng.hpp"
#include "adact/trainer.hpp"

using namespace adact;

namespace {

Network tiny_net(ActivationKind act) {
    return make_mlp(2, 1, 3, act, OutputKind::BinaryLogistic);
}

Gradients zero_grads_like(Network& net) {
    Tensor x({1, 2});
    forward(net, x);
    Gradients g = backward(net, x, {0}, LossSpec{});
    for_each_grad(g, [](double& v, ParamClass, const std::string&) { v = 0.0; });
    return g;
}

// Linearly separable toy problem: label is 1 iff x0 + x1 > 0.
Dataset separable_dataset(std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    Dataset ds;
    ds.features = Tensor({n, 2});
    ds.labels.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        double a = rng.uniform(-1.0, 1.0), b = rng.uniform(-1.0, 1.0);
        while (std::abs(a + b) < 0.1) {  // keep a margin around the boundary
            a = rng.uniform(-1.0, 1.0);
            b = rng.uniform(-1.0, 1.0);
        }
        ds.features.at2(i, 0) = a;
        ds.features.at2(i, 1) = b;
        ds.labels[i] = (a + b > 0.0) ? 1 : 0;
    }
    ds.num_classes = 2;
    return ds;
}

}  // namespace

TEST_CASE("sgd_step arithmetic pinned by hand") {
    Network net = tiny_net(ActivationKind::Sigmoid);
    Gradients g = zero_grads_like(net);

    SUBCASE("w <- w - gamma g: 1 - 0.01*2 = 0.98") {
        auto& l1 = std::get<DenseLayer>(net.layers[0]);
        l1.weights[0] = 1.0;
        g.layers[0].d_weights[0] = 2.0;
        TrainConfig cfg;
        cfg.gamma = 0.01;
        sgd_step(net, g, cfg);
        CHECK(l1.weights[0] == 0.98);
    }
    SUBCASE("zero gradients leave every parameter bitwise unchanged") {
        Rng rng(1);
        init_network(net, InitScheme::SimMixture, rng);
        std::vector<double> before;
        for_each_param(net, [&](double& p, ParamClass, const std::string&) {
            before.push_back(p);
        });
        TrainConfig cfg;
        sgd_step(net, g, cfg);
        std::size_t i = 0;
        for_each_param(net, [&](double& p, ParamClass, const std::string&) {
            CHECK(p == before[i++]);
        });
    }
    SUBCASE("gamma = 0 is rejected by validate") {
        TrainConfig cfg;
        cfg.gamma = 0.0;
        CHECK_THROWS_AS(cfg.validate(), ConfigError);
        cfg.gamma = 0.01;
        cfg.epochs = 0;
        CHECK_THROWS_AS(cfg.validate(), ConfigError);
        cfg.epochs = 1;
        cfg.batch_size = 0;
        CHECK_THROWS_AS(cfg.validate(), ConfigError);
    }
}

TEST_CASE("shape values step at gamma times the multiplier") {
    Network net = tiny_net(ActivationKind::AdaptiveGumbel);
    Gradients g = zero_grads_like(net);
    auto& l1 = std::get<DenseLayer>(net.layers[0]);
    l1.shape_a[0] = 0.0;
    g.layers[0].d_shape_a[0] = 1.0;
    TrainConfig cfg;
    cfg.gamma = 0.01;
    cfg.gamma_alpha_multiplier = 10.0;
    sgd_step(net, g, cfg);
    CHECK(l1.shape_a[0] == -0.1);
}

TEST_CASE("gradient-count mismatch throws") {
    Network net = tiny_net(ActivationKind::Sigmoid);
    Network other = tiny_net(ActivationKind::AdaptiveGumbel);
    Gradients g = zero_grads_like(other);
    CHECK_THROWS_AS(sgd_step(net, g, TrainConfig{}), ShapeError);
}

TEST_CASE("init_network starts adaptive shapes at a = 0") {
    Network net = tiny_net(ActivationKind::AdaptiveReLULogistic);
    Rng rng(4);
    init_network(net, InitScheme::LeCun, rng);
    const auto& l1 = std::get<DenseLayer>(net.layers[0]);
    for (double a : l1.shape_a) CHECK(a == 0.0);
    for (double b : l1.bias.data()) CHECK(b == 0.0);
    // LeCun bound: |w| <= sqrt(3 / fan_in)
    double bound = std::sqrt(3.0 / 2.0);
    for (double w : l1.weights.data()) CHECK(std::abs(w) <= bound);
}

TEST_CASE("training is deterministic given the seed") {
    Dataset ds = separable_dataset(60, 11);
    TrainConfig cfg;
    cfg.epochs = 5;
    cfg.batch_size = 8;
    cfg.seed = 33;

    auto run = [&] {
        Network net = tiny_net(ActivationKind::AdaptiveGumbel);
        Rng rng(cfg.seed);
        init_network(net, InitScheme::LeCun, rng);
        train(net, ds, nullptr, cfg);
        std::vector<double> params;
        for_each_param(net, [&](double& p, ParamClass, const std::string&) {
            params.push_back(p);
        });
        return params;
    };
    auto a = run();
    auto b = run();
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == b[i]);
}

TEST_CASE("training separates a separable dataset") {
    Dataset ds = separable_dataset(100, 21);
    for (ActivationKind act : {ActivationKind::Sigmoid, ActivationKind::AdaptiveGumbel}) {
        CAPTURE(std::string(to_string(act)));
        Network net = tiny_net(act);
        TrainConfig cfg;
        cfg.epochs = 500;
        cfg.batch_size = 10;
        cfg.gamma = 0.1;
        cfg.seed = 5;
        Rng rng(cfg.seed);
        init_network(net, InitScheme::LeCun, rng);
        TrainResult res = train(net, ds, nullptr, cfg);
        CHECK(res.curve.train.size() == 500);
        CHECK(res.curve.train.back() < res.curve.train.front());
        CHECK(evaluate_accuracy(net, ds) >= 0.99);
    }
}

TEST_CASE("validation losses are recorded when a validation set is given") {
    Dataset ds = separable_dataset(40, 3);
    Dataset val = separable_dataset(20, 4);
    Network net = tiny_net(ActivationKind::Sigmoid);
    TrainConfig cfg;
    cfg.epochs = 3;
    cfg.batch_size = 10;
    Rng rng(0);
    init_network(net, InitScheme::LeCun, rng);
    TrainResult res = train(net, ds, &val, cfg);
    CHECK(res.curve.validation.size() == 3);
}

TEST_CASE("grad_check passes for every kind on a 2-hidden-layer net") {
    const ActivationKind kinds[] = {
        ActivationKind::Sigmoid,          ActivationKind::ReLU,
        ActivationKind::AdaptiveGumbel,   ActivationKind::AdaptiveReLUExp,
        ActivationKind::AdaptiveReLULogistic};
    Rng data_rng(17);
    Tensor x({5, 4});
    for (double& v : x.data()) v = data_rng.uniform(-1.0, 1.0);
    const std::vector<int> y = {0, 1, 1, 0, 1};

    for (ActivationKind act : kinds) {
        CAPTURE(std::string(to_string(act)));
        Network net = make_mlp(4, 2, 5, act, OutputKind::BinaryLogistic);
        Rng rng(29);
        init_network(net, InitScheme::LeCun, rng);
        if (is_adaptive(act)) {
            for_each_param(net, [&](double& p, ParamClass cls, const std::string&) {
                if (cls == ParamClass::Alpha) p = rng.uniform(-0.3, 0.3);
            });
        }
        auto report = grad_check(net, x, y, LossSpec{BaseLoss::CrossEntropy, 0.001, 0.001});
        CAPTURE(report.worst_param);
        CHECK(report.pass());
        CHECK(report.max_rel_err <= 1e-5);
        if (!is_adaptive(act)) CHECK(report.alphas.count == 0);
    }
}

TEST_CASE("grad_check flags a corrupted gradient") {
    // A network whose backward we sabotage indirectly: scale one weight's
    // analytic gradient by doubling the weight's contribution via a
    // mismatched loss spec is not possible from outside, so instead verify
    // the checker's arithmetic directly: an intentionally wrong analytic
    // value must produce a large relative error.
    Network net = make_mlp(2, 1, 3, ActivationKind::Sigmoid, OutputKind::BinaryLogistic);
    Rng rng(8);
    init_network(net, InitScheme::LeCun, rng);
    Tensor x({3, 2});
    for (double& v : x.data()) v = rng.uniform(-1.0, 1.0);

    // run with an l2 the analytic side does not know about: finite
    // differences of loss_value with l2 > 0 against backward with l2 = 0
    // must disagree by roughly 2*l2*w on every nonzero weight
    forward(net, x);
    Gradients g = backward(net, x, {0, 1, 0}, LossSpec{BaseLoss::CrossEntropy, 0.0, 0.0});
    LossSpec with_l2{BaseLoss::CrossEntropy, 0.0, 0.1};

    double h = 1e-5;
    bool found_mismatch = false;
    std::size_t idx = 0;
    std::vector<double*> params;
    for_each_param(net, [&](double& p, ParamClass, const std::string&) { params.push_back(&p); });
    std::vector<double> analytic;
    for_each_grad(g, [&](double& v, ParamClass, const std::string&) { analytic.push_back(v); });
    REQUIRE(params.size() == analytic.size());
    for (std::size_t i = 0; i < params.size() && !found_mismatch; ++i) {
        double saved = *params[i];
        *params[i] = saved + h;
        double up = loss_value(forward(net, x), {0, 1, 0}, with_l2, net);
        *params[i] = saved - h;
        double dn = loss_value(forward(net, x), {0, 1, 0}, with_l2, net);
        *params[i] = saved;
        double fd = (up - dn) / (2 * h);
        if (std::abs(fd - analytic[i]) > 1e-4) found_mismatch = true;
        (void)idx;
    }
    CHECK(found_mismatch);
}

TEST_CASE("evaluate_loss separates penalty from data loss consistently") {
    Dataset ds = separable_dataset(600, 2);  // larger than the eval chunk
    Network net = tiny_net(ActivationKind::Sigmoid);
    Rng rng(6);
    init_network(net, InitScheme::LeCun, rng);

    LossSpec plain{BaseLoss::CrossEntropy, 0.0, 0.0};
    LossSpec pen{BaseLoss::CrossEntropy, 0.01, 0.01};
    double l_plain = evaluate_loss(net, ds, plain);
    double l_pen = evaluate_loss(net, ds, pen);
    CHECK(l_pen == doctest::Approx(l_plain + penalty_value(pen, net)).epsilon(1e-12));

    // chunked evaluation must equal the single-pass value
    Dataset small = ds.head(600);
    Network net2 = tiny_net(ActivationKind::Sigmoid);
    Rng rng2(6);
    init_network(net2, InitScheme::LeCun, rng2);
    Tensor pred = forward(net2, ds.features);
    double direct = loss_value(pred, ds.labels, plain, net2) / 600.0;  // sum -> mean
    CHECK(std::abs(l_plain - direct) <= 1e-12);
}
