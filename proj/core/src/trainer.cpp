#include "adact/trainer.hpp"

#include <cmath>

#include "adact/error.hpp"

namespace adact {

const char* to_string(InitScheme scheme) {
    return scheme == InitScheme::LeCun ? "lecun" : "sim_mixture";
}

InitScheme init_scheme_from_string(const std::string& name) {
    if (name == "lecun") return InitScheme::LeCun;
    if (name == "sim_mixture") return InitScheme::SimMixture;
    throw ConfigError("unknown init scheme: " + name);
}

void TrainConfig::validate() const {
    if (!(gamma > 0.0)) throw ConfigError("gamma must be > 0");
    if (!(gamma_alpha_multiplier > 0.0)) throw ConfigError("gamma_alpha_multiplier must be > 0");
    if (l1 < 0.0 || l2 < 0.0) throw ConfigError("l1/l2 must be >= 0");
    if (batch_size < 1) throw ConfigError("batch_size must be >= 1");
    if (epochs < 1) throw ConfigError("epochs must be >= 1");
}

namespace {

double draw_weight(InitScheme scheme, std::size_t fan_in, Rng& rng) {
    if (scheme == InitScheme::LeCun) {
        double limit = std::sqrt(3.0 / static_cast<double>(fan_in));
        return rng.uniform(-limit, limit);
    }
    // equal-proportion mixture of N(1, 0.5) and N(-1, 0.5)
    double mean = rng.uniform() < 0.5 ? 1.0 : -1.0;
    return rng.normal(mean, 0.5);
}

double draw_bias(InitScheme scheme, Rng& rng) {
    if (scheme == InitScheme::LeCun) return 0.0;
    return rng.normal(0.0, 0.5);
}

}  // namespace

void init_network(Network& net, InitScheme scheme, Rng& rng) {
    for (Layer& l : net.layers) {
        if (auto* d = std::get_if<DenseLayer>(&l)) {
            std::size_t fan_in = d->fan_in();
            for (double& w : d->weights.data()) w = draw_weight(scheme, fan_in, rng);
            for (double& b : d->bias.data()) b = draw_bias(scheme, rng);
            for (double& a : d->shape_a) a = 0.0;
        } else if (auto* c = std::get_if<Conv2DLayer>(&l)) {
            std::size_t fan_in = c->kernels.dim(1) * c->kernels.dim(2) * c->kernels.dim(3);
            for (double& w : c->kernels.data()) w = draw_weight(scheme, fan_in, rng);
            for (double& b : c->bias.data()) b = draw_bias(scheme, rng);
            for (double& a : c->shape_a) a = 0.0;
        }
    }
}

void sgd_step(Network& net, const Gradients& grads, const TrainConfig& config) {
    if (grads.layers.size() != net.layers.size()) {
        throw ShapeError("sgd_step: gradient layer count " +
                         std::to_string(grads.layers.size()) + " vs network " +
                         std::to_string(net.layers.size()));
    }
    const double g = config.gamma;
    const double ga = config.gamma * config.gamma_alpha_multiplier;
    for (std::size_t li = 0; li < net.layers.size(); ++li) {
        const LayerGrads& lg = grads.layers[li];
        auto apply = [&](Tensor& w, Tensor& b, std::vector<double>& a) {
            if (!lg.has_params || !w.same_shape(lg.d_weights) || !b.same_shape(lg.d_bias) ||
                a.size() != lg.d_shape_a.size()) {
                throw ShapeError("sgd_step: gradient/parameter shape mismatch at layer " +
                                 std::to_string(li));
            }
            for (std::size_t i = 0; i < w.size(); ++i) w[i] -= g * lg.d_weights[i];
            for (std::size_t i = 0; i < b.size(); ++i) b[i] -= g * lg.d_bias[i];
            for (std::size_t i = 0; i < a.size(); ++i) a[i] -= ga * lg.d_shape_a[i];
        };
        if (auto* d = std::get_if<DenseLayer>(&net.layers[li])) {
            apply(d->weights, d->bias, d->shape_a);
        } else if (auto* c = std::get_if<Conv2DLayer>(&net.layers[li])) {
            apply(c->kernels, c->bias, c->shape_a);
        }
    }
}

namespace {

Dataset gather_batch(const Dataset& ds, std::span<const std::size_t> order, std::size_t begin,
                     std::size_t end) {
    std::vector<std::size_t> idx(order.begin() + static_cast<std::ptrdiff_t>(begin),
                                 order.begin() + static_cast<std::ptrdiff_t>(end));
    return ds.subset(idx);
}

}  // namespace

// Evaluation walks the dataset in fixed-size chunks so image datasets do
// not need a full-batch activation buffer.
const std::size_t kEvalChunk = 512;

double evaluate_loss(Network& net, const Dataset& ds, const LossSpec& loss) {
    const std::size_t n = ds.size();
    const double penalty = penalty_value(loss, net);
    double total = 0.0;
    for (std::size_t begin = 0; begin < n; begin += kEvalChunk) {
        std::vector<std::size_t> idx;
        for (std::size_t i = begin; i < std::min(begin + kEvalChunk, n); ++i) idx.push_back(i);
        Dataset chunk = ds.subset(idx);
        Tensor pred = forward(net, chunk.features);
        total += loss_value(pred, chunk.labels, loss, net) - penalty;
    }
    return total / static_cast<double>(n) + penalty;
}

double evaluate_accuracy(Network& net, const Dataset& ds) {
    const std::size_t n = ds.size();
    std::size_t correct = 0;
    for (std::size_t begin = 0; begin < n; begin += kEvalChunk) {
        std::vector<std::size_t> idx;
        for (std::size_t i = begin; i < std::min(begin + kEvalChunk, n); ++i) idx.push_back(i);
        Dataset chunk = ds.subset(idx);
        Tensor pred = forward(net, chunk.features);
        std::vector<int> hard = predict_labels(pred, net.output);
        for (std::size_t i = 0; i < hard.size(); ++i) {
            if (hard[i] == chunk.labels[i]) ++correct;
        }
    }
    return static_cast<double>(correct) / static_cast<double>(n);
}

TrainResult train(Network& net, const Dataset& train_set, const Dataset* validation,
                  const TrainConfig& config, BaseLoss base) {
    config.validate();
    if (train_set.size() == 0) throw ConfigError("train: empty dataset");
    const LossSpec loss = config.loss_spec(base);

    Rng rng(config.seed);
    std::vector<std::size_t> order(train_set.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

    TrainResult result;
    for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
        if (config.shuffle_each_epoch) rng.shuffle(order);
        const std::size_t n = order.size();
        for (std::size_t begin = 0, batch_no = 0; begin < n;
             begin += config.batch_size, ++batch_no) {
            const std::size_t end = std::min(begin + config.batch_size, n);
            Dataset batch = gather_batch(train_set, order, begin, end);
            Tensor pred = forward(net, batch.features);
            double batch_loss = loss_value(pred, batch.labels, loss, net);
            if (std::isnan(batch_loss)) {
                throw NumericError("NaN loss at epoch " + std::to_string(epoch) + ", batch " +
                                   std::to_string(batch_no));
            }
            Gradients grads = backward(net, batch.features, batch.labels, loss);
            sgd_step(net, grads, config);
        }
        result.curve.train.push_back(evaluate_loss(net, train_set, loss));
        if (validation) {
            result.curve.validation.push_back(evaluate_loss(net, *validation, loss));
        }
    }
    return result;
}

}  // namespace adact
