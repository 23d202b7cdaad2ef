#include "adact/data.hpp"

#include <nlohmann/json.hpp>

#include "adact/error.hpp"
#include "adact/network.hpp"
#include "adact/rng.hpp"
#include "adact/trainer.hpp"

namespace adact {

Dataset Dataset::subset(const std::vector<std::size_t>& indices) const {
    Dataset out;
    out.num_classes = num_classes;
    out.name = name;
    const std::size_t row = features.size() / features.dim(0);
    std::vector<std::size_t> shape = features.shape();
    shape[0] = indices.size();
    Tensor sel(std::move(shape));
    out.labels.reserve(indices.size());
    for (std::size_t i = 0; i < indices.size(); ++i) {
        const std::size_t src = indices[i];
        for (std::size_t j = 0; j < row; ++j) {
            sel[i * row + j] = features[src * row + j];
        }
        out.labels.push_back(labels[src]);
    }
    out.features = std::move(sel);
    return out;
}

Dataset Dataset::head(std::size_t n) const {
    std::vector<std::size_t> idx(std::min(n, size()));
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    return subset(idx);
}

Dataset simulate(std::size_t hidden_layers, std::size_t neurons, ActivationKind activation,
                 std::size_t n, std::size_t d, std::uint64_t seed, bool stochastic_labels,
                 SimulateInfo* info) {
    if (activation != ActivationKind::Sigmoid && activation != ActivationKind::ReLU) {
        throw DomainError(std::string("simulate: generator activation must be sigmoid or relu, got ") +
                          to_string(activation));
    }
    if (n < 1 || d < 1) throw ConfigError("simulate: n and d must be >= 1");

    const std::size_t max_attempts = 64;
    std::uint64_t use_seed = seed;
    Dataset ds;
    double balance = 0.0;
    std::size_t attempt = 0;
    for (;; ++attempt, ++use_seed) {
        if (attempt == max_attempts) {
            throw NumericError("simulate: no balanced draw after " +
                               std::to_string(max_attempts) + " seeds");
        }
        Rng rng(use_seed);
        Network gen = make_mlp(d, hidden_layers, neurons, activation,
                               OutputKind::BinaryLogistic);
        init_network(gen, InitScheme::SimMixture, rng);

        Tensor features({n, d});
        for (double& v : features.data()) v = rng.uniform(0.0, 1.0);
        Tensor prob = forward(gen, features);

        std::vector<int> labels(n);
        std::size_t ones = 0;
        for (std::size_t i = 0; i < n; ++i) {
            double pi = prob.at2(i, 0);
            labels[i] = stochastic_labels ? (rng.uniform() < pi ? 1 : 0) : (pi > 0.5 ? 1 : 0);
            ones += static_cast<std::size_t>(labels[i]);
        }
        balance = static_cast<double>(ones) / static_cast<double>(n);
        if (balance >= 0.25 && balance <= 0.75) {
            ds.features = std::move(features);
            ds.labels = std::move(labels);
            break;
        }
    }
    ds.num_classes = 2;
    ds.name = "sim_" + std::string(to_string(activation)) + "_" +
              std::to_string(hidden_layers) + "layer";

    if (info) {
        info->seed_requested = seed;
        info->seed_used = use_seed;
        info->class_balance = balance;
        info->regenerations = attempt;
        nlohmann::json manifest{
            {"generator",
             {{"hidden_layers", hidden_layers},
              {"neurons_per_layer", neurons},
              {"activation", to_string(activation)},
              {"init", "sim_mixture"},
              {"output", "binary_logistic"}}},
            {"n", n},
            {"d", d},
            // assumptions not fixed by the experiment protocol:
            {"feature_distribution", "iid uniform(0,1)"},
            {"label_rule", stochastic_labels ? "bernoulli(pi)" : "threshold pi > 0.5"},
            {"seed_requested", seed},
            {"seed_used", use_seed},
            {"regenerations", attempt},
            {"class_balance", balance},
        };
        info->manifest = manifest.dump(2);
    }
    return ds;
}

std::vector<std::pair<std::vector<std::size_t>, std::vector<std::size_t>>> kfold_split(
    std::size_t n, std::size_t k, std::uint64_t seed) {
    if (k < 2) throw ConfigError("kfold_split: k must be >= 2");
    if (k > n) throw ConfigError("kfold_split: k = " + std::to_string(k) + " exceeds n = " +
                                 std::to_string(n));
    std::vector<std::size_t> perm(n);
    for (std::size_t i = 0; i < n; ++i) perm[i] = i;
    Rng rng(seed);
    rng.shuffle(perm);

    const std::size_t base = n / k, rem = n % k;
    std::vector<std::pair<std::vector<std::size_t>, std::vector<std::size_t>>> folds;
    std::size_t begin = 0;
    for (std::size_t f = 0; f < k; ++f) {
        const std::size_t size = base + (f < rem ? 1 : 0);
        std::vector<std::size_t> val(perm.begin() + static_cast<std::ptrdiff_t>(begin),
                                     perm.begin() + static_cast<std::ptrdiff_t>(begin + size));
        std::vector<std::size_t> train;
        train.reserve(n - size);
        train.insert(train.end(), perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(begin));
        train.insert(train.end(), perm.begin() + static_cast<std::ptrdiff_t>(begin + size),
                     perm.end());
        folds.emplace_back(std::move(train), std::move(val));
        begin += size;
    }
    return folds;
}

}  // namespace adact
