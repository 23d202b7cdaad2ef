#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "adact/activation.hpp"
#include "adact/tensor.hpp"

namespace adact {

struct Dataset {
    Tensor features;          // [n x d] or [n x c x h x w]
    std::vector<int> labels;  // class per row, in [0, num_classes)
    std::size_t num_classes = 2;
    std::string name;

    std::size_t size() const { return labels.size(); }

    /// Rows/images selected by index, in the given order.
    Dataset subset(const std::vector<std::size_t>& indices) const;

    /// First n rows.
    Dataset head(std::size_t n) const;
};

struct SimulateInfo {
    std::uint64_t seed_requested = 0;
    std::uint64_t seed_used = 0;       // bumped if class balance was degenerate
    double class_balance = 0.0;        // fraction of label 1
    std::size_t regenerations = 0;
    std::string manifest;              // JSON record of the generator setup
};

/// Samples a dataset from a ground-truth fully-connected network:
/// the generator is initialized with the normal-mixture scheme, features
/// are drawn i.i.d. uniform on [0, 1], and the label is 1 when the
/// generator's output probability exceeds 0.5 (or a Bernoulli draw from
/// that probability when stochastic_labels is set). The uniform input
/// keeps the generator's units out of deep saturation, which is what
/// makes the simulated boundary fittable by every activation family.
///
/// If the resulting class balance falls outside [0.25, 0.75] the draw is
/// repeated with the next seed; info records what happened.
Dataset simulate(std::size_t hidden_layers, std::size_t neurons, ActivationKind activation,
                 std::size_t n, std::size_t d, std::uint64_t seed,
                 bool stochastic_labels = false, SimulateInfo* info = nullptr);

/// Seeded permutation of [0, n) split into k disjoint, exhaustive folds.
/// Remainder rows go to the leading folds. Returns (train, validation)
/// index pairs.
std::vector<std::pair<std::vector<std::size_t>, std::vector<std::size_t>>> kfold_split(
    std::size_t n, std::size_t k, std::uint64_t seed);

struct Metrics {
    double accuracy = 0.0;
    std::vector<double> precision;  // per class; 0/0 counts as 0
    std::vector<double> recall;
    Tensor confusion;  // [K x K], rows = true class, cols = predicted
};

Metrics compute_metrics(const std::vector<int>& predicted, const std::vector<int>& truth,
                        std::size_t num_classes);

}  // namespace adact
