#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "adact/data.hpp"
#include "adact/network.hpp"
#include "adact/trainer.hpp"

namespace adact {

/// Per-unit shape parameters of a trained model, one row per adaptive
/// unit, before and after training.
struct AlphaSnapshot {
    std::size_t layer = 0;
    std::size_t unit = 0;
    double alpha_initial = 1.0;
    double alpha_final = 1.0;
};

struct FoldResult {
    double accuracy = 0.0;  // fraction, not percent
    std::vector<double> precision;
    std::vector<double> recall;
    LossCurve curve;
    std::vector<AlphaSnapshot> alphas;
};

/// One grid cell: a (generator, depth, fitted activation) combination
/// evaluated with k-fold cross-validation.
struct CellResult {
    ActivationKind generator;
    std::size_t layers = 1;
    ActivationKind fitted;
    std::vector<FoldResult> folds;

    double mean_accuracy() const;
    /// Sample standard deviation of fold accuracies / sqrt(k).
    double std_error() const;
};

/// Grid spec for the simulated-data accuracy table. Defaults reproduce
/// the full 2 x 2 x 4 grid.
struct Table1Spec {
    std::vector<ActivationKind> generators{ActivationKind::Sigmoid, ActivationKind::ReLU};
    std::vector<std::size_t> layer_counts{1, 8};
    std::vector<ActivationKind> fitted{ActivationKind::Sigmoid, ActivationKind::AdaptiveGumbel,
                                       ActivationKind::ReLU, ActivationKind::AdaptiveReLUExp};
    std::size_t n = 10000;
    std::size_t d = 10;
    std::size_t neurons = 10;
    std::size_t folds = 5;
    bool stochastic_labels = false;
    TrainConfig config{};  // gamma, l1, l2, batch, epochs, base seed
    std::string output_dir;
};

struct Table1Result {
    std::vector<CellResult> cells;
    double wall_seconds = 0.0;
};

/// Runs the grid with per-cell derived seeds (the same dataset and folds
/// are shared by every fitted kind of a row). When output_dir is set,
/// writes table1.csv, table1_stderr.csv, per-fold loss-curve and alpha
/// CSVs, and report.json embedding the resolved spec.
Table1Result run_table1(const Table1Spec& spec);

/// Runs a single cell; used for targeted reruns and determinism checks.
CellResult run_cell(const Table1Spec& spec, std::size_t generator_idx, std::size_t layers_idx,
                    std::size_t fitted_idx);

std::string table1_spec_to_json(const Table1Spec& spec);
Table1Spec table1_spec_from_json(const std::string& text);

/// Reads the "spec" object back out of a report.json produced by
/// run_table1.
Table1Spec table1_spec_from_report(const std::string& report_path);

/// Convolutional MNIST experiment: conv 6@5x5 -> pool 2x2 -> conv 16@5x5
/// -> pool 2x2 -> dense 1000 -> softmax 10.
struct MnistSpec {
    std::string train_images, train_labels;
    std::string test_images, test_labels;
    ActivationKind conv_activation = ActivationKind::ReLU;
    ActivationKind dense_activation = ActivationKind::AdaptiveGumbel;
    std::size_t subset = 0;  // 0 = full training set
    TrainConfig config{};    // batch 100, gamma 0.01 by default in the CLI
    std::string output_dir;
};

struct MnistResult {
    double test_accuracy = 0.0;
    Metrics metrics;
    LossCurve curve;
    Network net;
    double wall_seconds = 0.0;
};

MnistResult run_mnist(const MnistSpec& spec);

/// LeNet5-small topology used by run_mnist, exposed for tests and the
/// gradcheck command.
Network make_lenet_small(ActivationKind conv_act, ActivationKind dense_act,
                         std::size_t image_h = 28, std::size_t image_w = 28,
                         std::size_t classes = 10, std::size_t dense_width = 1000);

/// CSV "layer,neuron,alpha" of every adaptive unit's current alpha.
void write_alpha_hist_csv(std::ostream& os, const Network& net);

/// CSV "layer,neuron,x,value" of each unit's activation over the grid,
/// for every layer with a non-identity activation.
void write_activation_curves_csv(std::ostream& os, const Network& net,
                                 std::span<const double> x_grid);

std::string train_config_to_json(const TrainConfig& config);
TrainConfig train_config_from_json(const std::string& text);

}  // namespace adact
