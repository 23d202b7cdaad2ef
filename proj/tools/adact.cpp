// Experiment CLI. Subcommands cover dataset simulation, the simulated
// accuracy grid, the MNIST convnet, gradient checking, and CSV dumps of
// fitted activation shapes.
//
// Exit codes: 0 success, 2 configuration error, 3 data error, 4 numeric
// failure (NaN during training or a failed gradient check).

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "adact/activation.hpp"
#include "adact/data.hpp"
#include "adact/error.hpp"
#include "adact/experiment.hpp"
#include "adact/format.hpp"
#include "adact/idx.hpp"
#include "adact/network.hpp"
#include "adact/rng.hpp"
#include "adact/serialize.hpp"
#include "adact/trainer.hpp"

using namespace adact;
namespace fs = std::filesystem;

namespace {

std::string default_out(const std::string& flag_value, const std::string& leaf) {
    if (!flag_value.empty()) return flag_value;
    if (const char* env = std::getenv("ADACT_OUTPUT_DIR")) {
        return (fs::path(env) / leaf).string();
    }
    return leaf;
}

struct CommonTrainOpts {
    double gamma = 0.01;
    double gamma_alpha_multiplier = 1.0;
    double l1 = 0.0;
    double l2 = 0.0;
    std::size_t batch_size = 20;
    std::size_t epochs = 1;
    std::uint64_t seed = 0;
    std::string init = "lecun";
    bool penalize_alpha = false;

    void attach(CLI::App* cmd) {
        cmd->add_option("--gamma", gamma, "learning rate");
        cmd->add_option("--gamma-alpha-multiplier", gamma_alpha_multiplier,
                        "learning-rate factor for shape parameters");
        cmd->add_option("--l1", l1, "L1 penalty weight");
        cmd->add_option("--l2", l2, "L2 penalty weight");
        cmd->add_option("--batch", batch_size, "mini-batch size");
        cmd->add_option("--epochs", epochs, "training epochs");
        cmd->add_option("--seed", seed, "base RNG seed");
        cmd->add_option("--init", init, "weight init scheme: lecun | sim_mixture");
        cmd->add_flag("--penalize-alpha", penalize_alpha,
                      "include shape parameters in the L1/L2 penalty");
    }

    TrainConfig to_config() const {
        TrainConfig c;
        c.gamma = gamma;
        c.gamma_alpha_multiplier = gamma_alpha_multiplier;
        c.l1 = l1;
        c.l2 = l2;
        c.batch_size = batch_size;
        c.epochs = epochs;
        c.seed = seed;
        c.init = init_scheme_from_string(init);
        c.penalize_alpha = penalize_alpha;
        c.validate();
        return c;
    }
};

void write_dataset_csv(const Dataset& ds, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw DataError("cannot open for writing: " + path);
    const std::size_t d = ds.features.dim(1);
    for (std::size_t j = 0; j < d; ++j) os << 'x' << j << ',';
    os << "label\n";
    for (std::size_t i = 0; i < ds.size(); ++i) {
        for (std::size_t j = 0; j < d; ++j) os << fmt_g17(ds.features.at2(i, j)) << ',';
        os << ds.labels[i] << '\n';
    }
}

std::vector<ActivationKind> parse_kinds(const std::vector<std::string>& names) {
    std::vector<ActivationKind> out;
    for (const std::string& n : names) out.push_back(activation_from_string(n));
    return out;
}

int run(int argc, char** argv) {
    CLI::App app{"adaptive-activation network experiments"};
    app.require_subcommand(1);
    app.set_config("--config", "", "read options from an INI/TOML file");

    // ---------------------------------------------------------- simulate
    auto* sim = app.add_subcommand("simulate", "draw a dataset from a generator network");
    std::size_t sim_layers = 1, sim_neurons = 10, sim_n = 10000, sim_d = 10;
    std::string sim_act = "sigmoid", sim_out;
    std::uint64_t sim_seed = 0;
    bool sim_stochastic = false;
    sim->add_option("--layers", sim_layers, "generator hidden layers");
    sim->add_option("--neurons", sim_neurons, "neurons per generator layer");
    sim->add_option("--activation", sim_act, "generator activation: sigmoid | relu");
    sim->add_option("--n", sim_n, "sample count");
    sim->add_option("--d", sim_d, "feature dimension");
    sim->add_option("--seed", sim_seed, "RNG seed");
    sim->add_flag("--stochastic-labels", sim_stochastic,
                  "Bernoulli labels instead of thresholding");
    sim->add_option("-o,--out", sim_out, "output directory");

    // ---------------------------------------------------------- table1
    auto* t1 = app.add_subcommand("table1", "simulated-data accuracy grid with k-fold CV");
    Table1Spec t1_spec;
    CommonTrainOpts t1_train;
    std::vector<std::string> t1_gens = {"sigmoid", "relu"};
    std::vector<std::string> t1_fits = {"sigmoid", "adaptive_gumbel", "relu",
                                        "adaptive_relu_exp"};
    std::string t1_out;
    bool t1_fast = false;
    t1_train.epochs = 2000;
    t1_train.l1 = t1_train.l2 = 0.001;
    t1->add_option("--generators", t1_gens, "generator kinds");
    t1->add_option("--layer-counts", t1_spec.layer_counts, "generator depths");
    t1->add_option("--fitted", t1_fits, "fitted kinds (grid columns)");
    t1->add_option("--n", t1_spec.n, "samples per dataset");
    t1->add_option("--d", t1_spec.d, "feature dimension");
    t1->add_option("--neurons", t1_spec.neurons, "neurons per layer");
    t1->add_option("--folds", t1_spec.folds, "cross-validation folds");
    t1->add_flag("--stochastic-labels", t1_spec.stochastic_labels,
                 "Bernoulli labels in simulation");
    t1->add_flag("--fast", t1_fast, "desk-scale profile: n=2000, 300 epochs");
    t1->add_option("-o,--out", t1_out, "output directory");
    t1_train.attach(t1);

    // ---------------------------------------------------------- mnist
    auto* mn = app.add_subcommand("mnist", "LeNet5-small on MNIST IDX files");
    MnistSpec mn_spec;
    CommonTrainOpts mn_train;
    std::string mn_conv = "relu", mn_dense = "adaptive_gumbel", mn_out;
    mn_train.batch_size = 100;
    mn_train.epochs = 5;
    mn->add_option("--train-images", mn_spec.train_images, "IDX train images")->required();
    mn->add_option("--train-labels", mn_spec.train_labels, "IDX train labels")->required();
    mn->add_option("--test-images", mn_spec.test_images, "IDX test images")->required();
    mn->add_option("--test-labels", mn_spec.test_labels, "IDX test labels")->required();
    mn->add_option("--conv-activation", mn_conv, "conv-layer activation kind");
    mn->add_option("--dense-activation", mn_dense, "dense-layer activation kind");
    mn->add_option("--subset", mn_spec.subset, "train on the first n images only");
    mn->add_option("-o,--out", mn_out, "output directory");
    mn_train.attach(mn);

    // ---------------------------------------------------------- gradcheck
    auto* gc = app.add_subcommand("gradcheck",
                                  "compare analytic gradients with finite differences");
    std::string gc_act = "adaptive_gumbel";
    std::size_t gc_layers = 2, gc_width = 10, gc_d = 10, gc_batch = 16;
    std::uint64_t gc_seed = 0;
    double gc_l1 = 0.001, gc_l2 = 0.001;
    gc->add_option("--activation", gc_act, "activation kind under test");
    gc->add_option("--layers", gc_layers, "hidden layers");
    gc->add_option("--width", gc_width, "neurons per layer");
    gc->add_option("--d", gc_d, "input dimension");
    gc->add_option("--batch", gc_batch, "batch size");
    gc->add_option("--seed", gc_seed, "RNG seed");
    gc->add_option("--l1", gc_l1, "L1 penalty weight");
    gc->add_option("--l2", gc_l2, "L2 penalty weight");

    // ---------------------------------------------------------- curves
    auto* cv = app.add_subcommand("curves", "per-neuron activation curves of a saved model");
    std::string cv_model, cv_out;
    double cv_lo = -10.0, cv_hi = 10.0;
    std::size_t cv_points = 201;
    cv->add_option("--model", cv_model, "serialized model file")->required();
    cv->add_option("--lo", cv_lo, "grid lower bound");
    cv->add_option("--hi", cv_hi, "grid upper bound");
    cv->add_option("--points", cv_points, "grid size");
    cv->add_option("-o,--out", cv_out, "output CSV (default stdout)");

    // ---------------------------------------------------------- alpha-hist
    auto* ah = app.add_subcommand("alpha-hist", "fitted shape parameters of a saved model");
    std::string ah_model, ah_out;
    ah->add_option("--model", ah_model, "serialized model file")->required();
    ah->add_option("-o,--out", ah_out, "output CSV (default stdout)");

    // ---------------------------------------------------------- train
    auto* tr = app.add_subcommand("train", "train one network on a simulated dataset");
    CommonTrainOpts tr_train;
    std::size_t tr_gen_layers = 1, tr_neurons = 10, tr_n = 10000, tr_d = 10;
    std::size_t tr_fit_layers = 1;
    std::string tr_gen_act = "sigmoid", tr_fit_act = "adaptive_gumbel", tr_out;
    std::uint64_t tr_data_seed = 0;
    tr_train.epochs = 100;
    tr->add_option("--gen-activation", tr_gen_act, "generator activation");
    tr->add_option("--gen-layers", tr_gen_layers, "generator hidden layers");
    tr->add_option("--neurons", tr_neurons, "neurons per layer (both networks)");
    tr->add_option("--n", tr_n, "sample count");
    tr->add_option("--d", tr_d, "feature dimension");
    tr->add_option("--data-seed", tr_data_seed, "simulation seed");
    tr->add_option("--activation", tr_fit_act, "fitted activation kind");
    tr->add_option("--layers", tr_fit_layers, "fitted hidden layers");
    tr->add_option("-o,--out", tr_out, "output directory");
    tr_train.attach(tr);

    // ---------------------------------------------------------- eval
    auto* ev = app.add_subcommand("eval", "evaluate a saved model on a simulated dataset");
    std::string ev_model, ev_gen_act = "sigmoid";
    std::size_t ev_gen_layers = 1, ev_neurons = 10, ev_n = 10000, ev_d = 10;
    std::uint64_t ev_seed = 0;
    ev->add_option("--model", ev_model, "serialized model file")->required();
    ev->add_option("--gen-activation", ev_gen_act, "generator activation");
    ev->add_option("--gen-layers", ev_gen_layers, "generator hidden layers");
    ev->add_option("--neurons", ev_neurons, "neurons per generator layer");
    ev->add_option("--n", ev_n, "sample count");
    ev->add_option("--d", ev_d, "feature dimension");
    ev->add_option("--seed", ev_seed, "simulation seed");

    CLI11_PARSE(app, argc, argv);

    if (sim->parsed()) {
        std::string out = default_out(sim_out, "simulate_out");
        fs::create_directories(out);
        SimulateInfo info;
        Dataset ds = simulate(sim_layers, sim_neurons, activation_from_string(sim_act), sim_n,
                              sim_d, sim_seed, sim_stochastic, &info);
        write_dataset_csv(ds, (fs::path(out) / "dataset.csv").string());
        std::ofstream(fs::path(out) / "manifest.json") << info.manifest << '\n';
        std::cout << "wrote " << ds.size() << " rows to " << out << " (class balance "
                  << info.class_balance << ", seed used " << info.seed_used << ")\n";
    } else if (t1->parsed()) {
        t1_spec.generators = parse_kinds(t1_gens);
        t1_spec.fitted = parse_kinds(t1_fits);
        t1_spec.config = t1_train.to_config();
        if (t1_fast) {
            t1_spec.n = 2000;
            t1_spec.config.epochs = 300;
        }
        t1_spec.output_dir = default_out(t1_out, "table1_out");
        Table1Result res = run_table1(t1_spec);
        std::cout << "layers,generator";
        for (auto f : t1_spec.fitted) std::cout << ',' << to_string(f);
        std::cout << '\n';
        std::size_t i = 0;
        for (std::size_t gi = 0; gi < t1_spec.generators.size(); ++gi) {
            for (std::size_t li = 0; li < t1_spec.layer_counts.size(); ++li) {
                std::cout << t1_spec.layer_counts[li] << ','
                          << to_string(t1_spec.generators[gi]);
                for (std::size_t fi = 0; fi < t1_spec.fitted.size(); ++fi) {
                    std::cout << ',' << 100.0 * res.cells[i++].mean_accuracy();
                }
                std::cout << '\n';
            }
        }
        std::cout << "artifacts in " << t1_spec.output_dir << " (" << res.wall_seconds
                  << " s)\n";
    } else if (mn->parsed()) {
        mn_spec.conv_activation = activation_from_string(mn_conv);
        mn_spec.dense_activation = activation_from_string(mn_dense);
        mn_spec.config = mn_train.to_config();
        mn_spec.output_dir = default_out(mn_out, "mnist_out");
        MnistResult res = run_mnist(mn_spec);
        std::cout << "test accuracy " << res.test_accuracy << " (" << res.wall_seconds
                  << " s); artifacts in " << mn_spec.output_dir << '\n';
    } else if (gc->parsed()) {
        Network net = make_mlp(gc_d, gc_layers, gc_width, activation_from_string(gc_act),
                               OutputKind::BinaryLogistic);
        Rng rng(derive_seed(gc_seed, 1));
        init_network(net, InitScheme::LeCun, rng);
        Tensor x({gc_batch, gc_d});
        for (double& v : x.data()) v = rng.uniform(-1.5, 1.5);
        std::vector<int> y(gc_batch);
        for (int& v : y) v = static_cast<int>(rng.index(2));
        auto rep = grad_check(net, x, y, LossSpec{BaseLoss::CrossEntropy, gc_l1, gc_l2});
        auto line = [](const char* name, const GradCheckReport::ClassReport& c) {
            std::cout << name << ": " << c.count << " params, max rel err " << c.max_rel_err;
            if (!c.worst_param.empty()) std::cout << " at " << c.worst_param;
            std::cout << '\n';
        };
        line("weights", rep.weights);
        line("biases", rep.biases);
        line("alphas", rep.alphas);
        std::cout << (rep.pass() ? "PASS" : "FAIL") << " (tolerance " << rep.tolerance
                  << ")\n";
        if (!rep.pass()) return 4;
    } else if (cv->parsed()) {
        Network net = load_network(cv_model);
        auto grid = make_grid(cv_lo, cv_hi, cv_points);
        if (cv_out.empty()) {
            write_activation_curves_csv(std::cout, net, grid);
        } else {
            std::ofstream os(cv_out);
            if (!os) throw DataError("cannot open for writing: " + cv_out);
            write_activation_curves_csv(os, net, grid);
        }
    } else if (ah->parsed()) {
        Network net = load_network(ah_model);
        if (ah_out.empty()) {
            write_alpha_hist_csv(std::cout, net);
        } else {
            std::ofstream os(ah_out);
            if (!os) throw DataError("cannot open for writing: " + ah_out);
            write_alpha_hist_csv(os, net);
        }
    } else if (tr->parsed()) {
        TrainConfig cfg = tr_train.to_config();
        Dataset ds = simulate(tr_gen_layers, tr_neurons, activation_from_string(tr_gen_act),
                              tr_n, tr_d, tr_data_seed);
        Network net = make_mlp(tr_d, tr_fit_layers, tr_neurons,
                               activation_from_string(tr_fit_act), OutputKind::BinaryLogistic);
        Rng rng(derive_seed(cfg.seed, 1));
        init_network(net, cfg.init, rng);
        TrainResult res = train(net, ds, nullptr, cfg);
        std::string out = default_out(tr_out, "train_out");
        fs::create_directories(out);
        save_network(net, (fs::path(out) / "model.adact").string());
        {
            std::ofstream os(fs::path(out) / "curve.csv");
            os << "epoch,train_loss\n";
            for (std::size_t e = 0; e < res.curve.train.size(); ++e) {
                os << e << ',' << fmt_g17(res.curve.train[e]) << '\n';
            }
        }
        std::cout << "train accuracy " << evaluate_accuracy(net, ds) << "; model in " << out
                  << '\n';
    } else if (ev->parsed()) {
        Network net = load_network(ev_model);
        Dataset ds = simulate(ev_gen_layers, ev_neurons, activation_from_string(ev_gen_act),
                              ev_n, ev_d, ev_seed);
        Tensor pred = forward(net, ds.features);
        Metrics m = compute_metrics(predict_labels(pred, net.output), ds.labels, 2);
        std::cout << "accuracy " << m.accuracy << '\n';
        for (std::size_t k = 0; k < m.precision.size(); ++k) {
            std::cout << "class " << k << ": precision " << m.precision[k] << ", recall "
                      << m.recall[k] << '\n';
        }
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return 3;
    } catch (const NumericError& e) {
        std::cerr << "numeric error: " << e.what() << '\n';
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
