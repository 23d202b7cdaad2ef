#include "adact/experiment.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "adact/error.hpp"
#include "adact/format.hpp"
#include "adact/idx.hpp"
#include "adact/rng.hpp"
#include "adact/serialize.hpp"

namespace adact {

namespace fs = std::filesystem;
using nlohmann::json;

double CellResult::mean_accuracy() const {
    double s = 0.0;
    for (const FoldResult& f : folds) s += f.accuracy;
    return s / static_cast<double>(folds.size());
}

double CellResult::std_error() const {
    const std::size_t k = folds.size();
    if (k < 2) return 0.0;
    const double mean = mean_accuracy();
    double ss = 0.0;
    for (const FoldResult& f : folds) ss += (f.accuracy - mean) * (f.accuracy - mean);
    return std::sqrt(ss / static_cast<double>(k - 1)) / std::sqrt(static_cast<double>(k));
}

namespace {

std::vector<AlphaSnapshot> snapshot_alphas(const Network& net) {
    std::vector<AlphaSnapshot> out;
    for (std::size_t li = 0; li < net.layers.size(); ++li) {
        const std::vector<double>* a = nullptr;
        if (const auto* d = std::get_if<DenseLayer>(&net.layers[li])) a = &d->shape_a;
        if (const auto* c = std::get_if<Conv2DLayer>(&net.layers[li])) a = &c->shape_a;
        if (!a) continue;
        for (std::size_t u = 0; u < a->size(); ++u) {
            out.push_back({li, u, std::exp((*a)[u]), std::exp((*a)[u])});
        }
    }
    return out;
}

void fill_final_alphas(std::vector<AlphaSnapshot>& snaps, const Network& net) {
    std::size_t i = 0;
    for (std::size_t li = 0; li < net.layers.size(); ++li) {
        const std::vector<double>* a = nullptr;
        if (const auto* d = std::get_if<DenseLayer>(&net.layers[li])) a = &d->shape_a;
        if (const auto* c = std::get_if<Conv2DLayer>(&net.layers[li])) a = &c->shape_a;
        if (!a) continue;
        for (std::size_t u = 0; u < a->size(); ++u) snaps[i++].alpha_final = std::exp((*a)[u]);
    }
}

std::uint64_t dataset_seed(const Table1Spec& spec, std::size_t gi, std::size_t li) {
    return derive_seed(spec.config.seed, 0x1000 + gi * spec.layer_counts.size() + li);
}

std::uint64_t fold_train_seed(const Table1Spec& spec, std::size_t cell_index,
                              std::size_t fold) {
    return derive_seed(spec.config.seed, cell_index * 32 + fold + 1);
}

FoldResult run_fold(const Table1Spec& spec, const Dataset& ds,
                    const std::vector<std::size_t>& train_idx,
                    const std::vector<std::size_t>& val_idx, ActivationKind fitted,
                    std::size_t layers, std::uint64_t seed) {
    Dataset train_set = ds.subset(train_idx);
    Dataset val_set = ds.subset(val_idx);

    Network net = make_mlp(spec.d, layers, spec.neurons, fitted, OutputKind::BinaryLogistic);
    Rng init_rng(derive_seed(seed, 1));
    init_network(net, spec.config.init, init_rng);

    FoldResult fr;
    fr.alphas = snapshot_alphas(net);

    TrainConfig cfg = spec.config;
    cfg.seed = derive_seed(seed, 2);
    TrainResult tr = train(net, train_set, &val_set, cfg, BaseLoss::CrossEntropy);
    fr.curve = std::move(tr.curve);
    fill_final_alphas(fr.alphas, net);

    Tensor pred = forward(net, val_set.features);
    std::vector<int> hard = predict_labels(pred, net.output);
    Metrics m = compute_metrics(hard, val_set.labels, 2);
    fr.accuracy = m.accuracy;
    fr.precision = m.precision;
    fr.recall = m.recall;
    return fr;
}

std::string cell_name(const CellResult& cell) {
    std::ostringstream os;
    os << "gen-" << to_string(cell.generator) << "_layers-" << cell.layers << "_fit-"
       << to_string(cell.fitted);
    return os.str();
}

void write_fold_files(const fs::path& dir, const CellResult& cell) {
    for (std::size_t f = 0; f < cell.folds.size(); ++f) {
        const FoldResult& fr = cell.folds[f];
        std::string base = cell_name(cell) + "_fold" + std::to_string(f);
        {
            std::ofstream os(dir / ("curve_" + base + ".csv"));
            os << "epoch,train_loss,validation_loss\n";
            for (std::size_t e = 0; e < fr.curve.train.size(); ++e) {
                os << e << ',' << fmt_g17(fr.curve.train[e]) << ','
                   << fmt_g17(fr.curve.validation[e]) << '\n';
            }
        }
        {
            std::ofstream os(dir / ("alpha_" + base + ".csv"));
            os << "layer,neuron,alpha_initial,alpha_final\n";
            for (const AlphaSnapshot& s : fr.alphas) {
                os << s.layer << ',' << s.unit << ',' << fmt_g17(s.alpha_initial) << ','
                   << fmt_g17(s.alpha_final) << '\n';
            }
        }
    }
}

json fold_to_json(const FoldResult& fr) {
    return json{{"accuracy", fr.accuracy},
                {"precision", fr.precision},
                {"recall", fr.recall}};
}

json spec_to_json_obj(const Table1Spec& spec) {
    std::vector<std::string> gens, fits;
    for (auto g : spec.generators) gens.emplace_back(to_string(g));
    for (auto f : spec.fitted) fits.emplace_back(to_string(f));
    return json{{"generators", gens},
                {"layer_counts", spec.layer_counts},
                {"fitted", fits},
                {"n", spec.n},
                {"d", spec.d},
                {"neurons", spec.neurons},
                {"folds", spec.folds},
                {"stochastic_labels", spec.stochastic_labels},
                {"config", json::parse(train_config_to_json(spec.config))}};
}

Table1Spec spec_from_json_obj(const json& j) {
    Table1Spec spec;
    spec.generators.clear();
    for (const auto& g : j.at("generators")) {
        spec.generators.push_back(activation_from_string(g.get<std::string>()));
    }
    spec.layer_counts = j.at("layer_counts").get<std::vector<std::size_t>>();
    spec.fitted.clear();
    for (const auto& f : j.at("fitted")) {
        spec.fitted.push_back(activation_from_string(f.get<std::string>()));
    }
    spec.n = j.at("n").get<std::size_t>();
    spec.d = j.at("d").get<std::size_t>();
    spec.neurons = j.at("neurons").get<std::size_t>();
    spec.folds = j.at("folds").get<std::size_t>();
    spec.stochastic_labels = j.at("stochastic_labels").get<bool>();
    spec.config = train_config_from_json(j.at("config").dump());
    return spec;
}

}  // namespace

CellResult run_cell(const Table1Spec& spec, std::size_t gi, std::size_t li, std::size_t fi) {
    const std::size_t cell_index =
        (gi * spec.layer_counts.size() + li) * spec.fitted.size() + fi;
    CellResult cell;
    cell.generator = spec.generators[gi];
    cell.layers = spec.layer_counts[li];
    cell.fitted = spec.fitted[fi];

    std::uint64_t ds_seed = dataset_seed(spec, gi, li);
    Dataset ds = simulate(cell.layers, spec.neurons, cell.generator, spec.n, spec.d, ds_seed,
                          spec.stochastic_labels);
    auto folds = kfold_split(ds.size(), spec.folds, ds_seed);
    for (std::size_t f = 0; f < folds.size(); ++f) {
        cell.folds.push_back(run_fold(spec, ds, folds[f].first, folds[f].second, cell.fitted,
                                      cell.layers, fold_train_seed(spec, cell_index, f)));
    }
    return cell;
}

Table1Result run_table1(const Table1Spec& spec) {
    auto t0 = std::chrono::steady_clock::now();
    Table1Result result;
    for (std::size_t gi = 0; gi < spec.generators.size(); ++gi) {
        for (std::size_t li = 0; li < spec.layer_counts.size(); ++li) {
            for (std::size_t fi = 0; fi < spec.fitted.size(); ++fi) {
                result.cells.push_back(run_cell(spec, gi, li, fi));
            }
        }
    }
    result.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    if (!spec.output_dir.empty()) {
        fs::path dir(spec.output_dir);
        fs::create_directories(dir);

        auto cell_at = [&](std::size_t gi, std::size_t li, std::size_t fi) -> const CellResult& {
            return result.cells[(gi * spec.layer_counts.size() + li) * spec.fitted.size() + fi];
        };

        auto write_table = [&](const std::string& file, bool stderr_table) {
            std::ofstream os(dir / file);
            os << "layers,generator";
            for (auto f : spec.fitted) os << ',' << to_string(f);
            os << '\n';
            for (std::size_t li = 0; li < spec.layer_counts.size(); ++li) {
                for (std::size_t gi = 0; gi < spec.generators.size(); ++gi) {
                    os << spec.layer_counts[li] << ',' << to_string(spec.generators[gi]);
                    for (std::size_t fi = 0; fi < spec.fitted.size(); ++fi) {
                        const CellResult& c = cell_at(gi, li, fi);
                        double v = stderr_table ? 100.0 * c.std_error()
                                                : 100.0 * c.mean_accuracy();
                        os << ',' << fmt_g17(v);
                    }
                    os << '\n';
                }
            }
        };
        write_table("table1.csv", false);
        write_table("table1_stderr.csv", true);

        json cells_json = json::array();
        for (const CellResult& c : result.cells) {
            json folds_json = json::array();
            for (const FoldResult& f : c.folds) folds_json.push_back(fold_to_json(f));
            cells_json.push_back(json{{"generator", to_string(c.generator)},
                                      {"layers", c.layers},
                                      {"fitted", to_string(c.fitted)},
                                      {"mean_accuracy", c.mean_accuracy()},
                                      {"std_error", c.std_error()},
                                      {"folds", folds_json}});
            write_fold_files(dir, c);
        }
        json report{{"spec", spec_to_json_obj(spec)},
                    {"cells", cells_json},
                    {"wall_seconds", result.wall_seconds}};
        std::ofstream os(dir / "report.json");
        os << report.dump(2) << '\n';
    }
    return result;
}

std::string table1_spec_to_json(const Table1Spec& spec) {
    return spec_to_json_obj(spec).dump(2);
}

Table1Spec table1_spec_from_json(const std::string& text) {
    return spec_from_json_obj(json::parse(text));
}

Table1Spec table1_spec_from_report(const std::string& report_path) {
    std::ifstream is(report_path);
    if (!is) throw DataError("cannot open report: " + report_path);
    json report = json::parse(is);
    return spec_from_json_obj(report.at("spec"));
}

Network make_lenet_small(ActivationKind conv_act, ActivationKind dense_act,
                         std::size_t image_h, std::size_t image_w, std::size_t classes,
                         std::size_t dense_width) {
    Network net;
    net.output = OutputKind::SoftmaxK;
    net.layers.emplace_back(Conv2DLayer(6, 1, 5, 5, conv_act));
    net.layers.emplace_back(MaxPool2DLayer{});
    net.layers.emplace_back(Conv2DLayer(16, 6, 5, 5, conv_act));
    net.layers.emplace_back(MaxPool2DLayer{});
    net.layers.emplace_back(FlattenLayer{});
    std::size_t h = ((image_h - 4) / 2 - 4) / 2;
    std::size_t w = ((image_w - 4) / 2 - 4) / 2;
    net.layers.emplace_back(DenseLayer(16 * h * w, dense_width, dense_act));
    net.layers.emplace_back(DenseLayer(dense_width, classes, ActivationKind::Identity));
    return net;
}

MnistResult run_mnist(const MnistSpec& spec) {
    auto t0 = std::chrono::steady_clock::now();
    Dataset train_set = load_mnist_idx(spec.train_images, spec.train_labels);
    Dataset test_set = load_mnist_idx(spec.test_images, spec.test_labels);
    if (spec.subset > 0) train_set = train_set.head(spec.subset);

    MnistResult result;
    result.net = make_lenet_small(spec.conv_activation, spec.dense_activation,
                                  train_set.features.dim(2), train_set.features.dim(3), 10);
    Rng init_rng(derive_seed(spec.config.seed, 1));
    init_network(result.net, spec.config.init, init_rng);

    TrainConfig cfg = spec.config;
    cfg.seed = derive_seed(spec.config.seed, 2);
    TrainResult tr = train(result.net, train_set, nullptr, cfg, BaseLoss::CrossEntropy);
    result.curve = std::move(tr.curve);

    // chunked test-set evaluation
    std::vector<int> hard;
    hard.reserve(test_set.size());
    const std::size_t chunk = 500;
    for (std::size_t begin = 0; begin < test_set.size(); begin += chunk) {
        std::vector<std::size_t> idx;
        for (std::size_t i = begin; i < std::min(begin + chunk, test_set.size()); ++i) {
            idx.push_back(i);
        }
        Dataset part = test_set.subset(idx);
        Tensor pred = forward(result.net, part.features);
        for (int label : predict_labels(pred, result.net.output)) hard.push_back(label);
    }
    result.metrics = compute_metrics(hard, test_set.labels, 10);
    result.test_accuracy = result.metrics.accuracy;
    result.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    if (!spec.output_dir.empty()) {
        fs::path dir(spec.output_dir);
        fs::create_directories(dir);
        save_network(result.net, (dir / "model.adact").string());
        {
            std::ofstream os(dir / "curve.csv");
            os << "epoch,train_loss\n";
            for (std::size_t e = 0; e < result.curve.train.size(); ++e) {
                os << e << ',' << fmt_g17(result.curve.train[e]) << '\n';
            }
        }
        {
            std::ofstream os(dir / "alpha_hist.csv");
            write_alpha_hist_csv(os, result.net);
        }
        json report{{"spec",
                     {{"train_images", spec.train_images},
                      {"train_labels", spec.train_labels},
                      {"test_images", spec.test_images},
                      {"test_labels", spec.test_labels},
                      {"conv_activation", to_string(spec.conv_activation)},
                      {"dense_activation", to_string(spec.dense_activation)},
                      {"subset", spec.subset},
                      {"config", json::parse(train_config_to_json(spec.config))}}},
                    {"test_accuracy", result.test_accuracy},
                    {"precision", result.metrics.precision},
                    {"recall", result.metrics.recall},
                    {"wall_seconds", result.wall_seconds}};
        std::ofstream os(dir / "report.json");
        os << report.dump(2) << '\n';
    }
    return result;
}

void write_alpha_hist_csv(std::ostream& os, const Network& net) {
    os << "layer,neuron,alpha\n";
    for (std::size_t li = 0; li < net.layers.size(); ++li) {
        const std::vector<double>* a = nullptr;
        if (const auto* d = std::get_if<DenseLayer>(&net.layers[li])) a = &d->shape_a;
        if (const auto* c = std::get_if<Conv2DLayer>(&net.layers[li])) a = &c->shape_a;
        if (!a) continue;
        for (std::size_t u = 0; u < a->size(); ++u) {
            os << li << ',' << u << ',' << fmt_g17(std::exp((*a)[u])) << '\n';
        }
    }
}

void write_activation_curves_csv(std::ostream& os, const Network& net,
                                 std::span<const double> x_grid) {
    os << "layer,neuron,x,value\n";
    for (std::size_t li = 0; li < net.layers.size(); ++li) {
        ActivationKind kind = ActivationKind::Identity;
        const std::vector<double>* a = nullptr;
        std::size_t units = 0;
        if (const auto* d = std::get_if<DenseLayer>(&net.layers[li])) {
            kind = d->activation;
            a = &d->shape_a;
            units = d->fan_out();
        } else if (const auto* c = std::get_if<Conv2DLayer>(&net.layers[li])) {
            kind = c->activation;
            a = &c->shape_a;
            units = c->out_channels();
        }
        if (kind == ActivationKind::Identity) continue;
        for (std::size_t u = 0; u < units; ++u) {
            double alpha = a->empty() ? 1.0 : std::exp((*a)[u]);
            for (double x : x_grid) {
                os << li << ',' << u << ',' << fmt_g17(x) << ','
                   << fmt_g17(act_value(kind, alpha, x)) << '\n';
            }
        }
    }
}

std::string train_config_to_json(const TrainConfig& config) {
    json j{{"gamma", config.gamma},
           {"gamma_alpha_multiplier", config.gamma_alpha_multiplier},
           {"l1", config.l1},
           {"l2", config.l2},
           {"batch_size", config.batch_size},
           {"epochs", config.epochs},
           {"seed", config.seed},
           {"init", to_string(config.init)},
           {"shuffle_each_epoch", config.shuffle_each_epoch},
           {"penalize_alpha", config.penalize_alpha}};
    return j.dump(2);
}

TrainConfig train_config_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("bad config JSON: ") + e.what());
    }
    TrainConfig c;
    if (j.contains("gamma")) c.gamma = j["gamma"].get<double>();
    if (j.contains("gamma_alpha_multiplier")) {
        c.gamma_alpha_multiplier = j["gamma_alpha_multiplier"].get<double>();
    }
    if (j.contains("l1")) c.l1 = j["l1"].get<double>();
    if (j.contains("l2")) c.l2 = j["l2"].get<double>();
    if (j.contains("batch_size")) c.batch_size = j["batch_size"].get<std::size_t>();
    if (j.contains("epochs")) c.epochs = j["epochs"].get<std::size_t>();
    if (j.contains("seed")) c.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("init")) c.init = init_scheme_from_string(j["init"].get<std::string>());
    if (j.contains("shuffle_each_epoch")) c.shuffle_each_epoch = j["shuffle_each_epoch"].get<bool>();
    if (j.contains("penalize_alpha")) c.penalize_alpha = j["penalize_alpha"].get<bool>();
    c.validate();
    return c;
}

}  // namespace adact
