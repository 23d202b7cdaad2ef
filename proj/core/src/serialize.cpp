#include "adact/serialize.hpp"

#include <fstream>
#include <sstream>

#include "adact/error.hpp"
#include "adact/format.hpp"

namespace adact {

namespace {

const char* kMagic = "adact-model";
const char* kVersion = "v1";

void write_values(std::ostream& os, const char* tag, std::span<const double> values) {
    os << tag;
    for (double v : values) os << ' ' << fmt_g17(v);
    os << '\n';
}

std::vector<double> read_values(std::istream& is, const char* tag, std::size_t count) {
    std::string got;
    is >> got;
    if (got != tag) throw DataError("model file: expected '" + std::string(tag) + "', got '" + got + "'");
    std::vector<double> out(count);
    for (double& v : out) {
        if (!(is >> v)) throw DataError("model file: truncated value list for '" + std::string(tag) + "'");
    }
    return out;
}

// An unknown activation name in a model file is bad data, not bad config.
ActivationKind read_activation(const std::string& name) {
    try {
        return activation_from_string(name);
    } catch (const ConfigError& e) {
        throw DataError(std::string("model file: ") + e.what());
    }
}

}  // namespace

void save_network(const Network& net, std::ostream& os) {
    os << kMagic << ' ' << kVersion << '\n';
    os << "output "
       << (net.output == OutputKind::BinaryLogistic ? "binary_logistic" : "softmax") << '\n';
    os << "layers " << net.layers.size() << '\n';
    for (const Layer& l : net.layers) {
        if (const auto* d = std::get_if<DenseLayer>(&l)) {
            os << "dense " << d->fan_in() << ' ' << d->fan_out() << ' '
               << to_string(d->activation) << '\n';
            write_values(os, "w", d->weights.data());
            write_values(os, "b", d->bias.data());
            if (!d->shape_a.empty()) write_values(os, "a", d->shape_a);
        } else if (const auto* c = std::get_if<Conv2DLayer>(&l)) {
            os << "conv2d " << c->kernels.dim(0) << ' ' << c->kernels.dim(1) << ' '
               << c->kernels.dim(2) << ' ' << c->kernels.dim(3) << ' '
               << to_string(c->activation) << '\n';
            write_values(os, "k", c->kernels.data());
            write_values(os, "b", c->bias.data());
            if (!c->shape_a.empty()) write_values(os, "a", c->shape_a);
        } else if (std::holds_alternative<MaxPool2DLayer>(l)) {
            os << "maxpool2d\n";
        } else {
            os << "flatten\n";
        }
    }
    os << "end\n";
}

void save_network(const Network& net, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw DataError("cannot open model file for writing: " + path);
    save_network(net, os);
}

Network load_network(std::istream& is) {
    std::string magic, version;
    if (!(is >> magic >> version) || magic != kMagic) {
        throw DataError("not an adact model file");
    }
    if (version != kVersion) throw DataError("unsupported model version: " + version);

    std::string key, value;
    is >> key >> value;
    if (key != "output") throw DataError("model file: expected 'output'");
    Network net;
    if (value == "binary_logistic") {
        net.output = OutputKind::BinaryLogistic;
    } else if (value == "softmax") {
        net.output = OutputKind::SoftmaxK;
    } else {
        throw DataError("model file: unknown output kind '" + value + "'");
    }

    std::size_t count = 0;
    is >> key >> count;
    if (key != "layers") throw DataError("model file: expected 'layers'");

    for (std::size_t i = 0; i < count; ++i) {
        std::string kind;
        if (!(is >> kind)) throw DataError("model file: truncated layer list");
        if (kind == "dense") {
            std::size_t fan_in, fan_out;
            std::string act;
            is >> fan_in >> fan_out >> act;
            DenseLayer d(fan_in, fan_out, read_activation(act));
            d.weights = Tensor({fan_in, fan_out}, read_values(is, "w", fan_in * fan_out));
            d.bias = Tensor({fan_out}, read_values(is, "b", fan_out));
            if (is_adaptive(d.activation)) d.shape_a = read_values(is, "a", fan_out);
            net.layers.emplace_back(std::move(d));
        } else if (kind == "conv2d") {
            std::size_t oc, ic, kh, kw;
            std::string act;
            is >> oc >> ic >> kh >> kw >> act;
            Conv2DLayer c(oc, ic, kh, kw, read_activation(act));
            c.kernels = Tensor({oc, ic, kh, kw}, read_values(is, "k", oc * ic * kh * kw));
            c.bias = Tensor({oc}, read_values(is, "b", oc));
            if (is_adaptive(c.activation)) c.shape_a = read_values(is, "a", oc);
            net.layers.emplace_back(std::move(c));
        } else if (kind == "maxpool2d") {
            net.layers.emplace_back(MaxPool2DLayer{});
        } else if (kind == "flatten") {
            net.layers.emplace_back(FlattenLayer{});
        } else {
            throw DataError("model file: unknown layer kind '" + kind + "'");
        }
    }
    is >> key;
    if (key != "end") throw DataError("model file: missing end marker");
    return net;
}

Network load_network(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw DataError("cannot open model file: " + path);
    return load_network(is);
}

}  // namespace adact
