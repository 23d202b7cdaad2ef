#include "adact/network.hpp"

#include <algorithm>
#include <cmath>

#include "adact/error.hpp"

namespace adact {

DenseLayer::DenseLayer(std::size_t fan_in, std::size_t fan_out, ActivationKind act)
    : weights({fan_in, fan_out}), bias({fan_out}), activation(act) {
    if (is_adaptive(act)) shape_a.assign(fan_out, 0.0);
}

Conv2DLayer::Conv2DLayer(std::size_t out_ch, std::size_t in_ch, std::size_t kh,
                         std::size_t kw, ActivationKind act)
    : kernels({out_ch, in_ch, kh, kw}), bias({out_ch}), activation(act) {
    if (is_adaptive(act)) shape_a.assign(out_ch, 0.0);
}

namespace {

const double kProbClamp = 1e-12;

double clamp_prob(double p) {
    if (!std::isfinite(p) || p < -kProbClamp || p > 1.0 + kProbClamp) {
        throw NumericError("probability outside valid domain: " + std::to_string(p));
    }
    return std::clamp(p, kProbClamp, 1.0 - kProbClamp);
}

[[noreturn]] void layer_shape_error(std::size_t index, const std::string& detail) {
    throw ShapeError("layer " + std::to_string(index) + ": " + detail);
}

Tensor dense_forward(DenseLayer& layer, const Tensor& in, std::size_t index) {
    if (in.rank() != 2 || in.dim(1) != layer.fan_in()) {
        layer_shape_error(index, "dense expects [b x " + std::to_string(layer.fan_in()) +
                                     "], got " + in.shape_string());
    }
    layer.in_cache = in;
    layer.eta_cache = add_row_bias(matmul(in, layer.weights), layer.bias);
    Tensor out = layer.eta_cache;
    const std::size_t b = out.dim(0), n = out.dim(1);
    for (std::size_t j = 0; j < n; ++j) {
        double alpha = layer.shape_a.empty() ? 1.0 : std::exp(layer.shape_a[j]);
        for (std::size_t i = 0; i < b; ++i) {
            out.at2(i, j) = act_value(layer.activation, alpha, layer.eta_cache.at2(i, j));
        }
    }
    layer.out_cache = out;
    return out;
}

Tensor conv_forward(Conv2DLayer& layer, const Tensor& in, std::size_t index) {
    const std::size_t kh = layer.kernels.dim(2), kw = layer.kernels.dim(3);
    if (in.rank() != 4 || in.dim(1) != layer.in_channels()) {
        layer_shape_error(index, "conv expects [b x " + std::to_string(layer.in_channels()) +
                                     " x h x w], got " + in.shape_string());
    }
    if (in.dim(2) < kh || in.dim(3) < kw) {
        layer_shape_error(index, "kernel " + std::to_string(kh) + "x" + std::to_string(kw) +
                                     " larger than input " + in.shape_string());
    }
    const std::size_t b = in.dim(0), ic = in.dim(1);
    const std::size_t oh = in.dim(2) - kh + 1, ow = in.dim(3) - kw + 1;
    const std::size_t oc = layer.out_channels();
    layer.in_cache = in;
    Tensor eta({b, oc, oh, ow});
    for (std::size_t bi = 0; bi < b; ++bi) {
        for (std::size_t o = 0; o < oc; ++o) {
            for (std::size_t y = 0; y < oh; ++y) {
                for (std::size_t x = 0; x < ow; ++x) {
                    double acc = layer.bias[o];
                    for (std::size_t c = 0; c < ic; ++c)
                        for (std::size_t ky = 0; ky < kh; ++ky)
                            for (std::size_t kx = 0; kx < kw; ++kx)
                                acc += in.at4(bi, c, y + ky, x + kx) *
                                       layer.kernels.at4(o, c, ky, kx);
                    eta.at4(bi, o, y, x) = acc;
                }
            }
        }
    }
    layer.eta_cache = eta;
    Tensor out = eta;
    for (std::size_t o = 0; o < oc; ++o) {
        double alpha = layer.shape_a.empty() ? 1.0 : std::exp(layer.shape_a[o]);
        for (std::size_t bi = 0; bi < b; ++bi)
            for (std::size_t y = 0; y < oh; ++y)
                for (std::size_t x = 0; x < ow; ++x)
                    out.at4(bi, o, y, x) =
                        act_value(layer.activation, alpha, eta.at4(bi, o, y, x));
    }
    layer.out_cache = out;
    return out;
}

Tensor pool_forward(MaxPool2DLayer& layer, const Tensor& in, std::size_t index) {
    if (in.rank() != 4) layer_shape_error(index, "maxpool expects rank 4, got " + in.shape_string());
    const std::size_t b = in.dim(0), c = in.dim(1);
    const std::size_t oh = in.dim(2) / 2, ow = in.dim(3) / 2;
    if (oh == 0 || ow == 0) layer_shape_error(index, "maxpool input too small: " + in.shape_string());
    layer.in_shape_cache = in.shape();
    layer.out_shape_cache = {b, c, oh, ow};
    Tensor out({b, c, oh, ow});
    layer.argmax_cache.assign(out.size(), 0);
    std::size_t oi = 0;
    for (std::size_t bi = 0; bi < b; ++bi) {
        for (std::size_t ci = 0; ci < c; ++ci) {
            for (std::size_t y = 0; y < oh; ++y) {
                for (std::size_t x = 0; x < ow; ++x) {
                    double best = in.at4(bi, ci, 2 * y, 2 * x);
                    std::size_t best_flat =
                        ((bi * in.dim(1) + ci) * in.dim(2) + 2 * y) * in.dim(3) + 2 * x;
                    // row-major scan; strict > keeps the first maximum
                    for (std::size_t dy = 0; dy < 2; ++dy) {
                        for (std::size_t dx = 0; dx < 2; ++dx) {
                            double v = in.at4(bi, ci, 2 * y + dy, 2 * x + dx);
                            if (v > best) {
                                best = v;
                                best_flat = ((bi * in.dim(1) + ci) * in.dim(2) + 2 * y + dy) *
                                                in.dim(3) +
                                            2 * x + dx;
                            }
                        }
                    }
                    out[oi] = best;
                    layer.argmax_cache[oi] = best_flat;
                    ++oi;
                }
            }
        }
    }
    return out;
}

Tensor output_transform(OutputKind output, const Tensor& logits) {
    if (output == OutputKind::BinaryLogistic) {
        if (logits.rank() != 2 || logits.dim(1) != 1) {
            throw ShapeError("binary output expects [b x 1] logits, got " +
                             logits.shape_string());
        }
        Tensor out = logits;
        for (std::size_t i = 0; i < out.size(); ++i) out[i] = logistic(out[i]);
        return out;
    }
    if (logits.rank() != 2) {
        throw ShapeError("softmax output expects rank 2 logits, got " + logits.shape_string());
    }
    Tensor out = logits;
    const std::size_t b = out.dim(0), k = out.dim(1);
    for (std::size_t i = 0; i < b; ++i) {
        double mx = out.at2(i, 0);
        for (std::size_t j = 1; j < k; ++j) mx = std::max(mx, out.at2(i, j));
        double denom = 0.0;
        for (std::size_t j = 0; j < k; ++j) {
            double e = std::exp(out.at2(i, j) - mx);
            out.at2(i, j) = e;
            denom += e;
        }
        for (std::size_t j = 0; j < k; ++j) out.at2(i, j) /= denom;
    }
    return out;
}

}  // namespace

Tensor forward(Network& net, const Tensor& batch) {
    Tensor cur = batch;
    for (std::size_t li = 0; li < net.layers.size(); ++li) {
        cur = std::visit(
            [&](auto& layer) -> Tensor {
                using T = std::decay_t<decltype(layer)>;
                if constexpr (std::is_same_v<T, DenseLayer>) {
                    return dense_forward(layer, cur, li);
                } else if constexpr (std::is_same_v<T, Conv2DLayer>) {
                    return conv_forward(layer, cur, li);
                } else if constexpr (std::is_same_v<T, MaxPool2DLayer>) {
                    return pool_forward(layer, cur, li);
                } else {
                    if (cur.rank() != 4) layer_shape_error(li, "flatten expects rank 4, got " + cur.shape_string());
                    layer.in_shape_cache = cur.shape();
                    return cur.reshaped({cur.dim(0), cur.size() / cur.dim(0)});
                }
            },
            net.layers[li]);
    }
    net.pred_cache = output_transform(net.output, cur);
    net.cached_batch = batch.dim(0);
    return net.pred_cache;
}

namespace {

// d(summed base loss)/d(logits), using cached predictions. The batch
// gradient is the plain sum of per-sample gradients; the learning rate
// alone sets the step scale.
Tensor loss_logit_grad(const Network& net, const std::vector<int>& labels,
                       const LossSpec& loss) {
    const Tensor& p = net.pred_cache;
    const std::size_t b = p.dim(0);
    Tensor d = p;
    if (net.output == OutputKind::BinaryLogistic) {
        for (std::size_t i = 0; i < b; ++i) {
            double pi = p.at2(i, 0);
            double y = labels[i] ? 1.0 : 0.0;
            if (loss.base == BaseLoss::CrossEntropy) {
                d.at2(i, 0) = pi - y;
            } else {
                d.at2(i, 0) = 2.0 * (pi - y) * pi * (1.0 - pi);
            }
        }
        return d;
    }
    const std::size_t k = p.dim(1);
    for (std::size_t i = 0; i < b; ++i) {
        if (loss.base == BaseLoss::CrossEntropy) {
            for (std::size_t j = 0; j < k; ++j) {
                double y = (static_cast<std::size_t>(labels[i]) == j) ? 1.0 : 0.0;
                d.at2(i, j) = p.at2(i, j) - y;
            }
        } else {
            // squared error through softmax: dEta_j = p_j (dp_j - sum_k p_k dp_k)
            double dot = 0.0;
            std::vector<double> dp(k);
            for (std::size_t j = 0; j < k; ++j) {
                double y = (static_cast<std::size_t>(labels[i]) == j) ? 1.0 : 0.0;
                dp[j] = 2.0 * (p.at2(i, j) - y);
                dot += p.at2(i, j) * dp[j];
            }
            for (std::size_t j = 0; j < k; ++j) {
                d.at2(i, j) = p.at2(i, j) * (dp[j] - dot);
            }
        }
    }
    return d;
}

double sign0(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

void add_weight_penalty_grad(Tensor& dw, const Tensor& w, const LossSpec& loss) {
    for (std::size_t i = 0; i < w.size(); ++i) {
        dw[i] += loss.l1 * sign0(w[i]) + 2.0 * loss.l2 * w[i];
    }
}

// Penalty gradient w.r.t. the unconstrained a, alpha > 0 always.
double alpha_penalty_grad_a(double alpha, const LossSpec& loss) {
    return (loss.l1 + 2.0 * loss.l2 * alpha) * alpha;
}

LayerGrads dense_backward(DenseLayer& layer, Tensor& d_out, const LossSpec& loss,
                          bool is_last) {
    const std::size_t b = d_out.dim(0), n = layer.fan_out();
    LayerGrads g;
    g.has_params = true;
    Tensor d_eta = d_out;
    g.d_shape_a.assign(layer.shape_a.size(), 0.0);
    if (!is_last || layer.activation != ActivationKind::Identity) {
        for (std::size_t j = 0; j < n; ++j) {
            double alpha = layer.shape_a.empty() ? 1.0 : std::exp(layer.shape_a[j]);
            double da = 0.0;
            for (std::size_t i = 0; i < b; ++i) {
                double eta = layer.eta_cache.at2(i, j);
                d_eta.at2(i, j) = d_out.at2(i, j) * act_dx(layer.activation, alpha, eta);
                if (!layer.shape_a.empty()) {
                    da += d_out.at2(i, j) * act_dalpha(layer.activation, alpha, eta);
                }
            }
            if (!layer.shape_a.empty()) g.d_shape_a[j] = da * alpha;  // chain a -> alpha
        }
    }
    g.d_weights = matmul(transpose(layer.in_cache), d_eta);
    g.d_bias = reduce_sum(d_eta, 0);
    add_weight_penalty_grad(g.d_weights, layer.weights, loss);
    if (loss.penalize_alpha) {
        for (std::size_t j = 0; j < g.d_shape_a.size(); ++j) {
            g.d_shape_a[j] += alpha_penalty_grad_a(std::exp(layer.shape_a[j]), loss);
        }
    }
    d_out = matmul(d_eta, transpose(layer.weights));
    return g;
}

LayerGrads conv_backward(Conv2DLayer& layer, Tensor& d_out, const LossSpec& loss) {
    const Tensor& in = layer.in_cache;
    const std::size_t b = in.dim(0), ic = in.dim(1);
    const std::size_t kh = layer.kernels.dim(2), kw = layer.kernels.dim(3);
    const std::size_t oc = layer.out_channels();
    const std::size_t oh = layer.eta_cache.dim(2), ow = layer.eta_cache.dim(3);

    LayerGrads g;
    g.has_params = true;
    g.d_weights = Tensor::zeros(layer.kernels.shape());
    g.d_bias = Tensor::zeros(layer.bias.shape());
    g.d_shape_a.assign(layer.shape_a.size(), 0.0);

    Tensor d_eta = d_out;
    for (std::size_t o = 0; o < oc; ++o) {
        double alpha = layer.shape_a.empty() ? 1.0 : std::exp(layer.shape_a[o]);
        double da = 0.0;
        for (std::size_t bi = 0; bi < b; ++bi) {
            for (std::size_t y = 0; y < oh; ++y) {
                for (std::size_t x = 0; x < ow; ++x) {
                    double eta = layer.eta_cache.at4(bi, o, y, x);
                    double go = d_out.at4(bi, o, y, x);
                    d_eta.at4(bi, o, y, x) = go * act_dx(layer.activation, alpha, eta);
                    if (!layer.shape_a.empty()) {
                        da += go * act_dalpha(layer.activation, alpha, eta);
                    }
                }
            }
        }
        // alpha gradient sums over batch and all spatial positions
        if (!layer.shape_a.empty()) g.d_shape_a[o] = da * alpha;
    }

    Tensor d_in = Tensor::zeros(in.shape());
    for (std::size_t bi = 0; bi < b; ++bi) {
        for (std::size_t o = 0; o < oc; ++o) {
            for (std::size_t y = 0; y < oh; ++y) {
                for (std::size_t x = 0; x < ow; ++x) {
                    double ge = d_eta.at4(bi, o, y, x);
                    if (ge == 0.0) continue;
                    g.d_bias[o] += ge;
                    for (std::size_t c = 0; c < ic; ++c) {
                        for (std::size_t ky = 0; ky < kh; ++ky) {
                            for (std::size_t kx = 0; kx < kw; ++kx) {
                                g.d_weights.at4(o, c, ky, kx) +=
                                    ge * in.at4(bi, c, y + ky, x + kx);
                                d_in.at4(bi, c, y + ky, x + kx) +=
                                    ge * layer.kernels.at4(o, c, ky, kx);
                            }
                        }
                    }
                }
            }
        }
    }
    add_weight_penalty_grad(g.d_weights, layer.kernels, loss);
    if (loss.penalize_alpha) {
        for (std::size_t o = 0; o < g.d_shape_a.size(); ++o) {
            g.d_shape_a[o] += alpha_penalty_grad_a(std::exp(layer.shape_a[o]), loss);
        }
    }
    d_out = d_in;
    return g;
}

}  // namespace

Gradients backward(Network& net, const Tensor& batch, const std::vector<int>& labels,
                   const LossSpec& loss) {
    if (net.cached_batch == 0 || net.cached_batch != batch.dim(0)) {
        throw NumericError("backward: no forward cache for this batch");
    }
    if (labels.size() != batch.dim(0)) {
        throw ShapeError("backward: " + std::to_string(labels.size()) + " labels for batch of " +
                         std::to_string(batch.dim(0)));
    }
    Tensor d_cur = loss_logit_grad(net, labels, loss);
    Gradients grads;
    grads.layers.resize(net.layers.size());
    for (std::size_t li = net.layers.size(); li-- > 0;) {
        const bool is_last = (li + 1 == net.layers.size());
        grads.layers[li] = std::visit(
            [&](auto& layer) -> LayerGrads {
                using T = std::decay_t<decltype(layer)>;
                if constexpr (std::is_same_v<T, DenseLayer>) {
                    return dense_backward(layer, d_cur, loss, is_last);
                } else if constexpr (std::is_same_v<T, Conv2DLayer>) {
                    return conv_backward(layer, d_cur, loss);
                } else if constexpr (std::is_same_v<T, MaxPool2DLayer>) {
                    Tensor d_in(std::vector<std::size_t>(layer.in_shape_cache));
                    for (std::size_t i = 0; i < d_cur.size(); ++i) {
                        d_in[layer.argmax_cache[i]] += d_cur[i];
                    }
                    d_cur = std::move(d_in);
                    return LayerGrads{};
                } else {
                    d_cur = d_cur.reshaped(std::vector<std::size_t>(layer.in_shape_cache));
                    return LayerGrads{};
                }
            },
            net.layers[li]);
    }
    return grads;
}

double penalty_value(const LossSpec& loss, const Network& net) {
    double l1_sum = 0.0, l2_sum = 0.0;
    for (const Layer& l : net.layers) {
        const Tensor* w = nullptr;
        const std::vector<double>* a = nullptr;
        if (const auto* d = std::get_if<DenseLayer>(&l)) {
            w = &d->weights;
            a = &d->shape_a;
        } else if (const auto* c = std::get_if<Conv2DLayer>(&l)) {
            w = &c->kernels;
            a = &c->shape_a;
        }
        if (!w) continue;
        for (double v : w->data()) {
            l1_sum += std::abs(v);
            l2_sum += v * v;
        }
        if (loss.penalize_alpha) {
            for (double av : *a) {
                double alpha = std::exp(av);
                l1_sum += alpha;
                l2_sum += alpha * alpha;
            }
        }
    }
    return loss.l1 * l1_sum + loss.l2 * l2_sum;
}

double loss_value(const Tensor& predictions, const std::vector<int>& labels,
                  const LossSpec& loss, const Network& net) {
    const std::size_t b = predictions.dim(0);
    if (labels.size() != b) {
        throw ShapeError("loss_value: " + std::to_string(labels.size()) +
                         " labels for batch of " + std::to_string(b));
    }
    double total = 0.0;
    const bool binary = predictions.dim(1) == 1;
    for (std::size_t i = 0; i < b; ++i) {
        if (binary) {
            double pi = clamp_prob(predictions.at2(i, 0));
            double y = labels[i] ? 1.0 : 0.0;
            if (loss.base == BaseLoss::CrossEntropy) {
                total += -(y * std::log(pi) + (1.0 - y) * std::log(1.0 - pi));
            } else {
                total += (pi - y) * (pi - y);
            }
        } else {
            if (loss.base == BaseLoss::CrossEntropy) {
                double pi = clamp_prob(predictions.at2(i, static_cast<std::size_t>(labels[i])));
                total += -std::log(pi);
            } else {
                for (std::size_t j = 0; j < predictions.dim(1); ++j) {
                    double y = (static_cast<std::size_t>(labels[i]) == j) ? 1.0 : 0.0;
                    double d = predictions.at2(i, j) - y;
                    total += d * d;
                }
            }
        }
    }
    return total + penalty_value(loss, net);
}

void for_each_param(Network& net,
                    const std::function<void(double&, ParamClass, const std::string&)>& fn) {
    for (std::size_t li = 0; li < net.layers.size(); ++li) {
        std::string prefix = "layer" + std::to_string(li);
        auto visit_params = [&](Tensor& w, Tensor& b, std::vector<double>& a) {
            for (std::size_t i = 0; i < w.size(); ++i)
                fn(w[i], ParamClass::Weight, prefix + ".w[" + std::to_string(i) + "]");
            for (std::size_t i = 0; i < b.size(); ++i)
                fn(b[i], ParamClass::Bias, prefix + ".b[" + std::to_string(i) + "]");
            for (std::size_t i = 0; i < a.size(); ++i)
                fn(a[i], ParamClass::Alpha, prefix + ".a[" + std::to_string(i) + "]");
        };
        if (auto* d = std::get_if<DenseLayer>(&net.layers[li])) {
            visit_params(d->weights, d->bias, d->shape_a);
        } else if (auto* c = std::get_if<Conv2DLayer>(&net.layers[li])) {
            visit_params(c->kernels, c->bias, c->shape_a);
        }
    }
}

void for_each_grad(Gradients& grads,
                   const std::function<void(double&, ParamClass, const std::string&)>& fn) {
    for (std::size_t li = 0; li < grads.layers.size(); ++li) {
        LayerGrads& g = grads.layers[li];
        if (!g.has_params) continue;
        std::string prefix = "layer" + std::to_string(li);
        for (std::size_t i = 0; i < g.d_weights.size(); ++i)
            fn(g.d_weights[i], ParamClass::Weight, prefix + ".w[" + std::to_string(i) + "]");
        for (std::size_t i = 0; i < g.d_bias.size(); ++i)
            fn(g.d_bias[i], ParamClass::Bias, prefix + ".b[" + std::to_string(i) + "]");
        for (std::size_t i = 0; i < g.d_shape_a.size(); ++i)
            fn(g.d_shape_a[i], ParamClass::Alpha, prefix + ".a[" + std::to_string(i) + "]");
    }
}

std::size_t param_count(const Network& net) {
    std::size_t n = 0;
    for_each_param(const_cast<Network&>(net),
                   [&](double&, ParamClass, const std::string&) { ++n; });
    return n;
}

std::size_t output_classes(const Network& net) {
    if (net.output == OutputKind::BinaryLogistic) return 2;
    for (auto it = net.layers.rbegin(); it != net.layers.rend(); ++it) {
        if (const auto* d = std::get_if<DenseLayer>(&*it)) return d->fan_out();
    }
    throw ShapeError("softmax network has no dense output layer");
}

std::vector<int> predict_labels(const Tensor& predictions, OutputKind output) {
    std::vector<int> out(predictions.dim(0));
    if (output == OutputKind::BinaryLogistic) {
        for (std::size_t i = 0; i < predictions.dim(0); ++i) {
            out[i] = predictions.at2(i, 0) > 0.5 ? 1 : 0;
        }
    } else {
        auto idx = argmax_rows(predictions);
        for (std::size_t i = 0; i < idx.size(); ++i) out[i] = static_cast<int>(idx[i]);
    }
    return out;
}

Network make_mlp(std::size_t d, std::size_t hidden, std::size_t width, ActivationKind act,
                 OutputKind output, std::size_t classes) {
    Network net;
    net.output = output;
    std::size_t fan_in = d;
    for (std::size_t i = 0; i < hidden; ++i) {
        net.layers.emplace_back(DenseLayer(fan_in, width, act));
        fan_in = width;
    }
    std::size_t head = output == OutputKind::BinaryLogistic ? 1 : classes;
    net.layers.emplace_back(DenseLayer(fan_in, head, ActivationKind::Identity));
    return net;
}

}  // namespace adact
