#include <cmath>
#include <vector>

#include "adact/error.hpp"
#include "adact/trainer.hpp"

namespace adact {

GradCheckReport grad_check(Network& net, const Tensor& batch, const std::vector<int>& labels,
                           const LossSpec& loss, double h, double tol) {
    if (param_count(net) > 10000) {
        throw ConfigError("grad_check: network too large to perturb every parameter");
    }

    forward(net, batch);
    Gradients analytic = backward(net, batch, labels, loss);
    std::vector<double> analytic_flat;
    for_each_grad(analytic, [&](double& g, ParamClass, const std::string&) {
        analytic_flat.push_back(g);
    });

    // Collect parameter pointers in the same visitation order.
    std::vector<double*> params;
    std::vector<ParamClass> classes;
    std::vector<std::string> names;
    for_each_param(net, [&](double& p, ParamClass cls, const std::string& name) {
        params.push_back(&p);
        classes.push_back(cls);
        names.push_back(name);
    });

    GradCheckReport report;
    report.tolerance = tol;
    for (std::size_t i = 0; i < params.size(); ++i) {
        double saved = *params[i];
        *params[i] = saved + h;
        double up = loss_value(forward(net, batch), labels, loss, net);
        *params[i] = saved - h;
        double down = loss_value(forward(net, batch), labels, loss, net);
        *params[i] = saved;

        double numeric = (up - down) / (2.0 * h);
        // Denominator floor: central differences of an O(1) loss carry a
        // few 1e-11 of absolute noise at h=1e-5 (eps/h plus summation
        // error), so gradients below ~1e-5 cannot be resolved to 1e-5
        // relative; they are checked against the floor instead.
        double denom = std::max({std::abs(numeric), std::abs(analytic_flat[i]), 1e-5});
        double rel = std::abs(numeric - analytic_flat[i]) / denom;

        auto& cls = classes[i] == ParamClass::Weight
                        ? report.weights
                        : (classes[i] == ParamClass::Bias ? report.biases : report.alphas);
        ++cls.count;
        if (rel > cls.max_rel_err) {
            cls.max_rel_err = rel;
            cls.worst_param = names[i];
        }
        if (rel > report.max_rel_err) {
            report.max_rel_err = rel;
            report.worst_param = names[i];
        }
    }
    return report;
}

}  // namespace adact
