#include "adact/activation.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "adact/error.hpp"
#include "adact/format.hpp"

namespace adact {

bool is_adaptive(ActivationKind kind) {
    switch (kind) {
        case ActivationKind::AdaptiveGumbel:
        case ActivationKind::AdaptiveReLUExp:
        case ActivationKind::AdaptiveReLULogistic:
            return true;
        default:
            return false;
    }
}

const char* to_string(ActivationKind kind) {
    switch (kind) {
        case ActivationKind::Identity: return "identity";
        case ActivationKind::Sigmoid: return "sigmoid";
        case ActivationKind::ReLU: return "relu";
        case ActivationKind::AdaptiveGumbel: return "adaptive_gumbel";
        case ActivationKind::AdaptiveReLUExp: return "adaptive_relu_exp";
        case ActivationKind::AdaptiveReLULogistic: return "adaptive_relu_logistic";
    }
    return "?";
}

ActivationKind activation_from_string(const std::string& name) {
    if (name == "identity") return ActivationKind::Identity;
    if (name == "sigmoid") return ActivationKind::Sigmoid;
    if (name == "relu") return ActivationKind::ReLU;
    if (name == "adaptive_gumbel") return ActivationKind::AdaptiveGumbel;
    if (name == "adaptive_relu_exp") return ActivationKind::AdaptiveReLUExp;
    if (name == "adaptive_relu_logistic") return ActivationKind::AdaptiveReLULogistic;
    throw ConfigError("unknown activation kind: " + name);
}

double logistic(double x) {
    if (x >= 0.0) {
        return 1.0 / (1.0 + std::exp(-x));
    }
    double e = std::exp(x);
    return e / (1.0 + e);
}

namespace {

void require_alpha(ActivationKind kind, double alpha) {
    if (!(alpha > 0.0) || !std::isfinite(alpha)) {
        throw DomainError(std::string("activation ") + to_string(kind) +
                          " requires alpha > 0, got " + std::to_string(alpha));
    }
}

// log(1 + alpha e^x) without overflow. Above u = 40 the +1 is below
// double resolution and log1p(e^u) == u.
double gumbel_log_term(double alpha, double x) {
    double u = x + std::log(alpha);
    if (u > 40.0) return u;
    return std::log1p(std::exp(u));
}

// logistic(z) and 1 - logistic(z) as a pair, each computed without
// cancellation.
struct LogisticPair {
    double s;
    double one_minus_s;
};

LogisticPair logistic_pair(double z) {
    if (z >= 0.0) {
        double e = std::exp(-z);
        return {1.0 / (1.0 + e), e / (1.0 + e)};
    }
    double e = std::exp(z);
    return {e / (1.0 + e), 1.0 / (1.0 + e)};
}

}  // namespace

double act_value(ActivationKind kind, double alpha, double x) {
    switch (kind) {
        case ActivationKind::Identity:
            return x;
        case ActivationKind::Sigmoid:
            return logistic(x);
        case ActivationKind::ReLU:
            return x > 0.0 ? x : 0.0;
        case ActivationKind::AdaptiveGumbel: {
            require_alpha(kind, alpha);
            double t = gumbel_log_term(alpha, x);
            return -std::expm1(-t / alpha);
        }
        case ActivationKind::AdaptiveReLUExp: {
            require_alpha(kind, alpha);
            if (x <= 0.0) return 0.0;
            return x * -std::expm1(-alpha * x);
        }
        case ActivationKind::AdaptiveReLULogistic: {
            require_alpha(kind, alpha);
            return x * logistic_pair(alpha * x).s;
        }
    }
    throw DomainError("bad activation kind");
}

double act_dx(ActivationKind kind, double alpha, double x) {
    switch (kind) {
        case ActivationKind::Identity:
            return 1.0;
        case ActivationKind::Sigmoid: {
            auto [s, oms] = logistic_pair(x);
            return s * oms;
        }
        case ActivationKind::ReLU:
            return x > 0.0 ? 1.0 : 0.0;
        case ActivationKind::AdaptiveGumbel: {
            require_alpha(kind, alpha);
            // d/dx = (1 + alpha e^x)^(-1/alpha) * e^x / (1 + alpha e^x)
            //      = exp(-t/alpha + x - t),  t = log(1 + alpha e^x)
            double t = gumbel_log_term(alpha, x);
            return std::exp(-t / alpha + x - t);
        }
        case ActivationKind::AdaptiveReLUExp: {
            require_alpha(kind, alpha);
            if (x <= 0.0) return 0.0;  // subderivative 0 at x = 0
            double e = std::exp(-alpha * x);
            return -std::expm1(-alpha * x) + alpha * x * e;
        }
        case ActivationKind::AdaptiveReLULogistic: {
            require_alpha(kind, alpha);
            auto [s, oms] = logistic_pair(alpha * x);
            return s + alpha * x * s * oms;
        }
    }
    throw DomainError("bad activation kind");
}

double act_dalpha(ActivationKind kind, double alpha, double x) {
    if (!is_adaptive(kind)) {
        throw UnsupportedOperationError(std::string("act_dalpha: ") + to_string(kind) +
                                        " has no shape parameter");
    }
    require_alpha(kind, alpha);
    switch (kind) {
        case ActivationKind::AdaptiveGumbel: {
            // d/dalpha = (1 + alpha e^x)^(-1/alpha)
            //            * [ e^x / (alpha (1 + alpha e^x)) - t / alpha^2 ]
            double t = gumbel_log_term(alpha, x);
            double ex_over = std::exp(x - t);  // e^x / (1 + alpha e^x)
            return std::exp(-t / alpha) * (ex_over / alpha - t / (alpha * alpha));
        }
        case ActivationKind::AdaptiveReLUExp:
            if (x <= 0.0) return 0.0;
            return x * x * std::exp(-alpha * x);
        case ActivationKind::AdaptiveReLULogistic: {
            auto [s, oms] = logistic_pair(alpha * x);
            return x * x * s * oms;
        }
        default:
            throw DomainError("bad activation kind");
    }
}

LimitCheckReport act_limits_check(ActivationKind kind, double alpha,
                                  std::span<const double> x_grid) {
    if (x_grid.empty()) throw DomainError("act_limits_check: empty grid");
    auto limit = [kind](double x) -> double {
        switch (kind) {
            case ActivationKind::AdaptiveGumbel:
                return -std::expm1(-std::exp(x));  // Gumbel CDF, alpha -> 0
            case ActivationKind::AdaptiveReLUExp:
            case ActivationKind::AdaptiveReLULogistic:
                return x > 0.0 ? x : 0.0;  // ReLU, alpha -> inf
            default:
                throw UnsupportedOperationError(
                    std::string("act_limits_check: ") + to_string(kind) +
                    " has no parametric limit");
        }
    };
    LimitCheckReport report;
    for (double x : x_grid) {
        double dev = std::abs(act_value(kind, alpha, x) - limit(x));
        if (dev > report.max_abs_dev) {
            report.max_abs_dev = dev;
            report.worst_x = x;
        }
    }
    return report;
}

double identifiability_witness(double alpha1, double alpha2,
                               std::span<const double> x_grid) {
    if (x_grid.empty()) throw DomainError("identifiability_witness: empty grid");
    require_alpha(ActivationKind::AdaptiveGumbel, alpha1);
    require_alpha(ActivationKind::AdaptiveGumbel, alpha2);
    double sup = 0.0;
    for (double x : x_grid) {
        double d = std::abs(act_value(ActivationKind::AdaptiveGumbel, alpha1, x) -
                            act_value(ActivationKind::AdaptiveGumbel, alpha2, x));
        sup = std::max(sup, d);
    }
    return sup;
}

std::vector<double> make_grid(double lo, double hi, std::size_t n) {
    std::vector<double> grid(n);
    for (std::size_t i = 0; i < n; ++i) {
        grid[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
    }
    return grid;
}

void curve_dump(std::ostream& os, ActivationKind kind, double alpha,
                std::span<const double> x_grid) {
    os << "x,value,dx,dalpha\n";
    for (double x : x_grid) {
        os << fmt_g17(x) << ',' << fmt_g17(act_value(kind, alpha, x)) << ','
           << fmt_g17(act_dx(kind, alpha, x)) << ',';
        if (is_adaptive(kind)) os << fmt_g17(act_dalpha(kind, alpha, x));
        os << '\n';
    }
}

}  // namespace adact
