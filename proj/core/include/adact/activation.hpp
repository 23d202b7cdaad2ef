#pragma once

#include <cmath>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace adact {

/// Activation families. The adaptive kinds carry a per-unit shape
/// parameter alpha > 0; the fixed kinds ignore it.
enum class ActivationKind {
    Identity,             // pass-through, used for output layers
    Sigmoid,              // logistic CDF
    ReLU,                 // max(0, x)
    AdaptiveGumbel,       // 1 - (1 + alpha e^x)^(-1/alpha), skewness family
    AdaptiveReLUExp,      // x (1 - e^(-alpha x)) for x > 0, smoothness family
    AdaptiveReLULogistic  // x * logistic(alpha x); alpha = 1 is SiLU
};

bool is_adaptive(ActivationKind kind);
const char* to_string(ActivationKind kind);
ActivationKind activation_from_string(const std::string& name);

/// Per-unit shape parameter, stored unconstrained as a = ln(alpha). Every
/// finite a maps to a strictly positive alpha, so the positivity constraint
/// cannot be violated by a gradient step.
struct ShapeParam {
    double a = 0.0;  // alpha = 1 at a = 0, the sigmoid/SiLU anchor
    double alpha() const { return std::exp(a); }
};

/// sigma_alpha(x). Stable for |x| up to at least 500 for every kind.
double act_value(ActivationKind kind, double alpha, double x);

/// d sigma_alpha / dx. The ReLU family takes the subderivative 0 at x = 0.
double act_dx(ActivationKind kind, double alpha, double x);

/// d sigma_alpha / d alpha. Adaptive kinds only.
double act_dalpha(ActivationKind kind, double alpha, double x);

/// Numerically stable logistic CDF.
double logistic(double x);

struct LimitCheckReport {
    double max_abs_dev = 0.0;
    double worst_x = 0.0;
};

/// Checks an adaptive kind against its family limit on a grid:
/// AdaptiveGumbel vs the Gumbel CDF 1 - exp(-e^x) (the alpha -> 0 limit),
/// AdaptiveReLUExp and AdaptiveReLULogistic vs max(0, x) (alpha -> inf).
LimitCheckReport act_limits_check(ActivationKind kind, double alpha,
                                  std::span<const double> x_grid);

/// sup over the grid of |sigma_a1 - sigma_a2| for the adaptive Gumbel
/// family. Distinct alphas give a strictly positive witness.
double identifiability_witness(double alpha1, double alpha2,
                               std::span<const double> x_grid);

/// Evenly spaced grid of n points on [lo, hi].
std::vector<double> make_grid(double lo, double hi, std::size_t n);

/// Emits CSV rows "x,value,dx,dalpha" over the grid. The dalpha column is
/// empty for fixed kinds.
void curve_dump(std::ostream& os, ActivationKind kind, double alpha,
                std::span<const double> x_grid);

}  // namespace adact
