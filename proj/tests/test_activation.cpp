#include "doctest.h"

#include <cmath>
#include <sstream>
#include <string>

#include "adact/activation.hpp"
#include "adact/error.hpp"

using namespace adact;

namespace {

// Independent straight-formula evaluation in extended precision. Central
// differences of the double-precision implementation drown in rounding
// noise where the alpha-sensitivity is exponentially small, so the oracle
// gets its own naive formulas and long-double arithmetic.
long double ref_value(ActivationKind kind, long double alpha, long double x) {
    switch (kind) {
        case ActivationKind::Sigmoid:
            return 1.0L / (1.0L + std::exp(-x));
        case ActivationKind::AdaptiveGumbel:
            return 1.0L - std::pow(1.0L + alpha * std::exp(x), -1.0L / alpha);
        case ActivationKind::AdaptiveReLUExp:
            return x > 0.0L ? x * (1.0L - std::exp(-alpha * x)) : 0.0L;
        case ActivationKind::AdaptiveReLULogistic:
            return x / (1.0L + std::exp(-alpha * x));
        default:
            return 0.0L;
    }
}

// Central-difference oracles, h = 1e-6.
double fd_dx(ActivationKind kind, double alpha, double x, double h = 1e-6) {
    return static_cast<double>(
        (ref_value(kind, alpha, x + static_cast<long double>(h)) -
         ref_value(kind, alpha, x - static_cast<long double>(h))) /
        (2.0L * static_cast<long double>(h)));
}

double fd_dalpha(ActivationKind kind, double alpha, double x, double h = 1e-6) {
    return static_cast<double>(
        (ref_value(kind, alpha + static_cast<long double>(h), x) -
         ref_value(kind, alpha - static_cast<long double>(h), x)) /
        (2.0L * static_cast<long double>(h)));
}

bool close_rel(double analytic, double numeric, double rel = 1e-6, double floor = 1e-9) {
    double tol = std::max(floor, rel * std::max(std::abs(analytic), std::abs(numeric)));
    return std::abs(analytic - numeric) <= tol;
}

const ActivationKind kAdaptiveKinds[] = {ActivationKind::AdaptiveGumbel,
                                         ActivationKind::AdaptiveReLUExp,
                                         ActivationKind::AdaptiveReLULogistic};

}  // namespace

TEST_CASE("adaptive Gumbel pinned values") {
    // alpha = 1 reduces to the sigmoid
    CHECK(act_value(ActivationKind::AdaptiveGumbel, 1.0, 0.0) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(act_dx(ActivationKind::AdaptiveGumbel, 1.0, 0.0) == doctest::Approx(0.25).epsilon(1e-12));
    // alpha = 2, x = 0: 1 - 3^(-1/2)
    CHECK(act_value(ActivationKind::AdaptiveGumbel, 2.0, 0.0) ==
          doctest::Approx(1.0 - 1.0 / std::sqrt(3.0)).epsilon(1e-14));
    // frozen from the central-difference oracle
    CHECK(close_rel(act_dalpha(ActivationKind::AdaptiveGumbel, 1.0, 0.0), -0.0965736, 1e-5, 1e-7));
    CHECK(close_rel(act_dalpha(ActivationKind::AdaptiveGumbel, 1.0, 0.0),
                    fd_dalpha(ActivationKind::AdaptiveGumbel, 1.0, 0.0)));
}

TEST_CASE("adaptive ReLU (exponential) pinned values") {
    CHECK(act_value(ActivationKind::AdaptiveReLUExp, 0.7, -3.0) == 0.0);
    CHECK(act_value(ActivationKind::AdaptiveReLUExp, std::log(2.0), 1.0) ==
          doctest::Approx(0.5).epsilon(1e-14));
    CHECK(close_rel(act_dx(ActivationKind::AdaptiveReLUExp, 1.0, 1.0),
                    fd_dx(ActivationKind::AdaptiveReLUExp, 1.0, 1.0), 1e-8, 1e-10));
    CHECK(act_dalpha(ActivationKind::AdaptiveReLUExp, 1.0, 1.0) ==
          doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
    CHECK(act_dalpha(ActivationKind::AdaptiveReLUExp, 3.0, -2.0) == 0.0);
}

TEST_CASE("ReLU subderivative convention") {
    CHECK(act_dx(ActivationKind::ReLU, 0.0, -1.0) == 0.0);
    CHECK(act_dx(ActivationKind::ReLU, 0.0, 2.0) == 1.0);
    CHECK(act_dx(ActivationKind::ReLU, 0.0, 0.0) == 0.0);
    CHECK(act_dx(ActivationKind::AdaptiveReLUExp, 1.0, 0.0) == 0.0);
    CHECK(act_value(ActivationKind::AdaptiveReLUExp, 1.0, 0.0) == 0.0);
}

TEST_CASE("SiLU special case at alpha = 1") {
    CHECK(act_value(ActivationKind::AdaptiveReLULogistic, 1.0, 0.0) == 0.0);
    auto grid = make_grid(-20.0, 20.0, 201);
    for (double x : grid) {
        double silu = x * logistic(x);
        CHECK(std::abs(act_value(ActivationKind::AdaptiveReLULogistic, 1.0, x) - silu) <= 1e-12);
    }
}

TEST_CASE("adaptive Gumbel at alpha = 1 equals sigmoid on the grid") {
    auto grid = make_grid(-20.0, 20.0, 201);
    for (double x : grid) {
        CHECK(std::abs(act_value(ActivationKind::AdaptiveGumbel, 1.0, x) - logistic(x)) <= 1e-12);
    }
}

TEST_CASE("derivatives match central finite differences over the grid") {
    auto grid = make_grid(-20.0, 20.0, 201);
    const double alphas[] = {0.1, 0.5, 1.0, 2.0, 5.0, 20.0};
    for (ActivationKind kind : kAdaptiveKinds) {
        for (double alpha : alphas) {
            for (double x : grid) {
                if (kind == ActivationKind::AdaptiveReLUExp && x == 0.0) continue;
                CAPTURE(std::string(to_string(kind)));
                CAPTURE(alpha);
                CAPTURE(x);
                CHECK(close_rel(act_dx(kind, alpha, x), fd_dx(kind, alpha, x)));
                CHECK(close_rel(act_dalpha(kind, alpha, x), fd_dalpha(kind, alpha, x)));
            }
        }
    }
    // fixed sigmoid dx as well
    for (double x : grid) {
        CHECK(close_rel(act_dx(ActivationKind::Sigmoid, 1.0, x),
                        fd_dx(ActivationKind::Sigmoid, 1.0, x)));
    }
}

TEST_CASE("adaptive Gumbel is strictly increasing and bounded in (0,1)") {
    auto grid = make_grid(-20.0, 20.0, 201);
    for (double alpha : {0.1, 1.0, 5.0}) {
        double prev = -1.0;
        for (double x : grid) {
            double v = act_value(ActivationKind::AdaptiveGumbel, alpha, x);
            CHECK(v > 0.0);
            CHECK(v <= 1.0);
            // strictly increasing until the double-precision value
            // saturates at 1 (the true function stays below 1)
            if (prev < 1.0) {
                CHECK(v > prev);
            } else {
                CHECK(v == 1.0);
            }
            prev = v;
        }
    }
}

TEST_CASE("numeric stability at |x| = 500") {
    for (ActivationKind kind : kAdaptiveKinds) {
        for (double alpha : {0.1, 1.0, 20.0}) {
            for (double x : {-500.0, 500.0}) {
                double v = act_value(kind, alpha, x);
                CHECK(std::isfinite(v));
                CHECK(std::isfinite(act_dx(kind, alpha, x)));
                CHECK(std::isfinite(act_dalpha(kind, alpha, x)));
                if (kind == ActivationKind::AdaptiveGumbel) {
                    CHECK(v > 0.0);
                    CHECK(v <= 1.0);
                }
            }
        }
    }
}

TEST_CASE("limit behavior") {
    // Gumbel CDF as alpha -> 0
    double v = act_value(ActivationKind::AdaptiveGumbel, 1e-8, 0.0);
    CHECK(std::abs(v - (1.0 - std::exp(-1.0))) < 1e-6);
    auto grid_g = make_grid(-5.0, 3.0, 401);
    auto rep = act_limits_check(ActivationKind::AdaptiveGumbel, 1e-8, grid_g);
    CHECK(rep.max_abs_dev < 1e-6);

    // plain ReLU as alpha -> inf
    CHECK(std::abs(act_value(ActivationKind::AdaptiveReLUExp, 1e4, 1.0) - 1.0) < 1e-4);
    CHECK(act_value(ActivationKind::AdaptiveReLUExp, 1e4, -1.0) == 0.0);
    auto grid_r = make_grid(-5.0, 5.0, 401);
    auto rep2 = act_limits_check(ActivationKind::AdaptiveReLUExp, 1e4, grid_r);
    CHECK(rep2.max_abs_dev < 1e-3);
}

TEST_CASE("identifiability witness") {
    auto grid = make_grid(-10.0, 10.0, 1001);
    CHECK(identifiability_witness(1.0, 1.0, grid) == 0.0);
    CHECK(identifiability_witness(1.0, 2.0, grid) > 0.01);
    CHECK(identifiability_witness(1.0, 1.001, grid) > 0.0);

    const double alphas[] = {0.1, 0.5, 1.0, 1.001, 2.0, 5.0};
    for (double a1 : alphas) {
        for (double a2 : alphas) {
            if (std::abs(a1 - a2) >= 1e-3) {
                CAPTURE(a1);
                CAPTURE(a2);
                CHECK(identifiability_witness(a1, a2, grid) > 0.0);
            }
        }
    }
    CHECK_THROWS_AS(identifiability_witness(1.0, 2.0, std::span<const double>{}), DomainError);
}

TEST_CASE("domain and unsupported-operation errors") {
    CHECK_THROWS_AS(act_value(ActivationKind::AdaptiveGumbel, 0.0, 1.0), DomainError);
    CHECK_THROWS_AS(act_value(ActivationKind::AdaptiveReLUExp, -1.0, 1.0), DomainError);
    CHECK_THROWS_AS(act_dalpha(ActivationKind::Sigmoid, 1.0, 0.0), UnsupportedOperationError);
    CHECK_THROWS_AS(act_dalpha(ActivationKind::ReLU, 1.0, 0.0), UnsupportedOperationError);
    // fixed kinds ignore alpha entirely
    CHECK(act_value(ActivationKind::Sigmoid, -5.0, 0.0) == 0.5);
}

TEST_CASE("curve_dump emits x,value,dx,dalpha rows") {
    auto grid = make_grid(-1.0, 1.0, 5);
    std::ostringstream os;
    curve_dump(os, ActivationKind::AdaptiveGumbel, 2.0, grid);
    std::istringstream is(os.str());
    std::string line;
    std::getline(is, line);
    CHECK(line == "x,value,dx,dalpha");
    std::size_t rows = 0;
    while (std::getline(is, line)) {
        CHECK(std::count(line.begin(), line.end(), ',') == 3);
        ++rows;
    }
    CHECK(rows == 5);

    std::ostringstream os2;
    curve_dump(os2, ActivationKind::ReLU, 1.0, grid);
    CHECK(os2.str().find(",\n") != std::string::npos);  // empty dalpha column
}
