#include "doctest.h"

#include "adact/error.hpp"
#include "adact/rng.hpp"
#include "adact/tensor.hpp"

using namespace adact;

namespace {

// Independent triple-loop product used as the matmul oracle.
Tensor naive_matmul(const Tensor& a, const Tensor& b) {
    Tensor out({a.dim(0), b.dim(1)});
    for (std::size_t i = 0; i < a.dim(0); ++i) {
        for (std::size_t j = 0; j < b.dim(1); ++j) {
            double acc = 0.0;
            for (std::size_t p = 0; p < a.dim(1); ++p) acc += a.at2(i, p) * b.at2(p, j);
            out.at2(i, j) = acc;
        }
    }
    return out;
}

Tensor random_tensor(std::vector<std::size_t> shape, Rng& rng) {
    Tensor t(std::move(shape));
    for (double& v : t.data()) v = rng.uniform(-1.0, 1.0);
    return t;
}

}  // namespace

TEST_CASE("matmul identity and hand cases") {
    Tensor m = Tensor::from_rows({{1, 2}, {3, 4}});
    Tensor r = matmul(Tensor::identity(2), m);
    for (std::size_t i = 0; i < 4; ++i) CHECK(r[i] == m[i]);

    Tensor a = Tensor::from_rows({{1, 2}});
    Tensor b = Tensor::from_rows({{3}, {4}});
    Tensor c = matmul(a, b);
    CHECK(c.shape() == std::vector<std::size_t>{1, 1});
    CHECK(c[0] == 11.0);
}

TEST_CASE("matmul matches the triple-loop oracle") {
    Rng rng(42);
    Tensor a = random_tensor({3, 4}, rng);
    Tensor b = random_tensor({4, 2}, rng);
    Tensor fast = matmul(a, b);
    Tensor slow = naive_matmul(a, b);
    for (std::size_t i = 0; i < fast.size(); ++i) {
        CHECK(fast[i] == doctest::Approx(slow[i]).epsilon(1e-14));
    }
}

TEST_CASE("matmul dimension mismatch names both shapes") {
    Tensor a({2, 3});
    Tensor b({4, 2});
    CHECK_THROWS_WITH_AS(matmul(a, b), doctest::Contains("[2x3]"), ShapeError);
    try {
        matmul(a, b);
    } catch (const ShapeError& e) {
        CHECK(std::string(e.what()).find("[4x2]") != std::string::npos);
    }
}

TEST_CASE("matmul(A, I) == A bitwise") {
    Rng rng(7);
    Tensor a = random_tensor({5, 5}, rng);
    Tensor r = matmul(a, Tensor::identity(5));
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(r[i] == a[i]);
}

TEST_CASE("transpose is a bitwise involution") {
    Rng rng(3);
    Tensor a = random_tensor({4, 7}, rng);
    Tensor back = transpose(transpose(a));
    CHECK(back.shape() == a.shape());
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(back[i] == a[i]);
}

TEST_CASE("matmul associativity within 1e-12 relative") {
    Rng rng(11);
    Tensor a = random_tensor({5, 5}, rng);
    Tensor b = random_tensor({5, 5}, rng);
    Tensor c = random_tensor({5, 5}, rng);
    Tensor left = matmul(matmul(a, b), c);
    Tensor right = matmul(a, matmul(b, c));
    for (std::size_t i = 0; i < left.size(); ++i) {
        double denom = std::max(std::abs(left[i]), 1e-30);
        CHECK(std::abs(left[i] - right[i]) / denom < 1e-12);
    }
}

TEST_CASE("scale, argmax tie rule, reduce_sum") {
    Tensor v = Tensor::vector({1, 2, 3});
    Tensor z = scale(v, 0.0);
    for (double x : z.data()) CHECK(x == 0.0);

    CHECK(argmax(Tensor::vector({0.2, 0.5, 0.5})) == 1);

    Tensor m = Tensor::from_rows({{1, 2}, {3, 4}});
    Tensor cols = reduce_sum(m, 0);
    CHECK(cols[0] == 4.0);
    CHECK(cols[1] == 6.0);
    Tensor rows = reduce_sum(m, 1);
    CHECK(rows[0] == 3.0);
    CHECK(rows[1] == 7.0);
}

TEST_CASE("binary op shape mismatch throws") {
    CHECK_THROWS_AS(add(Tensor({2, 2}), Tensor({2, 3})), ShapeError);
    CHECK_THROWS_AS(sub(Tensor({4}), Tensor({5})), ShapeError);
}

TEST_CASE("elementwise_map preserves shape") {
    Tensor m = Tensor::from_rows({{-1, 2}, {3, -4}});
    Tensor r = elementwise_map(m, [](double x) { return x * x; });
    CHECK(r.shape() == m.shape());
    CHECK(r.at2(1, 1) == 16.0);
}

TEST_CASE("add_row_bias broadcasts a row vector only") {
    Tensor m = Tensor::from_rows({{1, 2}, {3, 4}});
    Tensor b = Tensor::vector({10, 20});
    Tensor r = add_row_bias(m, b);
    CHECK(r.at2(0, 0) == 11.0);
    CHECK(r.at2(1, 1) == 24.0);
    CHECK_THROWS_AS(add_row_bias(m, Tensor::vector({1, 2, 3})), ShapeError);
}
