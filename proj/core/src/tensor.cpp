#include "adact/tensor.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

#include "adact/error.hpp"

namespace adact {

namespace {

std::size_t shape_product(std::span<const std::size_t> shape) {
    std::size_t n = 1;
    for (std::size_t d : shape) n *= d;
    return n;
}

}  // namespace

Tensor::Tensor(std::vector<std::size_t> shape)
    : shape_(std::move(shape)), data_(shape_product(shape_), 0.0) {}

Tensor::Tensor(std::vector<std::size_t> shape, std::vector<double> data)
    : shape_(std::move(shape)), data_(std::move(data)) {
    if (shape_product(shape_) != data_.size()) {
        throw ShapeError("tensor data length " + std::to_string(data_.size()) +
                         " does not match shape " + shape_to_string(shape_));
    }
}

Tensor Tensor::identity(std::size_t n) {
    Tensor t({n, n});
    for (std::size_t i = 0; i < n; ++i) t.at2(i, i) = 1.0;
    return t;
}

Tensor Tensor::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
    std::vector<double> data;
    std::size_t cols = rows.begin()->size();
    for (const auto& row : rows) {
        if (row.size() != cols) throw ShapeError("ragged rows in from_rows");
        data.insert(data.end(), row.begin(), row.end());
    }
    return Tensor({rows.size(), cols}, std::move(data));
}

Tensor Tensor::vector(std::vector<double> values) {
    std::size_t n = values.size();
    return Tensor({n}, std::move(values));
}

Tensor Tensor::reshaped(std::vector<std::size_t> shape) const {
    if (shape_product(shape) != data_.size()) {
        throw ShapeError("cannot reshape " + shape_to_string(shape_) + " to " +
                         shape_to_string(shape));
    }
    return Tensor(std::move(shape), data_);
}

bool Tensor::all_finite() const {
    for (double v : data_) {
        if (!std::isfinite(v)) return false;
    }
    return true;
}

std::string Tensor::shape_string() const { return shape_to_string(shape_); }

std::string shape_to_string(std::span<const std::size_t> shape) {
    std::ostringstream os;
    os << '[';
    for (std::size_t i = 0; i < shape.size(); ++i) {
        if (i) os << 'x';
        os << shape[i];
    }
    os << ']';
    return os.str();
}

Tensor matmul(const Tensor& a, const Tensor& b) {
    if (a.rank() != 2 || b.rank() != 2 || a.dim(1) != b.dim(0)) {
        throw ShapeError("matmul shape mismatch: " + a.shape_string() + " x " +
                         b.shape_string());
    }
    const std::size_t m = a.dim(0), k = a.dim(1), n = b.dim(1);
    Tensor out({m, n});
    // i-k-j loop order: row-major accumulation, fixed summation order.
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t p = 0; p < k; ++p) {
            const double av = a.at2(i, p);
            if (av == 0.0) continue;
            for (std::size_t j = 0; j < n; ++j) {
                out.at2(i, j) += av * b.at2(p, j);
            }
        }
    }
    return out;
}

Tensor transpose(const Tensor& m) {
    if (m.rank() != 2) throw ShapeError("transpose expects rank 2, got " + m.shape_string());
    Tensor out({m.dim(1), m.dim(0)});
    for (std::size_t i = 0; i < m.dim(0); ++i)
        for (std::size_t j = 0; j < m.dim(1); ++j)
            out.at2(j, i) = m.at2(i, j);
    return out;
}

namespace {

void require_same_shape(const Tensor& a, const Tensor& b, const char* op) {
    if (!a.same_shape(b)) {
        throw ShapeError(std::string(op) + " shape mismatch: " + a.shape_string() +
                         " vs " + b.shape_string());
    }
}

}  // namespace

Tensor add(const Tensor& a, const Tensor& b) {
    require_same_shape(a, b, "add");
    Tensor out = a;
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += b[i];
    return out;
}

Tensor sub(const Tensor& a, const Tensor& b) {
    require_same_shape(a, b, "sub");
    Tensor out = a;
    for (std::size_t i = 0; i < out.size(); ++i) out[i] -= b[i];
    return out;
}

Tensor scale(const Tensor& t, double s) {
    Tensor out = t;
    for (std::size_t i = 0; i < out.size(); ++i) out[i] *= s;
    return out;
}

Tensor elementwise_map(const Tensor& t, const std::function<double(double)>& f) {
    Tensor out = t;
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = f(out[i]);
    return out;
}

Tensor add_row_bias(const Tensor& m, const Tensor& bias) {
    if (m.rank() != 2 || bias.rank() != 1 || bias.dim(0) != m.dim(1)) {
        throw ShapeError("add_row_bias shape mismatch: " + m.shape_string() + " + " +
                         bias.shape_string());
    }
    Tensor out = m;
    for (std::size_t i = 0; i < m.dim(0); ++i)
        for (std::size_t j = 0; j < m.dim(1); ++j)
            out.at2(i, j) += bias[j];
    return out;
}

Tensor reduce_sum(const Tensor& t, std::size_t axis) {
    if (t.rank() != 2 || axis > 1) {
        throw ShapeError("reduce_sum expects rank 2 and axis in {0,1}, got " +
                         t.shape_string() + " axis " + std::to_string(axis));
    }
    if (axis == 0) {
        Tensor out({t.dim(1)});
        for (std::size_t i = 0; i < t.dim(0); ++i)
            for (std::size_t j = 0; j < t.dim(1); ++j)
                out[j] += t.at2(i, j);
        return out;
    }
    Tensor out({t.dim(0)});
    for (std::size_t i = 0; i < t.dim(0); ++i)
        for (std::size_t j = 0; j < t.dim(1); ++j)
            out[i] += t.at2(i, j);
    return out;
}

double sum(const Tensor& t) {
    double s = 0.0;
    for (double v : t.data()) s += v;
    return s;
}

std::vector<std::size_t> argmax_rows(const Tensor& m) {
    if (m.rank() != 2) throw ShapeError("argmax_rows expects rank 2, got " + m.shape_string());
    std::vector<std::size_t> out(m.dim(0), 0);
    for (std::size_t i = 0; i < m.dim(0); ++i) {
        double best = m.at2(i, 0);
        for (std::size_t j = 1; j < m.dim(1); ++j) {
            if (m.at2(i, j) > best) {  // strict: ties keep the lowest index
                best = m.at2(i, j);
                out[i] = j;
            }
        }
    }
    return out;
}

std::size_t argmax(const Tensor& v) {
    if (v.rank() != 1 || v.size() == 0) {
        throw ShapeError("argmax expects a nonempty rank-1 tensor, got " + v.shape_string());
    }
    std::size_t best = 0;
    for (std::size_t i = 1; i < v.size(); ++i) {
        if (v[i] > v[best]) best = i;
    }
    return best;
}

}  // namespace adact
