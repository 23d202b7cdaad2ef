#pragma once

#include <cstddef>
#include <functional>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace adact {

/// Dense row-major n-dimensional array of 64-bit floats. The sole numeric
/// container for features, parameters, and gradients.
///
/// Tensors are value types; treat them as immutable once built and shared.
/// All reductions and products use a fixed row-major accumulation order so
/// that seeded runs are bitwise reproducible.
class Tensor {
public:
    Tensor() = default;

    /// Zero-filled tensor of the given shape.
    explicit Tensor(std::vector<std::size_t> shape);

    Tensor(std::vector<std::size_t> shape, std::vector<double> data);

    static Tensor zeros(std::vector<std::size_t> shape) { return Tensor(std::move(shape)); }
    static Tensor identity(std::size_t n);

    /// 2-D tensor from nested lists, row by row.
    static Tensor from_rows(std::initializer_list<std::initializer_list<double>> rows);
    static Tensor vector(std::vector<double> values);

    const std::vector<std::size_t>& shape() const { return shape_; }
    std::size_t rank() const { return shape_.size(); }
    std::size_t size() const { return data_.size(); }
    std::size_t dim(std::size_t axis) const { return shape_[axis]; }

    std::span<const double> data() const { return data_; }
    std::span<double> data() { return data_; }

    double operator[](std::size_t i) const { return data_[i]; }
    double& operator[](std::size_t i) { return data_[i]; }

    double at2(std::size_t i, std::size_t j) const { return data_[i * shape_[1] + j]; }
    double& at2(std::size_t i, std::size_t j) { return data_[i * shape_[1] + j]; }

    // 4-D accessor for [batch, channel, row, col] layouts.
    double at4(std::size_t b, std::size_t c, std::size_t y, std::size_t x) const {
        return data_[((b * shape_[1] + c) * shape_[2] + y) * shape_[3] + x];
    }
    double& at4(std::size_t b, std::size_t c, std::size_t y, std::size_t x) {
        return data_[((b * shape_[1] + c) * shape_[2] + y) * shape_[3] + x];
    }

    bool same_shape(const Tensor& other) const { return shape_ == other.shape_; }

    /// Reinterprets the buffer under a new shape of equal element count.
    Tensor reshaped(std::vector<std::size_t> shape) const;

    /// True if every stored value is finite.
    bool all_finite() const;

    std::string shape_string() const;

private:
    std::vector<std::size_t> shape_;
    std::vector<double> data_;
};

std::string shape_to_string(std::span<const std::size_t> shape);

/// Matrix product of a[m x k] and b[k x n], row-major accumulation.
Tensor matmul(const Tensor& a, const Tensor& b);

Tensor transpose(const Tensor& m);

Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor scale(const Tensor& t, double s);
Tensor elementwise_map(const Tensor& t, const std::function<double(double)>& f);

/// Adds a [n]-vector bias to every row of an [m x n] matrix. The only
/// broadcast this library performs.
Tensor add_row_bias(const Tensor& m, const Tensor& bias);

/// Sums away one axis of a 2-D tensor.
Tensor reduce_sum(const Tensor& t, std::size_t axis);

double sum(const Tensor& t);

/// Per-row argmax of a 2-D tensor; ties break toward the lowest index.
std::vector<std::size_t> argmax_rows(const Tensor& m);

/// Argmax of a 1-D tensor; ties break toward the lowest index.
std::size_t argmax(const Tensor& v);

}  // namespace adact
