#pragma once

#include <cstddef>
#include <vector>

namespace tweetlab {

// Dense row-major matrix of doubles. Everything in this project is small
// enough that a plain vector-backed type beats pulling in a linalg library.
class Tensor2D {
public:
    Tensor2D() = default;
    Tensor2D(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    std::size_t size() const noexcept { return data_.size(); }

    double& operator()(std::size_t r, std::size_t c) noexcept { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const noexcept { return data_[r * cols_ + c]; }

    double* data() noexcept { return data_.data(); }
    const double* data() const noexcept { return data_.data(); }
    double* row(std::size_t r) noexcept { return data_.data() + r * cols_; }
    const double* row(std::size_t r) const noexcept { return data_.data() + r * cols_; }

    std::vector<double>& raw() noexcept { return data_; }
    const std::vector<double>& raw() const noexcept { return data_; }

    void fill(double v) { std::fill(data_.begin(), data_.end(), v); }

    bool same_shape(const Tensor2D& o) const noexcept {
        return rows_ == o.rows_ && cols_ == o.cols_;
    }

    bool operator==(const Tensor2D& o) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

// standard ops; every function throws std::invalid_argument on shape mismatch
Tensor2D matmul(const Tensor2D& a, const Tensor2D& b);
Tensor2D add(const Tensor2D& a, const Tensor2D& b);
Tensor2D subtract(const Tensor2D& a, const Tensor2D& b);
Tensor2D hadamard(const Tensor2D& a, const Tensor2D& b);
Tensor2D scale(const Tensor2D& a, double s);
Tensor2D transpose(const Tensor2D& a);
Tensor2D relu(const Tensor2D& a);
Tensor2D sigmoid(const Tensor2D& a);
// softmax per row; rows sum to 1
Tensor2D softmax(const Tensor2D& a);

double relu(double z) noexcept;
double sigmoid(double z) noexcept;

double frobenius_norm(const Tensor2D& a);
bool all_finite(const Tensor2D& a) noexcept;
// throws std::runtime_error when a NaN/Inf slipped into `a`
void require_finite(const Tensor2D& a, const char* what);

}  // namespace tweetlab
