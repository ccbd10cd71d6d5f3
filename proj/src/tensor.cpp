#include "tweetlab/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace tweetlab {

namespace {

void check_same_shape(const Tensor2D& a, const Tensor2D& b, const char* op) {
    if (!a.same_shape(b)) {
        throw std::invalid_argument(std::string(op) + ": shape mismatch (" +
                                    std::to_string(a.rows()) + "x" + std::to_string(a.cols()) +
                                    " vs " + std::to_string(b.rows()) + "x" +
                                    std::to_string(b.cols()) + ")");
    }
}

}  // namespace

Tensor2D matmul(const Tensor2D& a, const Tensor2D& b) {
    if (a.cols() != b.rows()) {
        throw std::invalid_argument("matmul: inner dimensions differ (" +
                                    std::to_string(a.cols()) + " vs " + std::to_string(b.rows()) +
                                    ")");
    }
    Tensor2D out(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const double aik = a(i, k);
            if (aik == 0.0) continue;
            const double* brow = b.row(k);
            double* orow = out.row(i);
            for (std::size_t j = 0; j < b.cols(); ++j) orow[j] += aik * brow[j];
        }
    }
    return out;
}

Tensor2D add(const Tensor2D& a, const Tensor2D& b) {
    check_same_shape(a, b, "add");
    Tensor2D out = a;
    for (std::size_t i = 0; i < out.size(); ++i) out.data()[i] += b.data()[i];
    return out;
}

Tensor2D subtract(const Tensor2D& a, const Tensor2D& b) {
    check_same_shape(a, b, "subtract");
    Tensor2D out = a;
    for (std::size_t i = 0; i < out.size(); ++i) out.data()[i] -= b.data()[i];
    return out;
}

Tensor2D hadamard(const Tensor2D& a, const Tensor2D& b) {
    check_same_shape(a, b, "hadamard");
    Tensor2D out = a;
    for (std::size_t i = 0; i < out.size(); ++i) out.data()[i] *= b.data()[i];
    return out;
}

Tensor2D scale(const Tensor2D& a, double s) {
    Tensor2D out = a;
    for (double& v : out.raw()) v *= s;
    return out;
}

Tensor2D transpose(const Tensor2D& a) {
    Tensor2D out(a.cols(), a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) out(j, i) = a(i, j);
    return out;
}

double relu(double z) noexcept { return z > 0.0 ? z : 0.0; }

double sigmoid(double z) noexcept { return 1.0 / (1.0 + std::exp(-z)); }

Tensor2D relu(const Tensor2D& a) {
    Tensor2D out = a;
    for (double& v : out.raw()) v = relu(v);
    return out;
}

Tensor2D sigmoid(const Tensor2D& a) {
    Tensor2D out = a;
    for (double& v : out.raw()) v = sigmoid(v);
    return out;
}

Tensor2D softmax(const Tensor2D& a) {
    Tensor2D out = a;
    for (std::size_t i = 0; i < a.rows(); ++i) {
        double* row = out.row(i);
        double mx = row[0];
        for (std::size_t j = 1; j < a.cols(); ++j) mx = std::max(mx, row[j]);
        double sum = 0.0;
        for (std::size_t j = 0; j < a.cols(); ++j) {
            row[j] = std::exp(row[j] - mx);
            sum += row[j];
        }
        for (std::size_t j = 0; j < a.cols(); ++j) row[j] /= sum;
    }
    return out;
}

double frobenius_norm(const Tensor2D& a) {
    double s = 0.0;
    for (double v : a.raw()) s += v * v;
    return std::sqrt(s);
}

bool all_finite(const Tensor2D& a) noexcept {
    for (double v : a.raw())
        if (!std::isfinite(v)) return false;
    return true;
}

void require_finite(const Tensor2D& a, const char* what) {
    if (!all_finite(a)) throw std::runtime_error(std::string(what) + ": non-finite value");
}

}  // namespace tweetlab
