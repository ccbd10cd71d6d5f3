#include "tweetlab/nmf.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "tweetlab/rng.hpp"

namespace tweetlab {

namespace {

constexpr double kDenomGuard = 1e-12;

double reconstruction_error(const Tensor2D& v, const Tensor2D& w, const Tensor2D& h) {
    double err = 0.0;
    for (std::size_t i = 0; i < v.rows(); ++i) {
        for (std::size_t j = 0; j < v.cols(); ++j) {
            double pred = 0.0;
            for (std::size_t r = 0; r < w.cols(); ++r) pred += w(i, r) * h(r, j);
            const double d = v(i, j) - pred;
            err += d * d;
        }
    }
    return std::sqrt(err);
}

}  // namespace

NmfFactors nmf(const Tensor2D& matrix, std::int32_t rank, std::int32_t iterations,
               std::uint64_t seed) {
    if (rank < 1) throw std::invalid_argument("nmf: rank must be >= 1");
    if (static_cast<std::size_t>(rank) > std::min(matrix.rows(), matrix.cols()))
        throw std::invalid_argument("nmf: rank exceeds min(rows, cols)");
    if (iterations < 1) throw std::invalid_argument("nmf: iterations must be >= 1");
    double mean = 0.0;
    for (double v : matrix.raw()) {
        if (v < 0.0) throw std::invalid_argument("nmf: negative input entry");
        mean += v;
    }
    mean /= static_cast<double>(std::max<std::size_t>(1, matrix.size()));

    const std::size_t n = matrix.rows(), m = matrix.cols(), k = static_cast<std::size_t>(rank);
    // random init scaled so W*H starts near the data magnitude
    const double scale = std::sqrt(std::max(mean, kDenomGuard) / static_cast<double>(k));
    Rng rng(seed);
    NmfFactors f;
    f.rank = rank;
    f.w = Tensor2D(n, k);
    f.h = Tensor2D(k, m);
    for (double& v : f.w.raw()) v = scale * rng.uniform();
    for (double& v : f.h.raw()) v = scale * rng.uniform();

    for (std::int32_t it = 0; it < iterations; ++it) {
        // H <- H .* (W'V) ./ (W'WH)
        Tensor2D wt = transpose(f.w);
        Tensor2D wtv = matmul(wt, matrix);
        Tensor2D wtwh = matmul(matmul(wt, f.w), f.h);
        for (std::size_t i = 0; i < f.h.size(); ++i)
            f.h.data()[i] *= wtv.data()[i] / (wtwh.data()[i] + kDenomGuard);

        // W <- W .* (VH') ./ (WHH')
        Tensor2D ht = transpose(f.h);
        Tensor2D vht = matmul(matrix, ht);
        Tensor2D whht = matmul(f.w, matmul(f.h, ht));
        for (std::size_t i = 0; i < f.w.size(); ++i)
            f.w.data()[i] *= vht.data()[i] / (whht.data()[i] + kDenomGuard);

        f.error_trace.push_back(reconstruction_error(matrix, f.w, f.h));
    }
    require_finite(f.w, "nmf W");
    require_finite(f.h, "nmf H");
    return f;
}

}  // namespace tweetlab
