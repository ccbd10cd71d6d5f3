#pragma once

#include <functional>

#include "tweetlab/rng.hpp"
#include "tweetlab/tensor.hpp"

namespace tweetlab {

struct AdamHyper {
    double learning_rate = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

struct AdamState {
    Tensor2D first_moment;
    Tensor2D second_moment;
    std::int64_t step_count = 0;
    AdamHyper hyper;

    AdamState() = default;
    AdamState(std::size_t rows, std::size_t cols, AdamHyper h = {})
        : first_moment(rows, cols), second_moment(rows, cols), hyper(h) {}
};

// Standard Adam update with bias correction, in place. Throws on shape
// mismatch between params, grads and the accumulators.
void adam_step(Tensor2D& params, const Tensor2D& grads, AdamState& state);

// Inverted dropout: entries are 0 with probability rate, else 1/(1-rate),
// so the mask has unit expectation and inference needs no rescaling.
Tensor2D dropout_mask(std::size_t rows, std::size_t cols, double rate, Rng& rng);

// Central differences (f(x+h e) - f(x-h e)) / 2h per coordinate. The test
// oracle for every hand-derived gradient in the project.
Tensor2D finite_diff_grad(const std::function<double(const Tensor2D&)>& f, const Tensor2D& x,
                          double h = 1e-5);

}  // namespace tweetlab
