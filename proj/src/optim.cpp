#include "tweetlab/optim.hpp"

#include <cmath>
#include <stdexcept>

namespace tweetlab {

void adam_step(Tensor2D& params, const Tensor2D& grads, AdamState& state) {
    if (!params.same_shape(grads) || !params.same_shape(state.first_moment) ||
        !params.same_shape(state.second_moment))
        throw std::invalid_argument("adam_step: shape mismatch");
    const auto& h = state.hyper;
    if (h.beta1 < 0.0 || h.beta1 >= 1.0 || h.beta2 < 0.0 || h.beta2 >= 1.0)
        throw std::invalid_argument("adam_step: betas must lie in [0,1)");

    state.step_count += 1;
    const double bc1 = 1.0 - std::pow(h.beta1, static_cast<double>(state.step_count));
    const double bc2 = 1.0 - std::pow(h.beta2, static_cast<double>(state.step_count));
    double* m = state.first_moment.data();
    double* v = state.second_moment.data();
    double* p = params.data();
    const double* g = grads.data();
    for (std::size_t i = 0; i < params.size(); ++i) {
        m[i] = h.beta1 * m[i] + (1.0 - h.beta1) * g[i];
        v[i] = h.beta2 * v[i] + (1.0 - h.beta2) * g[i] * g[i];
        const double m_hat = m[i] / bc1;
        const double v_hat = v[i] / bc2;
        p[i] -= h.learning_rate * m_hat / (std::sqrt(v_hat) + h.epsilon);
    }
}

Tensor2D dropout_mask(std::size_t rows, std::size_t cols, double rate, Rng& rng) {
    if (rate < 0.0 || rate >= 1.0)
        throw std::invalid_argument("dropout_mask: rate must lie in [0,1)");
    Tensor2D mask(rows, cols, 1.0);
    if (rate == 0.0) return mask;
    const double keep_scale = 1.0 / (1.0 - rate);
    for (double& m : mask.raw()) m = rng.uniform() < rate ? 0.0 : keep_scale;
    return mask;
}

Tensor2D finite_diff_grad(const std::function<double(const Tensor2D&)>& f, const Tensor2D& x,
                          double h) {
    Tensor2D grad(x.rows(), x.cols());
    Tensor2D probe = x;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double orig = probe.data()[i];
        probe.data()[i] = orig + h;
        const double fp = f(probe);
        probe.data()[i] = orig - h;
        const double fm = f(probe);
        probe.data()[i] = orig;
        if (!std::isfinite(fp) || !std::isfinite(fm))
            throw std::runtime_error("finite_diff_grad: non-finite function value");
        grad.data()[i] = (fp - fm) / (2.0 * h);
    }
    return grad;
}

}  // namespace tweetlab
