#pragma once

#include <cstdint>
#include <vector>

#include "tweetlab/tensor.hpp"

namespace tweetlab {

struct NmfFactors {
    Tensor2D w;  // docs x rank
    Tensor2D h;  // rank x terms
    std::int32_t rank = 0;
    std::vector<double> error_trace;  // Frobenius reconstruction error per iteration
};

// Multiplicative-update factorization minimizing ||V - WH||_F. Entries stay
// non-negative and the error trace is non-increasing. Throws on negative
// input entries or rank > min(dims).
NmfFactors nmf(const Tensor2D& matrix, std::int32_t rank, std::int32_t iterations,
               std::uint64_t seed);

}  // namespace tweetlab
