#include <doctest.h>

#include <stdexcept>

#include <cmath>

#include "tweetlab/nmf.hpp"
#include "tweetlab/rng.hpp"

using namespace tweetlab;

TEST_CASE("nmf: rank-1 matrix recovered to small relative error") {
    Rng rng(11);
    const std::size_t n = 20, m = 30;
    std::vector<double> u(n), v(m);
    for (double& x : u) x = 0.5 + rng.uniform();
    for (double& x : v) x = 0.5 + rng.uniform();
    Tensor2D target(n, m);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < m; ++j) target(i, j) = u[i] * v[j];

    auto f = nmf(target, 1, 200, 7);
    CHECK(f.error_trace.back() / frobenius_norm(target) <= 1e-3);
}

TEST_CASE("nmf: error trace is non-increasing") {
    Rng rng(23);
    Tensor2D v(20, 30);
    for (double& x : v.raw()) x = rng.uniform();
    auto f = nmf(v, 4, 150, 9);
    REQUIRE(f.error_trace.size() == 150);
    for (std::size_t i = 0; i + 1 < f.error_trace.size(); ++i)
        CHECK(f.error_trace[i + 1] <= f.error_trace[i] * (1.0 + 1e-10));
    CHECK(f.error_trace.back() <= f.error_trace.front());
}

TEST_CASE("nmf: factors stay non-negative") {
    Rng rng(2);
    Tensor2D v(15, 12);
    for (double& x : v.raw()) x = rng.uniform() < 0.3 ? 0.0 : rng.uniform();
    auto f = nmf(v, 3, 80, 4);
    for (double x : f.w.raw()) CHECK(x >= 0.0);
    for (double x : f.h.raw()) CHECK(x >= 0.0);
    CHECK(f.w.rows() == 15);
    CHECK(f.w.cols() == 3);
    CHECK(f.h.rows() == 3);
    CHECK(f.h.cols() == 12);
}

TEST_CASE("nmf: input validation") {
    Tensor2D neg(2, 2);
    neg(1, 1) = -0.5;
    CHECK_THROWS_AS(nmf(neg, 1, 10, 1), std::invalid_argument);

    Tensor2D ok(3, 4, 1.0);
    CHECK_THROWS_AS(nmf(ok, 4, 10, 1), std::invalid_argument);  // rank > min(dims)
    CHECK_THROWS_AS(nmf(ok, 0, 10, 1), std::invalid_argument);
    CHECK_THROWS_AS(nmf(ok, 1, 0, 1), std::invalid_argument);
}

TEST_CASE("nmf: deterministic in the seed") {
    Rng rng(6);
    Tensor2D v(10, 8);
    for (double& x : v.raw()) x = rng.uniform();
    auto f1 = nmf(v, 2, 50, 33);
    auto f2 = nmf(v, 2, 50, 33);
    CHECK(f1.w.raw() == f2.w.raw());
    CHECK(f1.h.raw() == f2.h.raw());
    auto f3 = nmf(v, 2, 50, 34);
    CHECK(f1.w.raw() != f3.w.raw());
}
