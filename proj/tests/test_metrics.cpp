#include <catch2/catch_amalgamated.hpp>

#include "cms/metrics.hpp"
#include "cms/rng.hpp"

using namespace cms;

TEST_CASE("first-disagreement metric") {
    CHECK(metric_d({1, 1, 1}, {1, 1, 1}) == 0.0);
    CHECK(metric_d({1, 2}, {2, 2}) == 1.0);          // m = 1
    CHECK(metric_d({1, 1, 2}, {1, 1, 3}) == 0.25);   // m = 3
    CHECK(metric_d({1, 1}, {1, 1, 5}) == 0.0);       // prefix semantics
}

TEST_CASE("weighted coordinate metric: exact partial sums") {
    const auto r = metric_d_rho({1, 1, 1, 1, 1, 1, 1, 1}, {2, 1, 1, 1, 1, 1, 1, 1});
    CHECK(r.partial == Rat(1, 4));   // (1/2) |1 - 1/2|
    CHECK(r.tail_bound == pow2_neg(8));

    // rho-bar(n, inf) = 1/n, halved by the first weight
    for (Symbol n : {1, 2, 5, 100}) {
        const auto one = metric_d_rho({n}, {kInf});
        CHECK(one.partial == Rat(1, BigInt(2) * BigInt(n)));
    }

    const auto zero = metric_d_rho({3, 4, kInf}, {3, 4, kInf});
    CHECK(zero.partial == 0);
    CHECK(zero.tail_bound == pow2_neg(3));

    CHECK_THROWS_AS(metric_d_rho({1, 2}, {1}), LengthMismatch);
    CHECK_THROWS_AS(metric_d_rho({0}, {1}), SymbolOutsideMetricDomain);
}

TEST_CASE("d_rho is dominated by d on random pairs") {
    Rng rng(29);
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t len = 1 + rng.next_below(10);
        Word x(len), y(len);
        for (std::size_t i = 0; i < len; ++i) {
            x[i] = 1 + rng.next_below(30);
            y[i] = 1 + rng.next_below(30);
        }
        const double d = metric_d(x, y);
        const auto rho = metric_d_rho(x, y);
        CHECK(to_double(rho.partial) <= d + 1e-15);
    }
}

TEST_CASE("depth-1 cylinders are d_rho-balls of the stated radius") {
    // any word starting elsewhere stays at least 1/(2a(a+1)) away (up to the
    // truncation tail), which is what makes these cylinders clopen
    Rng rng(31);
    for (int trial = 0; trial < 1000; ++trial) {
        const Symbol a = 1 + rng.next_below(12);
        const std::size_t len = 1 + rng.next_below(8);
        Word x(len), y(len);
        x[0] = a;
        do { y[0] = 1 + rng.next_below(14); } while (y[0] == a);
        for (std::size_t i = 1; i < len; ++i) {
            x[i] = 1 + rng.next_below(14);
            y[i] = 1 + rng.next_below(14);
        }
        const auto r = metric_d_rho(x, y);
        CHECK(r.partial >= clopen_ball_radius(a) - r.tail_bound);
    }
}
