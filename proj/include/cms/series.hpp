#pragma once

/**
 * @file series.hpp
 * @brief Closed forms and certified numeric sums for the series behind
 *        integration, partition entropy, and full-shift pressure.
 *
 * Exact forms (rational in, rational out), for 0 < r < 1 and a >= 0:
 *   sum_{n>=a} r^n       = r^a / (1-r)
 *   sum_{n>=a} n r^n     = r^a (a - (a-1) r) / (1-r)^2
 *   sum_{n>=a} n^2 r^n   = [a^2 r^a + 2 S1(a+1) - r^{a+1}/(1-r)] / (1-r)
 * Numeric forms carry an explicit tail bound and are summed until the bound
 * drops below the requested tolerance.
 */

#include "cms/rational.hpp"

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <stdexcept>

namespace cms {

struct SeriesDiverges : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline Rat geometric_sum(const Rat& r, std::uint64_t from) {
    if (r <= 0 || r >= 1) throw std::domain_error("geometric_sum: need 0 < r < 1");
    return rat_pow(r, static_cast<long long>(from)) / (1 - r);
}

inline Rat geometric_sum_n(const Rat& r, std::uint64_t from) {
    if (r <= 0 || r >= 1) throw std::domain_error("geometric_sum_n: need 0 < r < 1");
    const Rat ra = rat_pow(r, static_cast<long long>(from));
    const Rat a(from);
    return ra * (a - (a - 1) * r) / ((1 - r) * (1 - r));
}

inline Rat geometric_sum_n2(const Rat& r, std::uint64_t from) {
    if (r <= 0 || r >= 1) throw std::domain_error("geometric_sum_n2: need 0 < r < 1");
    const Rat ra = rat_pow(r, static_cast<long long>(from));
    const Rat a(from);
    const Rat s1_next = geometric_sum_n(r, from + 1);
    return (a * a * ra + 2 * s1_next - ra * r / (1 - r)) / (1 - r);
}

/// Riemann zeta for real s > 1 (Euler-Maclaurin, ~1e-14 absolute).
inline double zeta(double s) {
    if (s <= 1.0) throw SeriesDiverges("zeta: diverges for s <= 1");
    const int N = 25;
    double sum = 0.0;
    for (int n = 1; n < N; ++n) sum += std::pow(n, -s);
    const double Ns = std::pow(N, -s);
    sum += Ns * N / (s - 1.0);  // N^{1-s}/(s-1)
    sum += Ns / 2.0;
    sum += s * Ns / N / 12.0;
    sum -= s * (s + 1) * (s + 2) * Ns / (N * N * N) / 720.0;
    sum += s * (s + 1) * (s + 2) * (s + 3) * (s + 4) * Ns / std::pow(N, 5.0) / 30240.0;
    return sum;
}

/// sum_{n>=from} n^{-s} for s > 1.
inline double power_tail_sum(double s, std::uint64_t from) {
    if (s <= 1.0) throw SeriesDiverges("power_tail_sum: diverges for s <= 1");
    double head = 0.0;
    for (std::uint64_t n = 1; n < from; ++n) head += std::pow(static_cast<double>(n), -s);
    return zeta(s) - head;
}

/// sum_{n>=from} n^{-s} log n for s > 1 (numeric; integral tail bound).
inline double power_log_sum(double s, std::uint64_t from, double tol = 1e-14) {
    if (s <= 1.0) throw SeriesDiverges("power_log_sum: diverges for s <= 1");
    double sum = 0.0;
    std::uint64_t n = from;
    for (;; ++n) {
        sum += std::pow(static_cast<double>(n), -s) * std::log(static_cast<double>(n));
        // tail <= int_n^inf x^{-s} log x dx = n^{1-s} (log n/(s-1) + 1/(s-1)^2)
        const double x = static_cast<double>(n);
        const double tail = std::pow(x, 1.0 - s) * (std::log(x) / (s - 1) + 1.0 / ((s - 1) * (s - 1)));
        if (tail < tol || n > from + 2000000) break;
    }
    return sum;
}

/// sum_{n>=from} c r^n log n for 0 < r < 1 (numeric; geometric tail bound).
inline double geometric_log_sum(double c, double r, std::uint64_t from, double tol = 1e-15) {
    if (r <= 0 || r >= 1) throw std::domain_error("geometric_log_sum: need 0 < r < 1");
    double sum = 0.0;
    double term_geo = c * std::pow(r, static_cast<double>(from));
    for (std::uint64_t n = from;; ++n) {
        sum += term_geo * std::log(static_cast<double>(n));
        term_geo *= r;
        // log(n+1)/log(n) <= 2 for n >= 2, so tail <= 2 |term| log(n+1)/(1-r)
        const double tail = 2.0 * std::fabs(term_geo) * std::log(static_cast<double>(n + 2)) / (1.0 - r);
        if (tail < tol || n > from + 100000) break;
    }
    return sum;
}

/**
 * Generic certified sum: adds term(n) for n = from, from+1, ... until
 * tail_bound(n+1) (a bound on everything not yet added) drops below tol.
 */
inline double sum_with_tail(const std::function<double(std::uint64_t)>& term,
                            const std::function<double(std::uint64_t)>& tail_bound,
                            std::uint64_t from, double tol = 1e-14,
                            std::uint64_t max_terms = 2000000) {
    double sum = 0.0;
    for (std::uint64_t n = from; n < from + max_terms; ++n) {
        sum += term(n);
        if (tail_bound(n + 1) < tol) return sum;
    }
    return sum;
}

}  // namespace cms
