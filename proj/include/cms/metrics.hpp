#pragma once

/**
 * @file metrics.hpp
 * @brief The two metrics on sequence space, evaluated on finite prefixes.
 *
 * d(x,y) = 2^{-(m-1)} where m is the first disagreeing coordinate. On the
 * alphabet, rho(a,b) = |1/a - 1/b| extends to the compactified alphabet by
 * rho(n, inf) = 1/n, and d_rho(x,y) = sum_n 2^{-n} rho(x_n, y_n). Since
 * rho <= 1, truncating d_rho after L coordinates leaves a tail of at most
 * 2^{-L}; results carry the exact partial sum plus that bound.
 *
 * Only finite data exists at runtime, so d uses prefix semantics (first
 * disagreement over the common length; a word that is a prefix of the other
 * gives 0, the infimum over common infinite extensions) and d_rho requires
 * equal lengths outright.
 *
 * The metric alphabet is {1, 2, 3, ...} u {inf}, as for the full shift.
 * Presentations may label a vertex 0, but 0 has no reciprocal and is
 * rejected here rather than given an ad-hoc distance.
 */

#include "cms/rational.hpp"
#include "cms/shift.hpp"

#include <stdexcept>

namespace cms {

struct LengthMismatch : std::invalid_argument {
    LengthMismatch() : std::invalid_argument("d_rho: words must have equal length") {}
};

struct SymbolOutsideMetricDomain : std::domain_error {
    SymbolOutsideMetricDomain()
        : std::domain_error("metric alphabet is {1,2,...} u {inf}; symbol 0 has no distance") {}
};

/// rho-bar on the compactified alphabet, as an exact rational in [0,1].
inline Rat rho_bar(Symbol a, Symbol b) {
    if (a == 0 || b == 0) throw SymbolOutsideMetricDomain{};
    if (a == b) return Rat(0);
    const Rat ia = a == kInf ? Rat(0) : Rat(1, BigInt(a));
    const Rat ib = b == kInf ? Rat(0) : Rat(1, BigInt(b));
    return ia >= ib ? ia - ib : ib - ia;
}

/// First-disagreement metric on finite words; 0 when one is a prefix of the
/// other (the infimum over all pairs of infinite extensions).
inline double metric_d(const Word& x, const Word& y) {
    const std::size_t common = std::min(x.size(), y.size());
    for (std::size_t i = 0; i < common; ++i) {
        if (x[i] != y[i]) return std::pow(2.0, -static_cast<double>(i));  // 2^{-(m-1)}, m = i+1
    }
    return 0.0;
}

struct DRhoResult {
    Rat partial;     // sum over the seen coordinates, exact
    Rat tail_bound;  // 2^{-L}; everything unseen is below this
};

/// Weighted coordinate-wise distance on equal-length prefixes.
inline DRhoResult metric_d_rho(const BarWord& x, const BarWord& y) {
    if (x.size() != y.size()) throw LengthMismatch{};
    Rat sum(0);
    for (std::size_t i = 0; i < x.size(); ++i)
        sum += pow2_neg(static_cast<unsigned>(i + 1)) * rho_bar(x[i], y[i]);
    return {sum, pow2_neg(static_cast<unsigned>(x.size()))};
}

/// Radius of the depth-1 cylinder [a] as a d_rho-ball: half the distance
/// from a to its nearest alphabet neighbor a+1.
inline Rat clopen_ball_radius(Symbol a) {
    if (a == 0 || a == kInf) throw SymbolOutsideMetricDomain{};
    return Rat(1, BigInt(2) * BigInt(a) * BigInt(a + 1));
}

}  // namespace cms
