#pragma once

/**
 * @file potential.hpp
 * @brief Depth-k locally constant potentials with symbolic tails.
 *
 * A potential of depth k is constant on cylinders of length k. The head map
 * pins explicit values on length-k words whose first symbol is small; beyond
 * the head the value depends on the first symbol alone, through one of the
 * shipped tail families:
 *
 *   poly      phi|[n] = c0 + c1 n + c2 n^2
 *   log       phi|[n] = c log n
 *   logweight phi|[n] = log(coeff * ratio^n), coeff/ratio rational, so
 *             e^{phi} is exactly the geometric weight coeff * ratio^n
 *
 * A tail on an infinite alphabet forces depth 1 (a deeper head could never
 * cover the words whose later coordinates roam the whole alphabet).
 *
 * var_n of a depth-k potential vanishes for n >= k; the var_bound field
 * records the declared envelope for the values at smaller n.
 */

#include "cms/rational.hpp"
#include "cms/series.hpp"
#include "cms/shift.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <stdexcept>

namespace cms {

struct PotentialDomainError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct SeriesUndecidable : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct VarBound {
    enum class Kind { Zero, Geometric };
    Kind kind = Kind::Zero;
    double C = 0.0;
    double lambda = 0.5;

    double at(std::uint64_t n) const {
        return kind == Kind::Zero ? 0.0 : C * std::pow(lambda, static_cast<double>(n));
    }
};

struct PotentialTail {
    enum class Kind { None, Poly, Log, LogWeightGeometric };
    Kind kind = Kind::None;
    double c0 = 0, c1 = 0, c2 = 0;  // Poly
    double log_coeff = 0;           // Log
    Rat lwg_coeff = 1, lwg_ratio = Rat(1, 2);  // LogWeightGeometric

    static PotentialTail none() { return {}; }
    static PotentialTail constant(double c) {
        PotentialTail t;
        t.kind = Kind::Poly;
        t.c0 = c;
        return t;
    }
    static PotentialTail poly(double c0, double c1, double c2 = 0) {
        PotentialTail t;
        t.kind = Kind::Poly;
        t.c0 = c0;
        t.c1 = c1;
        t.c2 = c2;
        return t;
    }
    static PotentialTail log(double coeff) {
        PotentialTail t;
        t.kind = Kind::Log;
        t.log_coeff = coeff;
        return t;
    }
    static PotentialTail log_weight(Rat coeff, Rat ratio) {
        if (ratio <= 0 || ratio >= 1 || coeff <= 0)
            throw PotentialDomainError("log_weight tail needs 0 < ratio < 1 and coeff > 0");
        PotentialTail t;
        t.kind = Kind::LogWeightGeometric;
        t.lwg_coeff = coeff;
        t.lwg_ratio = ratio;
        return t;
    }

    double value_at(std::uint64_t n) const {
        const double x = static_cast<double>(n);
        switch (kind) {
            case Kind::None:
                throw PotentialDomainError("no tail rule covers symbol " + std::to_string(n));
            case Kind::Poly: return c0 + c1 * x + c2 * x * x;
            case Kind::Log: return log_coeff * std::log(x);
            case Kind::LogWeightGeometric:
                return std::log(to_double(lwg_coeff)) + x * std::log(to_double(lwg_ratio));
        }
        return 0;
    }

    /// sup over n >= from of the tail values (+inf when unbounded above).
    double sup_from(std::uint64_t from) const {
        const double inf = std::numeric_limits<double>::infinity();
        switch (kind) {
            case Kind::None: return -inf;
            case Kind::Poly: {
                if (c2 > 0 || (c2 == 0 && c1 > 0)) return inf;
                if (c2 == 0) return value_at(from);  // constant or decreasing
                const double vertex = -c1 / (2 * c2);  // c2 < 0: concave
                const double x = std::max(static_cast<double>(from), vertex);
                const std::uint64_t lo = static_cast<std::uint64_t>(std::max(1.0, std::floor(x)));
                double best = value_at(std::max(from, lo));
                best = std::max(best, value_at(std::max(from, lo + 1)));
                best = std::max(best, value_at(from));
                return best;
            }
            case Kind::Log: return log_coeff > 0 ? inf : value_at(from);
            case Kind::LogWeightGeometric: return value_at(from);  // ratio < 1: decreasing
        }
        return inf;
    }
};

struct HeadValue {
    double value = 0.0;
    std::optional<Rat> exp_value;  // e^{value} when exactly known
};

class Potential {
public:
    Potential(int depth, std::map<Word, HeadValue> head, PotentialTail tail,
              VarBound var = {})
        : depth_(depth), head_(std::move(head)), tail_(tail), var_(var) {
        if (depth_ < 1) throw PotentialDomainError("depth must be >= 1");
        for (auto& [w, hv] : head_) {
            if (static_cast<int>(w.size()) != depth_)
                throw PotentialDomainError("head word " + word_to_string(w) +
                                           " does not match depth " + std::to_string(depth_));
            if (!word_is_finite(w)) throw PotentialDomainError("head word contains inf");
            head_symbol_max_ = std::max(head_symbol_max_, w.front());
        }
        if (tail_.kind != PotentialTail::Kind::None && depth_ != 1)
            throw PotentialDomainError("a symbolic tail forces depth 1");
    }

    static Potential zero() { return Potential(1, {}, PotentialTail::constant(0.0)); }

    static Potential depth1(std::map<Symbol, HeadValue> by_symbol, PotentialTail tail,
                            VarBound var = {}) {
        std::map<Word, HeadValue> head;
        for (auto& [s, hv] : by_symbol) head[{s}] = hv;
        return Potential(1, std::move(head), tail, var);
    }

    int depth() const { return depth_; }
    const PotentialTail& tail() const { return tail_; }
    const std::map<Word, HeadValue>& head() const { return head_; }
    const VarBound& var_bound() const { return var_; }
    Symbol head_symbol_max() const { return head_symbol_max_; }

    /// Value on the cylinder of the first `depth` symbols of w.
    double value(const Word& w) const {
        if (static_cast<int>(w.size()) < depth_)
            throw PotentialDomainError("word shorter than potential depth");
        Word key(w.begin(), w.begin() + depth_);
        const auto it = head_.find(key);
        if (it != head_.end()) return it->second.value;
        const bool in_head_range = !head_.empty() && key.front() <= head_symbol_max_;
        if (in_head_range || tail_.kind == PotentialTail::Kind::None)
            throw PotentialDomainError("no value on cylinder " + word_to_string(key));
        return tail_.value_at(key.front());
    }

    /// e^{value} as an exact rational when available.
    std::optional<Rat> exp_value_exact(const Word& w) const {
        Word key(w.begin(), w.begin() + depth_);
        const auto it = head_.find(key);
        if (it != head_.end()) return it->second.exp_value;
        if (tail_.kind == PotentialTail::Kind::LogWeightGeometric && key.front() > head_symbol_max_)
            return tail_.lwg_coeff * rat_pow(tail_.lwg_ratio, static_cast<long long>(key.front()));
        return std::nullopt;
    }

    double sup() const {
        double best = -std::numeric_limits<double>::infinity();
        for (auto& [w, hv] : head_) best = std::max(best, hv.value);
        if (tail_.kind != PotentialTail::Kind::None)
            best = std::max(best, tail_.sup_from(head_symbol_max_ + 1));
        return best;
    }

    /**
     * On the full shift, is sum_n e^{t phi|[n]} finite, and what is it?
     * The finiteness answer is symbolic (p-series / geometric comparison);
     * the value is exact for rational-weight tails with t = 1 and numeric
     * with a certified tail otherwise. This is the pressure oracle for
     * depth-1 potentials on the full shift: P(t phi) = log of this sum.
     */
    struct ExpSum {
        bool finite = false;
        Scalar value{Rat(0)};
    };

    ExpSum exp_sum_full_shift(double t) const {
        if (depth_ != 1)
            throw PotentialDomainError("exp_sum_full_shift: depth-1 potentials only");
        ExpSum out;
        const std::uint64_t tail_from = head_symbol_max_ + 1;
        // head part
        Scalar head_sum{Rat(0)};
        bool head_exact_possible = t == 1.0;
        for (auto& [w, hv] : head_) {
            if (head_exact_possible && hv.exp_value)
                head_sum += Scalar(*hv.exp_value);
            else
                head_sum += Scalar::approx(std::exp(t * hv.value));
        }
        switch (tail_.kind) {
            case PotentialTail::Kind::None:
                throw PotentialDomainError("full-shift sum needs a tail rule");
            case PotentialTail::Kind::Poly: {
                // e^{t(c0+c1 n+c2 n^2)}: finite iff the exponent tends to -inf
                const double tc1 = t * tail_.c1, tc2 = t * tail_.c2;
                if (tc2 > 0 || (tc2 == 0 && tc1 > 0) || (tc2 == 0 && tc1 == 0)) {
                    out.finite = false;  // constant positive terms also diverge
                    return out;
                }
                out.finite = true;
                if (tc2 == 0) {
                    // geometric with ratio e^{t c1} < 1
                    const double r = std::exp(tc1);
                    const double a = std::exp(t * tail_.c0);
                    const double first = std::pow(r, static_cast<double>(tail_from));
                    out.value = head_sum + Scalar::approx(a * first / (1.0 - r));
                } else {
                    // super-geometrically decaying terms: once the term ratio
                    // e^{tc1 + tc2(2n+1)} drops below 1/2 the tail is under
                    // twice the next term
                    double sum = 0.0;
                    for (std::uint64_t n = tail_from; n < tail_from + 1000000; ++n) {
                        const double term = std::exp(t * tail_.value_at(n));
                        sum += term;
                        const double ratio = std::exp(tc1 + tc2 * (2.0 * n + 1.0));
                        if (ratio < 0.5 && term * ratio * 2.0 < 1e-18 * (1.0 + sum)) break;
                    }
                    out.value = head_sum + Scalar::approx(sum);
                }
                return out;
            }
            case PotentialTail::Kind::Log: {
                // sum n^{t c}: p-series, finite iff t c < -1
                const double e = t * tail_.log_coeff;
                if (e >= -1.0) { out.finite = false; return out; }
                out.finite = true;
                out.value = head_sum + Scalar::approx(power_tail_sum(-e, tail_from));
                return out;
            }
            case PotentialTail::Kind::LogWeightGeometric: {
                out.finite = true;
                if (t == 1.0) {
                    out.value = head_sum +
                                Scalar(tail_.lwg_coeff * geometric_sum(tail_.lwg_ratio, tail_from));
                } else {
                    const double r = std::pow(to_double(tail_.lwg_ratio), t);
                    if (r >= 1.0) { out.finite = false; return out; }
                    const double a = std::pow(to_double(tail_.lwg_coeff), t);
                    const double first = std::pow(r, static_cast<double>(tail_from));
                    out.value = head_sum + Scalar::approx(a * first / (1.0 - r));
                }
                return out;
            }
        }
        return out;
    }

private:
    int depth_;
    std::map<Word, HeadValue> head_;
    PotentialTail tail_;
    VarBound var_;
    Symbol head_symbol_max_ = 0;
};

}  // namespace cms
