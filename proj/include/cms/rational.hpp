#pragma once

/**
 * @file rational.hpp
 * @brief Exact rational arithmetic and the exact-or-approximate scalar type.
 *
 * Cylinder masses of periodic and convex-combination measures are exact
 * rationals; quantities that pass through eigenvalue problems or logarithms
 * are doubles. Scalar carries a value through mixed pipelines and remembers
 * whether it is still exact. Mixing an exact value with an approximate one
 * demotes the result to approximate, and the flag propagates from there.
 */

#include <boost/multiprecision/cpp_int.hpp>

#include <charconv>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace cms {

using Rat = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

inline double to_double(const Rat& q) { return q.template convert_to<double>(); }

/// Serialize as "p/q" (or "p" when the denominator is 1).
inline std::string rat_to_string(const Rat& q) {
    const BigInt num = numerator(q);
    const BigInt den = denominator(q);
    if (den == 1) return num.str();
    return num.str() + "/" + den.str();
}

/// Parse "p/q" or "p". Throws std::invalid_argument on malformed input.
inline Rat rat_from_string(const std::string& s) {
    const auto slash = s.find('/');
    try {
        if (slash == std::string::npos) return Rat(BigInt(s));
        const BigInt num(s.substr(0, slash));
        const BigInt den(s.substr(slash + 1));
        if (den == 0) throw std::invalid_argument("zero denominator");
        return Rat(num, den);
    } catch (const std::exception&) {
        throw std::invalid_argument("not a rational: '" + s + "'");
    }
}

/// Shortest decimal that round-trips to the same double.
inline std::string double_to_string(double x) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, res.ptr);
}

/// 2^-e as an exact rational, e >= 0.
inline Rat pow2_neg(unsigned e) {
    BigInt den = 1;
    den <<= e;
    return Rat(1, den);
}

/// q^e for integer e (possibly negative; q != 0 in that case).
inline Rat rat_pow(const Rat& q, long long e) {
    if (e < 0) {
        if (q == 0) throw std::domain_error("rat_pow: 0 to negative power");
        return rat_pow(Rat(denominator(q), numerator(q)), -e);
    }
    Rat acc = 1, base = q;
    auto n = static_cast<unsigned long long>(e);
    while (n) {
        if (n & 1) acc *= base;
        base *= base;
        n >>= 1;
    }
    return acc;
}

/**
 * A number that is either an exact rational or a double approximation.
 * Arithmetic keeps exactness when both operands are exact.
 */
class Scalar {
public:
    Scalar() : exact_(true), q_(0), d_(0.0) {}
    Scalar(const Rat& q) : exact_(true), q_(q), d_(to_double(q)) {}
    Scalar(int v) : Scalar(Rat(v)) {}
    Scalar(double d) : exact_(false), q_(0), d_(d) {}

    static Scalar approx(double d) { return Scalar(d); }

    bool is_exact() const { return exact_; }
    double value() const { return exact_ ? to_double(q_) : d_; }
    const Rat& rational() const {
        if (!exact_) throw std::logic_error("Scalar: approximate value has no exact form");
        return q_;
    }

    Scalar& operator+=(const Scalar& o) {
        if (exact_ && o.exact_) { q_ += o.q_; d_ = to_double(q_); }
        else { d_ = value() + o.value(); exact_ = false; }
        return *this;
    }
    Scalar& operator-=(const Scalar& o) {
        if (exact_ && o.exact_) { q_ -= o.q_; d_ = to_double(q_); }
        else { d_ = value() - o.value(); exact_ = false; }
        return *this;
    }
    Scalar& operator*=(const Scalar& o) {
        if (exact_ && o.exact_) { q_ *= o.q_; d_ = to_double(q_); }
        else { d_ = value() * o.value(); exact_ = false; }
        return *this;
    }

    friend Scalar operator+(Scalar a, const Scalar& b) { return a += b; }
    friend Scalar operator-(Scalar a, const Scalar& b) { return a -= b; }
    friend Scalar operator*(Scalar a, const Scalar& b) { return a *= b; }

    friend bool operator==(const Scalar& a, const Scalar& b) {
        if (a.exact_ && b.exact_) return a.q_ == b.q_;
        return a.value() == b.value();
    }

    std::string str() const { return exact_ ? rat_to_string(q_) : double_to_string(d_); }

private:
    bool exact_;
    Rat q_;
    double d_;
};

}  // namespace cms
