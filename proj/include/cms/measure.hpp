#pragma once

/**
 * @file measure.hpp
 * @brief Invariant measures with exact cylinder-mass queries.
 *
 * Five measure shapes cover everything the library constructs:
 *
 *   Periodic       orbit average over the cyclic shifts of a finite word
 *                  (possibly containing inf, for orbits of the compactified
 *                  shift); masses are exact rationals over the period
 *   FiniteMarkov   stationary Markov chain on a finite symbol set; exact
 *                  when the matrix is given rationally, otherwise doubles
 *                  with the approximate flag carried by Scalar
 *   Bernoulli      product measure on the full shift with explicit head
 *                  weights plus a geometric (exact) or power-law (approx)
 *                  tail
 *   DiracInfinity  the point mass at the all-inf fixed point, available only
 *                  when that point survives in the compactification
 *   Combo          positive combination of distinct parts with total weight
 *                  at most one (sub-probabilities represent escaped mass)
 *
 * Entropy: periodic orbits and the fixed point at infinity carry zero;
 * Markov chains the usual row-entropy average; products the weight entropy;
 * combinations are weight-affine.
 */

#include "cms/potential.hpp"
#include "cms/rational.hpp"
#include "cms/series.hpp"
#include "cms/shift.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <vector>

namespace cms {

struct NotCyclicallyAdmissible : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct MeasureDomainError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct WeightSumExceedsOne : std::invalid_argument {
    WeightSumExceedsOne() : std::invalid_argument("combination weights exceed total mass 1") {}
};

/// Result of integrating a potential: a finite value or minus infinity.
struct Integral {
    bool minus_infinity = false;
    Scalar value{Rat(0)};

    static Integral neg_inf() { return {true, Scalar(Rat(0))}; }
    static Integral of(Scalar v) { return {false, v}; }
};

struct PartitionEntropy {
    bool finite = true;
    double value = 0.0;
};

class Measure {
public:
    enum class Kind { Periodic, FiniteMarkov, Bernoulli, DiracInfinity, Combo };

    // ---- constructors ----

    /// Orbit average of the periodic point with the given cycle. The cycle is
    /// canonicalized to its lexicographically least rotation, so measures of
    /// the same orbit compare equal.
    static Measure periodic(const ShiftPresentation& shift, BarWord cycle) {
        if (cycle.empty()) throw MeasureDomainError("periodic: empty cycle");
        if (word_is_finite(cycle)) {
            if (!shift.is_cyclically_admissible(cycle))
                throw NotCyclicallyAdmissible("cycle " + word_to_string(cycle) +
                                              " is not cyclically admissible");
        } else if (!shift.is_cyclically_bar_admissible(cycle)) {
            throw NotCyclicallyAdmissible("cycle " + word_to_string(cycle) +
                                          " is not admissible in the compactified shift");
        }
        Measure m;
        m.kind_ = Kind::Periodic;
        m.cycle_ = canonical_rotation(std::move(cycle));
        return m;
    }

    static Measure finite_markov(const ShiftPresentation& shift, std::vector<Symbol> support,
                                 std::vector<std::vector<Scalar>> P, std::vector<Scalar> pi) {
        const std::size_t S = support.size();
        if (S == 0 || P.size() != S || pi.size() != S)
            throw MeasureDomainError("finite_markov: shape mismatch");
        for (std::size_t i = 0; i + 1 < S; ++i)
            if (support[i] >= support[i + 1])
                throw MeasureDomainError("finite_markov: support must be sorted distinct");
        bool exact = true;
        for (auto& row : P)
            for (auto& x : row) exact = exact && x.is_exact();
        for (auto& x : pi) exact = exact && x.is_exact();
        auto close = [&](const Scalar& a, const Scalar& b) {
            if (a.is_exact() && b.is_exact()) return a.rational() == b.rational();
            return std::fabs(a.value() - b.value()) < 1e-9;
        };
        for (std::size_t i = 0; i < S; ++i) {
            Scalar row_sum{Rat(0)};
            for (std::size_t j = 0; j < S; ++j) {
                if (P[i][j].value() < 0) throw MeasureDomainError("finite_markov: negative entry");
                if (P[i][j].value() > 0 && !shift.has_edge(support[i], support[j]))
                    throw MeasureDomainError("finite_markov: transition not allowed by the shift");
                row_sum += P[i][j];
            }
            if (!close(row_sum, Scalar(Rat(1))))
                throw MeasureDomainError("finite_markov: row " + std::to_string(i) +
                                         " does not sum to 1");
        }
        Scalar total{Rat(0)};
        for (std::size_t j = 0; j < S; ++j) {
            Scalar col{Rat(0)};
            for (std::size_t i = 0; i < S; ++i) col += pi[i] * P[i][j];
            if (!close(col, pi[j]))
                throw MeasureDomainError("finite_markov: pi is not stationary");
            total += pi[j];
        }
        if (!close(total, Scalar(Rat(1))))
            throw MeasureDomainError("finite_markov: pi does not sum to 1");
        Measure m;
        m.kind_ = Kind::FiniteMarkov;
        m.support_ = std::move(support);
        m.P_ = std::move(P);
        m.pi_ = std::move(pi);
        m.markov_exact_ = exact;
        return m;
    }

    /// Product measure on the full shift: explicit weights below tail_start,
    /// then w_n = coeff * ratio^n. Total mass must be exactly 1.
    static Measure bernoulli_geometric(std::map<Symbol, Rat> head, Rat coeff, Rat ratio,
                                       Symbol tail_start) {
        if (ratio <= 0 || ratio >= 1 || coeff <= 0)
            throw MeasureDomainError("bernoulli: need 0 < ratio < 1 and coeff > 0");
        if (tail_start < 1) throw MeasureDomainError("bernoulli: tail must start at a symbol >= 1");
        Rat total = coeff * geometric_sum(ratio, tail_start);
        for (auto& [s, w] : head) {
            if (s == 0 || s >= tail_start)
                throw MeasureDomainError("bernoulli: head symbols must lie below the tail");
            if (w < 0) throw MeasureDomainError("bernoulli: negative weight");
            total += w;
        }
        if (total != 1)
            throw MeasureDomainError("bernoulli: weights sum to " + rat_to_string(total) +
                                     ", not 1");
        Measure m;
        m.kind_ = Kind::Bernoulli;
        m.bhead_ = std::move(head);
        m.btail_ = BTail::Geometric;
        m.bcoeff_ = coeff;
        m.bratio_ = ratio;
        m.btail_start_ = tail_start;
        return m;
    }

    /// Product measure with w_n proportional to n^{-s}, s > 1 (approximate:
    /// the normalizer 1/zeta(s) is irrational).
    static Measure bernoulli_power(double s) {
        if (s <= 1.0) throw MeasureDomainError("bernoulli_power: need s > 1");
        Measure m;
        m.kind_ = Kind::Bernoulli;
        m.btail_ = BTail::Power;
        m.bpower_s_ = s;
        m.bpower_coeff_ = 1.0 / zeta(s);
        m.btail_start_ = 1;
        return m;
    }

    /// Finite-support product measure (all weight on explicitly listed
    /// symbols; exact).
    static Measure bernoulli_finite(std::map<Symbol, Rat> head) {
        Rat total = 0;
        for (auto& [s, w] : head) {
            if (s == 0) throw MeasureDomainError("bernoulli: symbol 0 is not in the full shift");
            if (w < 0) throw MeasureDomainError("bernoulli: negative weight");
            total += w;
        }
        if (total != 1) throw MeasureDomainError("bernoulli: weights must sum to 1");
        Measure m;
        m.kind_ = Kind::Bernoulli;
        m.bhead_ = std::move(head);
        m.btail_ = BTail::None;
        return m;
    }

    /// Point mass at (inf, inf, ...). Exists only when that point lies in
    /// the compactification, i.e. when mass can escape every finite symbol
    /// set; presentations with a finite uniform Rome reject it.
    static Measure dirac_infinity(const ShiftPresentation& shift) {
        if (!shift.infinity_fixed_point_exists())
            throw MeasureDomainError(
                "dirac_infinity: the all-inf fixed point is not in this compactification");
        Measure m;
        m.kind_ = Kind::DiracInfinity;
        return m;
    }

    /// Positive combination with total weight <= 1; parts must be distinct.
    static Measure combo(const std::vector<std::pair<Rat, Measure>>& parts) {
        if (parts.empty()) throw MeasureDomainError("combo: no parts");
        Rat total = 0;
        for (auto& [w, part] : parts) {
            if (w <= 0) throw MeasureDomainError("combo: weights must be positive");
            total += w;
        }
        if (total > 1) throw WeightSumExceedsOne{};
        for (std::size_t i = 0; i < parts.size(); ++i)
            for (std::size_t j = i + 1; j < parts.size(); ++j)
                if (parts[i].second == parts[j].second)
                    throw MeasureDomainError("combo: parts must be distinct");
        Measure m;
        m.kind_ = Kind::Combo;
        for (auto& [w, part] : parts)
            m.parts_.emplace_back(w, std::make_shared<const Measure>(part));
        return m;
    }

    // ---- queries ----

    Kind kind() const { return kind_; }
    const BarWord& cycle() const { return cycle_; }
    const std::vector<Symbol>& support() const { return support_; }
    const std::vector<std::vector<Scalar>>& transition() const { return P_; }
    const std::vector<Scalar>& stationary() const { return pi_; }
    const std::vector<std::pair<Rat, std::shared_ptr<const Measure>>>& parts() const {
        return parts_;
    }

    struct GeometricTail {
        Rat coeff, ratio;
        Symbol start;
    };

    /// The geometric weight family of a product measure, when it has one.
    std::optional<GeometricTail> bernoulli_geometric_tail() const {
        if (kind_ == Kind::Bernoulli && btail_ == BTail::Geometric)
            return GeometricTail{bcoeff_, bratio_, btail_start_};
        return std::nullopt;
    }

    const std::map<Symbol, Rat>& bernoulli_head() const { return bhead_; }

    /// Largest finite symbol with positive depth-1 mass, when the charged
    /// set is finite; nullopt when infinitely many symbols are charged.
    std::optional<Symbol> max_charged_symbol() const {
        switch (kind_) {
            case Kind::Periodic: {
                Symbol mx = 0;
                for (Symbol s : cycle_)
                    if (s != kInf) mx = std::max(mx, s);
                return mx;
            }
            case Kind::FiniteMarkov:
                return support_.back();
            case Kind::Bernoulli: {
                if (btail_ != BTail::None) return std::nullopt;
                Symbol mx = 0;
                for (auto& [s, w] : bhead_)
                    if (w > 0) mx = std::max(mx, s);
                return mx;
            }
            case Kind::DiracInfinity:
                return Symbol{0};
            case Kind::Combo: {
                Symbol mx = 0;
                for (auto& [w, part] : parts_) {
                    const auto part_max = part->max_charged_symbol();
                    if (!part_max) return std::nullopt;
                    mx = std::max(mx, *part_max);
                }
                return mx;
            }
        }
        return std::nullopt;
    }

    /// Exact mass of the cylinder given by a finite (bar-)word.
    Scalar mass(const BarWord& cylinder) const {
        if (cylinder.empty()) throw MeasureDomainError("mass: empty cylinder");
        switch (kind_) {
            case Kind::Periodic: {
                const std::size_t p = cycle_.size();
                std::size_t hits = 0;
                for (std::size_t off = 0; off < p; ++off) {
                    bool match = true;
                    for (std::size_t i = 0; i < cylinder.size(); ++i) {
                        if (cycle_[(off + i) % p] != cylinder[i]) { match = false; break; }
                    }
                    if (match) ++hits;
                }
                return Scalar(Rat(hits, p));
            }
            case Kind::FiniteMarkov: {
                Scalar acc{Rat(1)};
                std::optional<std::size_t> prev;
                for (Symbol s : cylinder) {
                    const auto idx = support_index(s);
                    if (!idx) return Scalar(Rat(0));
                    if (!prev) acc *= pi_[*idx];
                    else acc *= P_[*prev][*idx];
                    prev = idx;
                }
                return acc;
            }
            case Kind::Bernoulli: {
                Scalar acc{Rat(1)};
                for (Symbol s : cylinder) {
                    if (s == kInf) return Scalar(Rat(0));
                    acc *= bernoulli_weight(s);
                }
                return acc;
            }
            case Kind::DiracInfinity: {
                for (Symbol s : cylinder)
                    if (s != kInf) return Scalar(Rat(0));
                return Scalar(Rat(1));
            }
            case Kind::Combo: {
                Scalar acc{Rat(0)};
                for (auto& [w, part] : parts_) acc += Scalar(w) * part->mass(cylinder);
                return acc;
            }
        }
        return Scalar(Rat(0));
    }

    /// Total weight of the measure (1 for all shapes except sub-probability
    /// combinations).
    Scalar total_mass() const {
        if (kind_ != Kind::Combo) return Scalar(Rat(1));
        Scalar acc{Rat(0)};
        for (auto& [w, part] : parts_) acc += Scalar(w) * part->total_mass();
        return acc;
    }

    /// Mass of the depth-1 cylinder at the added symbol.
    Scalar mass_at_infinity() const { return mass(BarWord{kInf}); }

    /// Kolmogorov-Sinai entropy.
    Scalar entropy() const {
        switch (kind_) {
            case Kind::Periodic:
            case Kind::DiracInfinity:
                return Scalar(Rat(0));  // atomic on a single orbit
            case Kind::FiniteMarkov: {
                double h = 0;
                for (std::size_t i = 0; i < support_.size(); ++i) {
                    for (std::size_t j = 0; j < support_.size(); ++j) {
                        const double p = P_[i][j].value();
                        if (p > 0) h -= pi_[i].value() * p * std::log(p);
                    }
                }
                return Scalar::approx(h);
            }
            case Kind::Bernoulli:
                return Scalar::approx(bernoulli_entropy());
            case Kind::Combo: {
                Scalar acc{Rat(0)};
                for (auto& [w, part] : parts_) acc += Scalar(w) * part->entropy();
                return acc;
            }
        }
        return Scalar(Rat(0));
    }

    /// Entropy of the depth-1 cylinder partition, -sum mu[n] log mu[n] over
    /// finite symbols (the partition covers the uncompactified shift).
    PartitionEntropy partition_entropy() const {
        switch (kind_) {
            case Kind::Periodic: {
                std::map<Symbol, std::size_t> counts;
                for (Symbol s : cycle_)
                    if (s != kInf) ++counts[s];
                double h = 0;
                for (auto& [s, c] : counts) {
                    const double p = static_cast<double>(c) / cycle_.size();
                    h -= p * std::log(p);
                }
                return {true, h};
            }
            case Kind::FiniteMarkov: {
                double h = 0;
                for (auto& p : pi_)
                    if (p.value() > 0) h -= p.value() * std::log(p.value());
                return {true, h};
            }
            case Kind::Bernoulli:
                return {true, bernoulli_entropy()};
            case Kind::DiracInfinity:
                return {true, 0.0};
            case Kind::Combo: {
                // entropy of the combined depth-1 distribution (not affine)
                std::map<Symbol, double> dist;
                collect_depth1(*this, 1.0, dist);
                double h = 0;
                for (auto& [s, p] : dist)
                    if (p > 0) h -= p * std::log(p);
                return {true, h};
            }
        }
        return {true, 0.0};
    }

    /// Birkhoff integral of a depth-k potential; exact head algebra plus the
    /// tail series, with divergence to minus infinity reported as such.
    Integral integrate(const Potential& phi) const {
        switch (kind_) {
            case Kind::Periodic: {
                if (!word_is_finite(cycle_))
                    throw MeasureDomainError(
                        "integrate: potential undefined on orbits through inf");
                const std::size_t p = cycle_.size();
                Scalar acc{Rat(0)};
                for (std::size_t off = 0; off < p; ++off) {
                    Word window(phi.depth());
                    for (int i = 0; i < phi.depth(); ++i) window[i] = cycle_[(off + i) % p];
                    acc += Scalar::approx(phi.value(window));
                }
                return Integral::of(acc * Scalar(Rat(1, p)));
            }
            case Kind::FiniteMarkov: {
                Scalar acc{Rat(0)};
                Word w;
                integrate_markov_rec(phi, w, acc);
                return Integral::of(acc);
            }
            case Kind::Bernoulli:
                return integrate_bernoulli(phi);
            case Kind::DiracInfinity:
                throw MeasureDomainError("integrate: potential undefined at the fixed point at inf");
            case Kind::Combo: {
                Scalar acc{Rat(0)};
                for (auto& [w, part] : parts_) {
                    const Integral part_val = part->integrate(phi);
                    if (part_val.minus_infinity) return Integral::neg_inf();
                    acc += Scalar(w) * part_val.value;
                }
                return Integral::of(acc);
            }
        }
        return Integral::of(Scalar(Rat(0)));
    }

    /**
     * First k in [h, h+2m) whose self-return mass mu(A n shift^{-k} A)
     * exceeds 2^{-2m}; requires mu(A) > 1/m. Such a k always exists in the
     * stated window, and the inequality is checked exactly.
     */
    std::uint64_t return_time_witness(const Word& A, std::uint64_t m, std::uint64_t h) const {
        if (m == 0 || h == 0) throw MeasureDomainError("return_time_witness: m, h >= 1");
        const Scalar base = mass(A);
        const Rat threshold_pre(1, BigInt(m));
        if (!(base.value() > to_double(threshold_pre)))
            throw PreconditionViolated("return_time_witness: mass(A) must exceed 1/m");
        const Rat threshold = pow2_neg(static_cast<unsigned>(2 * m));
        for (std::uint64_t k = h; k < h + 2 * m; ++k) {
            const Scalar joint = self_return_mass(A, k);
            const bool above = joint.is_exact() ? joint.rational() > threshold
                                                : joint.value() > to_double(threshold);
            if (above) return k;
        }
        throw std::logic_error("return_time_witness: no k in the window (not invariant?)");
    }

    /// mu(A n shift^{-k} A), exact for the exact shapes.
    Scalar self_return_mass(const Word& A, std::uint64_t k) const {
        const std::size_t L = A.size();
        if (L == 0) throw MeasureDomainError("self_return_mass: empty cylinder");
        switch (kind_) {
            case Kind::Periodic: {
                const std::size_t p = cycle_.size();
                std::size_t hits = 0;
                for (std::size_t off = 0; off < p; ++off) {
                    bool match = true;
                    for (std::size_t i = 0; i < L && match; ++i)
                        match = cycle_[(off + i) % p] == A[i] &&
                                cycle_[(off + k + i) % p] == A[i];
                    if (match) ++hits;
                }
                return Scalar(Rat(hits, p));
            }
            case Kind::Combo: {
                Scalar acc{Rat(0)};
                for (auto& [w, part] : parts_) acc += Scalar(w) * part->self_return_mass(A, k);
                return acc;
            }
            default:
                break;
        }
        if (k < L) {
            // overlap: positions k+1..L must agree with the shifted copy
            for (std::size_t i = 0; i + k < L; ++i)
                if (A[i + k] != A[i]) return Scalar(Rat(0));
            Word merged(A.begin(), A.end());
            for (std::size_t i = L - k; i < L; ++i) merged.push_back(A[i]);
            return mass(merged);
        }
        if (kind_ == Kind::Bernoulli) {
            return mass(A) * mass(A);  // disjoint coordinates of a product measure
        }
        // FiniteMarkov: bridge of k-(L-1) steps from the end of A back to its start
        const auto ia = support_index(A.back()), ib = support_index(A.front());
        if (!ia || !ib) return Scalar(Rat(0));
        const auto bridge = markov_power_entry(k - (L - 1), *ia, *ib);
        const Scalar mass_A = mass(A);
        Scalar edges{Rat(1)};
        for (std::size_t i = 0; i + 1 < L; ++i) {
            const auto x = support_index(A[i]), y = support_index(A[i + 1]);
            if (!x || !y) return Scalar(Rat(0));
            edges *= P_[*x][*y];
        }
        return mass_A * bridge * edges;
    }

    bool operator==(const Measure& o) const {
        if (kind_ != o.kind_) return false;
        switch (kind_) {
            case Kind::Periodic: return cycle_ == o.cycle_;
            case Kind::DiracInfinity: return true;
            case Kind::FiniteMarkov:
                return support_ == o.support_ && scal_eq(pi_, o.pi_) && scal_eq2(P_, o.P_);
            case Kind::Bernoulli:
                return bhead_ == o.bhead_ && btail_ == o.btail_ && bcoeff_ == o.bcoeff_ &&
                       bratio_ == o.bratio_ && btail_start_ == o.btail_start_ &&
                       bpower_s_ == o.bpower_s_;
            case Kind::Combo: {
                if (parts_.size() != o.parts_.size()) return false;
                for (std::size_t i = 0; i < parts_.size(); ++i) {
                    if (parts_[i].first != o.parts_[i].first) return false;
                    if (!(*parts_[i].second == *o.parts_[i].second)) return false;
                }
                return true;
            }
        }
        return false;
    }

private:
    Measure() = default;

    enum class BTail { None, Geometric, Power };

    Kind kind_ = Kind::DiracInfinity;
    // Periodic
    BarWord cycle_;
    // FiniteMarkov
    std::vector<Symbol> support_;
    std::vector<std::vector<Scalar>> P_;
    std::vector<Scalar> pi_;
    bool markov_exact_ = false;
    // Bernoulli
    std::map<Symbol, Rat> bhead_;
    BTail btail_ = BTail::None;
    Rat bcoeff_ = 0, bratio_ = 0;
    Symbol btail_start_ = 1;
    double bpower_s_ = 0, bpower_coeff_ = 0;
    // Combo
    std::vector<std::pair<Rat, std::shared_ptr<const Measure>>> parts_;

    static BarWord canonical_rotation(BarWord w) {
        // reduce to the primitive period so powers of a cycle give the same
        // orbit measure and compare equal
        for (std::size_t p = 1; p <= w.size() / 2; ++p) {
            if (w.size() % p != 0) continue;
            bool periodic = true;
            for (std::size_t i = p; i < w.size() && periodic; ++i)
                periodic = w[i] == w[i - p];
            if (periodic) {
                w.resize(p);
                break;
            }
        }
        BarWord best = w;
        for (std::size_t r = 1; r < w.size(); ++r) {
            std::rotate(w.begin(), w.begin() + 1, w.end());
            if (w < best) best = w;
        }
        return best;
    }

    static bool scal_eq(const std::vector<Scalar>& a, const std::vector<Scalar>& b) {
        if (a.size() != b.size()) return false;
        for (std::size_t i = 0; i < a.size(); ++i)
            if (!(a[i] == b[i])) return false;
        return true;
    }
    static bool scal_eq2(const std::vector<std::vector<Scalar>>& a,
                         const std::vector<std::vector<Scalar>>& b) {
        if (a.size() != b.size()) return false;
        for (std::size_t i = 0; i < a.size(); ++i)
            if (!scal_eq(a[i], b[i])) return false;
        return true;
    }

    std::optional<std::size_t> support_index(Symbol s) const {
        const auto it = std::lower_bound(support_.begin(), support_.end(), s);
        if (it == support_.end() || *it != s) return std::nullopt;
        return static_cast<std::size_t>(it - support_.begin());
    }

    Scalar bernoulli_weight(Symbol s) const {
        const auto it = bhead_.find(s);
        if (it != bhead_.end()) return Scalar(it->second);
        switch (btail_) {
            case BTail::None: return Scalar(Rat(0));
            case BTail::Geometric:
                if (s < btail_start_) return Scalar(Rat(0));
                return Scalar(bcoeff_ * rat_pow(bratio_, static_cast<long long>(s)));
            case BTail::Power:
                return Scalar::approx(bpower_coeff_ *
                                      std::pow(static_cast<double>(s), -bpower_s_));
        }
        return Scalar(Rat(0));
    }

    double bernoulli_entropy() const {
        double h = 0;
        for (auto& [s, w] : bhead_) {
            const double p = to_double(w);
            if (p > 0) h -= p * std::log(p);
        }
        switch (btail_) {
            case BTail::None: break;
            case BTail::Geometric: {
                // -sum c r^n (log c + n log r)
                const Rat g0 = geometric_sum(bratio_, btail_start_);
                const Rat g1 = geometric_sum_n(bratio_, btail_start_);
                h -= std::log(to_double(bcoeff_)) * to_double(bcoeff_ * g0);
                h -= std::log(to_double(bratio_)) * to_double(bcoeff_ * g1);
                break;
            }
            case BTail::Power: {
                // -sum c n^{-s} (log c - s log n)
                h -= std::log(bpower_coeff_) * bpower_coeff_ *
                     power_tail_sum(bpower_s_, btail_start_);
                h += bpower_s_ * bpower_coeff_ * power_log_sum(bpower_s_, btail_start_);
                break;
            }
        }
        return h;
    }

    void integrate_markov_rec(const Potential& phi, Word& w, Scalar& acc) const {
        if (static_cast<int>(w.size()) == phi.depth()) {
            const Scalar mw = mass(w);
            if (mw.value() > 0) acc += mw * Scalar::approx(phi.value(w));
            return;
        }
        for (Symbol s : support_) {
            w.push_back(s);
            integrate_markov_rec(phi, w, acc);
            w.pop_back();
        }
    }

    Integral integrate_bernoulli(const Potential& phi) const {
        if (phi.depth() != 1)
            throw MeasureDomainError("integrate: product measures take depth-1 potentials");
        const auto& tail = phi.tail();
        // explicit region: everything below both tails
        Symbol split = std::max<Symbol>(phi.head_symbol_max(), btail_start_ ? btail_start_ : 1);
        if (btail_ == BTail::None) {
            Scalar acc{Rat(0)};
            for (auto& [s, w] : bhead_)
                if (w > 0) acc += Scalar(w) * Scalar::approx(phi.value({s}));
            return Integral::of(acc);
        }
        for (auto& [s, w] : bhead_) split = std::max(split, s);
        Scalar acc{Rat(0)};
        for (Symbol s = 1; s <= split; ++s) {
            const Scalar w = bernoulli_weight(s);
            if (w.value() > 0) acc += w * Scalar::approx(phi.value({s}));
        }
        const Symbol from = split + 1;
        if (btail_ == BTail::Geometric) {
            const double c = to_double(bcoeff_);
            switch (tail.kind) {
                case PotentialTail::Kind::None:
                    throw MeasureDomainError("integrate: potential has no tail rule");
                case PotentialTail::Kind::Poly: {
                    const double g0 = to_double(bcoeff_ * geometric_sum(bratio_, from));
                    const double g1 = to_double(bcoeff_ * geometric_sum_n(bratio_, from));
                    const double g2 = to_double(bcoeff_ * geometric_sum_n2(bratio_, from));
                    acc += Scalar::approx(tail.c0 * g0 + tail.c1 * g1 + tail.c2 * g2);
                    return Integral::of(acc);
                }
                case PotentialTail::Kind::Log:
                    acc += Scalar::approx(tail.log_coeff *
                                          geometric_log_sum(c, to_double(bratio_), from));
                    return Integral::of(acc);
                case PotentialTail::Kind::LogWeightGeometric: {
                    const double a0 = std::log(to_double(tail.lwg_coeff));
                    const double a1 = std::log(to_double(tail.lwg_ratio));
                    const double g0 = to_double(bcoeff_ * geometric_sum(bratio_, from));
                    const double g1 = to_double(bcoeff_ * geometric_sum_n(bratio_, from));
                    acc += Scalar::approx(a0 * g0 + a1 * g1);
                    return Integral::of(acc);
                }
            }
        }
        // power-law weights c n^{-s}
        const double c = bpower_coeff_, s = bpower_s_;
        auto moment_or_divergence = [&](double degree, double coeff) -> std::optional<double> {
            // contribution coeff * sum c n^{degree - s}
            if (coeff == 0.0) return 0.0;
            if (s - degree <= 1.0) return std::nullopt;  // diverges
            return coeff * c * power_tail_sum(s - degree, from);
        };
        switch (tail.kind) {
            case PotentialTail::Kind::None:
                throw MeasureDomainError("integrate: potential has no tail rule");
            case PotentialTail::Kind::Poly: {
                double total = 0;
                for (auto [deg, coeff] :
                     {std::pair{0.0, tail.c0}, {1.0, tail.c1}, {2.0, tail.c2}}) {
                    const auto part = moment_or_divergence(deg, coeff);
                    if (!part) {
                        if (coeff < 0) return Integral::neg_inf();
                        throw MeasureDomainError("integrate: series diverges to +infinity");
                    }
                    total += *part;
                }
                acc += Scalar::approx(total);
                return Integral::of(acc);
            }
            case PotentialTail::Kind::Log:
                acc += Scalar::approx(tail.log_coeff * c * power_log_sum(s, from));
                return Integral::of(acc);
            case PotentialTail::Kind::LogWeightGeometric: {
                const double a0 = std::log(to_double(tail.lwg_coeff));
                const double a1 = std::log(to_double(tail.lwg_ratio));  // < 0
                const auto m0 = moment_or_divergence(0.0, a0);
                const auto m1 = moment_or_divergence(1.0, a1);
                if (!m1) return Integral::neg_inf();  // a1 < 0 always
                if (!m0) {
                    if (a0 < 0) return Integral::neg_inf();
                    throw MeasureDomainError("integrate: series diverges to +infinity");
                }
                acc += Scalar::approx(*m0 + *m1);
                return Integral::of(acc);
            }
        }
        return Integral::of(acc);
    }

    /// Entry (i, j) of P^k (Scalar algebra: exact for rational chains).
    Scalar markov_power_entry(std::uint64_t k, std::size_t i, std::size_t j) const {
        const std::size_t S = support_.size();
        std::vector<Scalar> row(S, Scalar(Rat(0)));
        row[i] = Scalar(Rat(1));
        for (std::uint64_t t = 0; t < k; ++t) {
            std::vector<Scalar> nxt(S, Scalar(Rat(0)));
            for (std::size_t x = 0; x < S; ++x) {
                if (row[x].value() == 0) continue;
                for (std::size_t y = 0; y < S; ++y) nxt[y] += row[x] * P_[x][y];
            }
            row.swap(nxt);
        }
        return row[j];
    }

    static void collect_depth1(const Measure& m, double scale, std::map<Symbol, double>& dist) {
        switch (m.kind_) {
            case Kind::Periodic: {
                for (Symbol s : m.cycle_)
                    if (s != kInf) dist[s] += scale / m.cycle_.size();
                return;
            }
            case Kind::FiniteMarkov: {
                for (std::size_t i = 0; i < m.support_.size(); ++i)
                    dist[m.support_[i]] += scale * m.pi_[i].value();
                return;
            }
            case Kind::Bernoulli: {
                // head plus enough of the tail for a 1e-15 cutoff
                for (auto& [s, w] : m.bhead_) dist[s] += scale * to_double(w);
                if (m.btail_ == BTail::None) return;
                for (Symbol s = m.btail_start_;; ++s) {
                    const double w = m.bernoulli_weight(s).value();
                    if (m.bhead_.count(s)) continue;
                    dist[s] += scale * w;
                    if (w < 1e-15 || s > m.btail_start_ + 100000) return;
                }
            }
            case Kind::DiracInfinity:
                return;
            case Kind::Combo:
                for (auto& [w, part] : m.parts_)
                    collect_depth1(*part, scale * to_double(w), dist);
                return;
        }
    }
};

/// Orbit-average measure of a cyclically admissible word.
inline Measure periodic_measure(const ShiftPresentation& shift, const BarWord& cycle) {
    return Measure::periodic(shift, cycle);
}

/// Positive combination with explicit weights (see Measure::combo).
inline Measure convex_combo(const std::vector<Rat>& weights, const std::vector<Measure>& parts) {
    if (weights.size() != parts.size())
        throw MeasureDomainError("convex_combo: weight/part count mismatch");
    std::vector<std::pair<Rat, Measure>> zipped;
    for (std::size_t i = 0; i < parts.size(); ++i) zipped.emplace_back(weights[i], parts[i]);
    return Measure::combo(zipped);
}

}  // namespace cms
