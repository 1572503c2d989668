#pragma once

/**
 * @file thermo.hpp
 * @brief Pressure, the finiteness threshold s_inf, escape-pressure lower
 *        bounds, the dual variational principle verifier, and the two
 *        potential constructions used by the equilibrium statements.
 *
 * Pressure methods, ordered by rigor:
 *   - closed form (full shift, depth-1): P = log sum_n e^{phi|[n]}, exact
 *     when the weights are rational;
 *   - loop generating function: P = -log x* with sum_n A_n(phi) x^n = 1,
 *     where A_n collects e^{loop sum} over the simple loops of length n
 *     (root bracketing to machine precision);
 *   - truncation: certified leading eigenvalues of the restrictions to the
 *     first K symbols, nondecreasing in K, with a Cauchy stop;
 *   - partition sums: weighted closed-walk counts Z_n at a base symbol.
 *     Each (1/n) log Z_n is a certified lower bound; the headline value is
 *     the consecutive-ratio estimate log(Z_n/Z_{n-1}), which converges
 *     geometrically on primitive graphs while the raw quotients trail by
 *     O(1/n).
 */

#include "cms/measure.hpp"
#include "cms/potential.hpp"
#include "cms/properties.hpp"
#include "cms/rng.hpp"
#include "cms/topology.hpp"
#include "cms/transfer.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace cms {

struct HypothesisViolated : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct NotEscaping : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct TailSeriesDiverges : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class PressureMethod { Auto, ClosedForm, LoopGeneratingFunction, Truncation, PartitionSum };

struct PressureEstimate {
    double value = 0;                      // +infinity when diverged
    bool diverged = false;
    PressureMethod method = PressureMethod::Auto;
    enum class ErrorKind { TwoSided, OneSidedLower, Exact } error_kind = ErrorKind::TwoSided;
    double error_bound = 0;                // for TwoSided
    std::vector<std::pair<double, double>> table;  // (step parameter, value)
    double certified_lower = -std::numeric_limits<double>::infinity();
    std::string note;
};

struct TruncationParams {
    std::size_t K_start = 2;
    std::size_t K_step = 2;
    std::size_t K_max = 40;
    double cauchy_tol = 1e-6;
    double ceiling = 50.0;   // declared divergence: values past this, still rising
};

namespace detail {

/// Loop systems admit the generating-function method when the potential is
/// constant across midpoints: value u at the base, v on every midpoint.
struct LoopPotentialSplit {
    double base = 0;
    double mid = 0;
};

inline std::optional<LoopPotentialSplit> split_loop_potential(const Potential& phi) {
    if (phi.depth() != 1) return std::nullopt;
    LoopPotentialSplit s;
    bool base_seen = false;
    std::optional<double> mid;
    for (auto& [w, hv] : phi.head()) {
        if (w.front() == 0) {
            s.base = hv.value;
            base_seen = true;
        } else if (!mid) {
            mid = hv.value;
        } else if (*mid != hv.value) {
            return std::nullopt;
        }
    }
    const auto& tail = phi.tail();
    if (tail.kind == PotentialTail::Kind::Poly && tail.c1 == 0 && tail.c2 == 0) {
        if (mid && *mid != tail.c0) return std::nullopt;
        s.mid = tail.c0;
    } else if (tail.kind == PotentialTail::Kind::None) {
        s.mid = mid.value_or(0.0);
    } else {
        return std::nullopt;
    }
    if (!base_seen) s.base = s.mid;
    return s;
}

/// sum over loop lengths of A_n x^n with A_n = a_n e^{u + (n-1) v}; requires
/// all counts finite. Exact head lengths plus the closed-form constant tail.
inline double loop_gf(const ShiftPresentation& shift, const LoopPotentialSplit& s, double x) {
    const auto& d = shift.loops();
    const double ev = std::exp(s.mid);
    double total = 0;
    for (auto& [len, cnt] : d.head) {
        if (!cnt.positive()) continue;
        const double weight = std::exp(s.base + (static_cast<double>(len) - 1) * s.mid);
        total += static_cast<double>(cnt.n) * weight * std::pow(x, static_cast<double>(len));
    }
    switch (d.tail.kind) {
        case LoopTail::Kind::Zero:
            break;
        case LoopTail::Kind::Constant: {
            // sum_{n > h} c e^{u+(n-1)v} x^n, geometric in (x e^v)
            const double q = x * ev;
            if (q >= 1.0) return std::numeric_limits<double>::infinity();
            const double c = static_cast<double>(d.tail.constant.n);
            const double h = static_cast<double>(d.head_max);
            total += c * std::exp(s.base - s.mid) * std::pow(q, h + 1) / (1 - q);
            break;
        }
        case LoopTail::Kind::Exponential: {
            const double q = x * ev * d.tail.base;
            if (q >= 1.0) return std::numeric_limits<double>::infinity();
            const double h = static_cast<double>(d.head_max);
            total += std::exp(s.base - s.mid) * std::pow(q, h + 1) / (1 - q);
            break;
        }
        case LoopTail::Kind::Superexponential:
            return std::numeric_limits<double>::infinity();
    }
    return total;
}

inline bool loop_counts_all_finite(const ShiftPresentation& shift) {
    const auto& d = shift.loops();
    for (auto& [len, cnt] : d.head)
        if (cnt.infinite) return false;
    if (d.tail.kind == LoopTail::Kind::Constant && d.tail.constant.infinite) return false;
    return true;
}

}  // namespace detail

/// Pressure by the loop generating function: -log of the root of G(x) = 1.
inline PressureEstimate pressure_loop_gf(const ShiftPresentation& shift, const Potential& phi) {
    PressureEstimate est;
    est.method = PressureMethod::LoopGeneratingFunction;
    if (shift.kind() != ShiftPresentation::Kind::LoopSystem)
        throw PotentialDomainError("loop generating function needs a loop system");
    const auto split = detail::split_loop_potential(phi);
    if (!split)
        throw TailSeriesDiverges(
            "loop method supports potentials constant across midpoints only");
    if (!detail::loop_counts_all_finite(shift)) {
        est.diverged = true;
        est.value = std::numeric_limits<double>::infinity();
        est.note = "a loop length carries infinitely many loops";
        return est;
    }
    if (shift.loops().tail.kind == LoopTail::Kind::Superexponential) {
        est.diverged = true;
        est.value = std::numeric_limits<double>::infinity();
        est.note = "loop counts grow superexponentially";
        return est;
    }
    // G is increasing with G(0) = 0 and G -> infinity approaching the radius,
    // so the root is bracketed by doubling then bisection
    auto G = [&](double x) { return detail::loop_gf(shift, *split, x); };
    double hi = 1e-9;
    while (G(hi) < 1.0 && hi < 1e12) hi *= 2;
    if (hi >= 1e12) throw TailSeriesDiverges("generating function never reaches 1");
    double lo = hi / 2;
    if (G(lo) >= 1.0) lo = 0;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        (G(mid) < 1.0 ? lo : hi) = mid;
    }
    const double root = 0.5 * (lo + hi);
    est.value = -std::log(root);
    est.error_kind = PressureEstimate::ErrorKind::TwoSided;
    est.error_bound = std::fabs(std::log(hi) - std::log(lo));
    est.certified_lower = -std::log(hi);
    est.table.push_back({root, est.value});
    return est;
}

/// Pressure by certified eigenvalues of growing finite restrictions.
inline PressureEstimate pressure_truncation(const ShiftPresentation& shift, const Potential& phi,
                                            const TruncationParams& params = {}) {
    PressureEstimate est;
    est.method = PressureMethod::Truncation;
    double prev = -std::numeric_limits<double>::infinity();
    for (std::size_t K = params.K_start; K <= params.K_max; K += params.K_step) {
        const auto symbols = shift.first_symbols(K);
        PerronBounds pb;
        try {
            pb = restricted_pressure(shift, symbols, LocalWeight::of(phi));
        } catch (const NotIrreducible&) {
            continue;  // restriction too small to hold a cycle yet
        }
        const double value = pb.log_mid();
        if (value < prev - 1e-9)
            throw std::logic_error("truncation pressure decreased; restriction bug");
        est.table.push_back({static_cast<double>(K), value});
        est.value = value;
        est.certified_lower = pb.log_lo;
        est.error_bound = std::fabs(value - prev);
        if (std::fabs(value - prev) < params.cauchy_tol) {
            est.error_kind = PressureEstimate::ErrorKind::TwoSided;
            est.error_bound = std::fabs(value - prev) + pb.width();
            return est;
        }
        if (value > params.ceiling && value > prev) {
            est.diverged = true;
            est.value = std::numeric_limits<double>::infinity();
            est.note = "truncation values passed the ceiling and keep rising";
            return est;
        }
        prev = value;
        if (symbols.size() < K) break;  // alphabet exhausted: the value is exact
    }
    est.error_kind = PressureEstimate::ErrorKind::OneSidedLower;
    est.note = est.note.empty() ? "no Cauchy stop within the truncation schedule" : est.note;
    return est;
}

/// Weighted closed-walk sums at a base symbol: certified lower bounds plus a
/// ratio-extrapolated headline value.
inline PressureEstimate pressure_partition_sum(const ShiftPresentation& shift,
                                               const Potential& phi, Symbol base,
                                               std::size_t n_max = 30) {
    PressureEstimate est;
    est.method = PressureMethod::PartitionSum;
    if (phi.depth() != 1)
        throw PotentialDomainError("partition sums implemented for depth-1 potentials");
    std::vector<double> Z(n_max + 1, 0.0);

    switch (shift.kind()) {
        case ShiftPresentation::Kind::LoopSystem: {
            if (base != 0)
                throw PotentialDomainError("loop-system partition sums anchor at the base vertex");
            const auto split = detail::split_loop_potential(phi);
            if (!split)
                throw PotentialDomainError("loop-system partition sums need a split potential");
            if (!detail::loop_counts_all_finite(shift)) {
                est.diverged = true;
                est.value = std::numeric_limits<double>::infinity();
                return est;
            }
            // first-return decomposition: z_n = sum_l A_l z_{n-l}, z_0 = 1
            std::vector<double> z(n_max + 1, 0.0);
            z[0] = 1.0;
            auto loop_weight = [&](std::uint64_t len) {
                const auto cnt = shift.loop_count(len);
                if (!cnt.positive()) return 0.0;
                return static_cast<double>(cnt.n) *
                       std::exp(split->base + (static_cast<double>(len) - 1) * split->mid);
            };
            for (std::size_t n = 1; n <= n_max; ++n)
                for (std::size_t l = 1; l <= n; ++l) z[n] += loop_weight(l) * z[n - l];
            Z = z;
            break;
        }
        case ShiftPresentation::Kind::FiniteMatrix: {
            const auto symbols = shift.matrix().alphabet;
            const auto g = transfer_graph(shift, symbols, LocalWeight::of(phi));
            std::size_t bi = 0;
            for (; bi < g.states.size(); ++bi)
                if (g.states[bi].front() == base) break;
            if (bi == g.states.size())
                throw PotentialDomainError("base symbol not in the alphabet");
            std::vector<double> row(g.states.size(), 0.0);
            row[bi] = 1.0;
            for (std::size_t n = 1; n <= n_max; ++n) {
                std::vector<double> nxt(row.size(), 0.0);
                for (std::size_t i = 0; i < row.size(); ++i) {
                    if (row[i] == 0) continue;
                    for (std::size_t j = 0; j < row.size(); ++j)
                        if (g.W[i][j] > 0) nxt[j] += row[i] * g.W[i][j];
                }
                row.swap(nxt);
                Z[n] = row[bi];
            }
            break;
        }
        case ShiftPresentation::Kind::FullShift: {
            const auto sum = phi.exp_sum_full_shift(1.0);
            if (!sum.finite) {
                est.diverged = true;
                est.value = std::numeric_limits<double>::infinity();
                return est;
            }
            const double S = sum.value.value();
            const double wa = std::exp(phi.value({base}));
            for (std::size_t n = 1; n <= n_max; ++n)
                Z[n] = wa * std::pow(S, static_cast<double>(n - 1));
            break;
        }
        case ShiftPresentation::Kind::RuleGraph:
            throw PotentialDomainError("partition sums not wired for rule graphs");
    }

    for (std::size_t n = 1; n <= n_max; ++n) {
        if (Z[n] <= 0) continue;
        const double raw = std::log(Z[n]) / static_cast<double>(n);
        est.table.push_back({static_cast<double>(n), raw});
        est.certified_lower = std::max(est.certified_lower, raw);
    }
    // headline: consecutive-ratio estimate at the largest n with Z > 0
    est.error_kind = PressureEstimate::ErrorKind::OneSidedLower;
    est.value = est.certified_lower;
    for (std::size_t n = n_max; n >= 2; --n) {
        if (Z[n] > 0 && Z[n - 1] > 0) {
            est.value = std::log(Z[n] / Z[n - 1]);
            est.note = "headline value is the ratio estimate log(Z_n/Z_{n-1}); "
                       "table rows are certified lower bounds";
            break;
        }
    }
    return est;
}

/// Pressure with the method hierarchy: closed form, loop generating
/// function, then truncation.
inline PressureEstimate pressure(const ShiftPresentation& shift, const Potential& phi,
                                 PressureMethod method = PressureMethod::Auto,
                                 const TruncationParams& params = {}) {
    switch (method) {
        case PressureMethod::ClosedForm: {
            PressureEstimate est;
            est.method = PressureMethod::ClosedForm;
            if (shift.kind() != ShiftPresentation::Kind::FullShift || phi.depth() != 1)
                throw PotentialDomainError(
                    "closed form applies to depth-1 potentials on the full shift");
            const auto sum = phi.exp_sum_full_shift(1.0);
            if (!sum.finite) {
                est.diverged = true;
                est.value = std::numeric_limits<double>::infinity();
                est.note = "e^{phi} weights are not summable";
                return est;
            }
            est.value = std::log(sum.value.value());
            est.error_kind = sum.value.is_exact() ? PressureEstimate::ErrorKind::Exact
                                                  : PressureEstimate::ErrorKind::TwoSided;
            est.error_bound = sum.value.is_exact() ? 0.0 : 1e-12;
            est.certified_lower = est.value;
            return est;
        }
        case PressureMethod::LoopGeneratingFunction:
            return pressure_loop_gf(shift, phi);
        case PressureMethod::Truncation:
            return pressure_truncation(shift, phi, params);
        case PressureMethod::PartitionSum: {
            const Symbol base = shift.kind() == ShiftPresentation::Kind::FiniteMatrix
                                    ? shift.matrix().alphabet.front()
                                    : (shift.kind() == ShiftPresentation::Kind::FullShift ? 1 : 0);
            return pressure_partition_sum(shift, phi, base);
        }
        case PressureMethod::Auto:
            break;
    }
    switch (shift.kind()) {
        case ShiftPresentation::Kind::FullShift:
            if (phi.depth() == 1 && phi.tail().kind != PotentialTail::Kind::None)
                return pressure(shift, phi, PressureMethod::ClosedForm);
            return pressure_truncation(shift, phi, params);
        case ShiftPresentation::Kind::LoopSystem:
            if (detail::split_loop_potential(phi))
                return pressure_loop_gf(shift, phi);
            return pressure_truncation(shift, phi, params);
        case ShiftPresentation::Kind::FiniteMatrix:
        case ShiftPresentation::Kind::RuleGraph:
            return pressure_truncation(shift, phi, params);
    }
    return pressure_truncation(shift, phi, params);
}

// ---------------------------------------------------------------------------
// s_inf: the finiteness threshold of t -> P(t phi)

struct SInfinityResult {
    double value = 0;
    enum class Edge { None, Zero, One } edge = Edge::None;
    bool heuristic_oracle = false;  // true when finiteness came from truncation growth
    std::string note;
};

inline SInfinityResult s_infinity(const ShiftPresentation& shift, const Potential& phi,
                                  double tol = 1e-3) {
    SInfinityResult out;
    auto classify = [&](double s) {
        if (s <= tol) { out.edge = SInfinityResult::Edge::Zero; out.value = 0.0; }
        else if (std::fabs(s - 1.0) <= tol) { out.edge = SInfinityResult::Edge::One; out.value = 1.0; }
        else out.value = s;
        return out;
    };
    // exact symbolic answers where the finiteness oracle is closed-form
    if (shift.kind() == ShiftPresentation::Kind::FullShift && phi.depth() == 1) {
        const auto& tail = phi.tail();
        switch (tail.kind) {
            case PotentialTail::Kind::Log: {
                // finite iff t * coeff < -1
                if (tail.log_coeff >= 0) {
                    out.note = "P(t phi) is infinite for every t >= 0";
                    out.heuristic_oracle = false;
                    out.edge = SInfinityResult::Edge::One;
                    out.value = std::numeric_limits<double>::infinity();
                    return out;
                }
                return classify(1.0 / -tail.log_coeff);
            }
            case PotentialTail::Kind::Poly:
                if (tail.c2 < 0 || (tail.c2 == 0 && tail.c1 < 0)) return classify(0.0);
                out.edge = SInfinityResult::Edge::One;
                out.value = std::numeric_limits<double>::infinity();
                out.note = "weights do not decay; P(t phi) infinite for t >= 0";
                return out;
            case PotentialTail::Kind::LogWeightGeometric:
                return classify(0.0);  // geometric decay: finite for every t > 0
            case PotentialTail::Kind::None:
                break;
        }
    }
    if (shift.kind() == ShiftPresentation::Kind::FiniteMatrix) return classify(0.0);
    if (shift.kind() == ShiftPresentation::Kind::LoopSystem) {
        if (!detail::loop_counts_all_finite(shift) ||
            shift.loops().tail.kind == LoopTail::Kind::Superexponential) {
            out.edge = SInfinityResult::Edge::One;
            out.value = std::numeric_limits<double>::infinity();
            out.note = "topological entropy is infinite; P(t phi) never finite";
            return out;
        }
        if (detail::split_loop_potential(phi)) return classify(0.0);  // finite radius for all t
    }
    // bisection on a heuristic truncation-growth oracle
    if (phi.depth() != 1)
        throw PotentialDomainError(
            "s_infinity: no finiteness oracle for deep potentials on this presentation");
    out.heuristic_oracle = true;
    out.note = "finiteness decided by truncation growth against the ceiling";
    auto looks_finite = [&](double t) {
        std::map<Symbol, HeadValue> head;
        for (auto& [w, hv] : phi.head()) head[w.front()] = {t * hv.value, std::nullopt};
        PotentialTail tail = phi.tail();
        tail.c0 *= t; tail.c1 *= t; tail.c2 *= t; tail.log_coeff *= t;
        const Potential tphi = Potential::depth1(std::move(head), tail, phi.var_bound());
        const auto est = pressure_truncation(shift, tphi);
        return !est.diverged;
    };
    double lo = 0.0, hi = 1.0;
    if (looks_finite(0.0 + tol / 2)) return classify(0.0);
    if (!looks_finite(1.0)) {
        out.edge = SInfinityResult::Edge::One;
        out.value = 1.0;
        return out;
    }
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        (looks_finite(mid) ? hi : lo) = mid;
    }
    return classify(0.5 * (lo + hi));
}

// ---------------------------------------------------------------------------
// escape-pressure lower bounds

struct EscapePressureBound {
    double lower_bound = -std::numeric_limits<double>::infinity();
    std::vector<double> free_energies;  // h + integral per sequence element
    std::string note;
};

/// limsup of free energies along a sequence that escapes completely; always
/// an explicit lower bound for the pressure at infinity.
inline EscapePressureBound pressure_at_infinity_lower(const ShiftPresentation& shift,
                                                      const std::vector<Measure>& sequence,
                                                      const Potential& phi,
                                                      const MetricConfig& cfg = {}) {
    const auto rep = diagnose_convergence(shift, sequence, cfg);
    if (rep.classification != LimitClass::TotalEscape)
        throw NotEscaping("sequence does not converge to the point mass at infinity (" +
                          limit_class_to_string(rep.classification) + ")");
    EscapePressureBound out;
    for (const auto& mu : sequence) {
        const auto integral = mu.integrate(phi);
        if (integral.minus_infinity) {
            out.free_energies.push_back(-std::numeric_limits<double>::infinity());
            continue;
        }
        out.free_energies.push_back(mu.entropy().value() + integral.value.value());
    }
    // limsup estimate: extrapolate the trend (exact for geometric approach)
    bool all_finite = true;
    for (double v : out.free_energies) all_finite = all_finite && std::isfinite(v);
    out.lower_bound = all_finite ? detail::extrapolate(out.free_energies)
                                 : -std::numeric_limits<double>::infinity();
    out.note = "limsup estimate along one escaping sequence; a lower bound for the "
               "pressure at infinity";
    return out;
}

// ---------------------------------------------------------------------------
// dual variational principle

struct DualityReport {
    double target = 0;        // h(mu) + integral(phi)
    double inf_achieved = 0;  // best P(phi+g) - integral(g) found
    double gap = 0;           // inf_achieved - target (>= -eps_num always)
    std::vector<std::pair<Word, double>> certificate;  // best g coefficients
    double min_margin = 0;    // min over evaluations of objective - target
    std::size_t evaluations = 0;
    std::string note;
};

struct DualVpFamily {
    int depth = 2;               // indicator depth k
    std::size_t symbol_cap = 8;  // indicators on words over the first K symbols
    double box = 0;              // 0: use 10 (1 + |P(phi)|)
};

struct DualVpParams {
    std::uint64_t seed = 7;
    int restarts = 3;
    int sweeps = 60;
    double eps_num = 1e-10;
};

inline DualityReport dual_vp_check(const ShiftPresentation& shift, const Potential& phi,
                                   const Measure& mu, const DualVpFamily& family = {},
                                   const DualVpParams& params = {}) {
    // the duality statement's hypotheses, all checked up front
    if (!(phi.sup() < std::numeric_limits<double>::infinity()))
        throw HypothesisViolated("sup phi = infinity");
    const auto p0 = pressure(shift, phi);
    if (p0.diverged) throw HypothesisViolated("P(phi) = infinity");
    const auto s = s_infinity(shift, phi);
    if (!(s.value < 1.0) || s.edge == SInfinityResult::Edge::One)
        throw HypothesisViolated("s_inf(phi) >= 1");
    const auto integral = mu.integrate(phi);
    if (integral.minus_infinity) throw HypothesisViolated("integral(phi) d mu = -infinity");

    if (shift.kind() != ShiftPresentation::Kind::FiniteMatrix)
        throw HypothesisViolated(
            "the optimizer needs a finite alphabet (truncate the shift first)");

    DualityReport rep;
    rep.target = mu.entropy().value() + integral.value.value();

    // indicator family: admissible depth-k words over the first K symbols
    std::vector<Symbol> symbols = shift.first_symbols(family.symbol_cap);
    std::vector<Word> basis;
    Word cur;
    detail::enumerate_blocks(shift, symbols, family.depth, cur, basis);
    const double box = family.box > 0 ? family.box : 10.0 * (1.0 + std::fabs(p0.value));

    const int comb_depth = std::max(phi.depth(), family.depth);
    std::vector<double> coeff(basis.size(), 0.0);
    auto g_of = [&](const Word& w) {
        Word key(w.begin(), w.begin() + family.depth);
        for (std::size_t b = 0; b < basis.size(); ++b)
            if (basis[b] == key) return coeff[b];
        return 0.0;
    };
    LocalWeight combined{comb_depth, [&](const Word& w) { return phi.value(w) + g_of(w); }};

    std::vector<double> mu_mass(basis.size());
    for (std::size_t b = 0; b < basis.size(); ++b) mu_mass[b] = mu.mass(basis[b]).value();

    auto objective = [&]() {
        const auto pb = restricted_pressure(shift, shift.matrix().alphabet, combined);
        double g_int = 0;
        for (std::size_t b = 0; b < basis.size(); ++b) g_int += coeff[b] * mu_mass[b];
        const double val = pb.log_mid() - g_int;
        ++rep.evaluations;
        const double margin = val - rep.target;
        if (rep.evaluations == 1 || margin < rep.min_margin) rep.min_margin = margin;
        if (margin < -params.eps_num)
            throw std::logic_error("duality violated beyond numerical tolerance");
        return val;
    };

    double best = objective();  // g = 0
    std::vector<double> best_coeff = coeff;
    Rng rng(params.seed);
    for (int restart = 0; restart <= params.restarts; ++restart) {
        if (restart == 0) {
            std::fill(coeff.begin(), coeff.end(), 0.0);
        } else {
            for (auto& c : coeff) c = (2.0 * rng.next_unit() - 1.0) * box * 0.5;
        }
        double cur_val = objective();
        double step = box / 4;
        for (int sweep = 0; sweep < params.sweeps && step > 1e-12; ++sweep) {
            bool improved = false;
            for (std::size_t b = 0; b < basis.size(); ++b) {
                for (double dir : {+1.0, -1.0}) {
                    const double saved = coeff[b];
                    coeff[b] = std::clamp(saved + dir * step, -box, box);
                    if (coeff[b] == saved) continue;
                    const double cand = objective();
                    if (cand < cur_val - 1e-15) {
                        cur_val = cand;
                        improved = true;
                    } else {
                        coeff[b] = saved;
                    }
                }
            }
            if (!improved) step *= 0.5;
        }
        if (cur_val < best) {
            best = cur_val;
            best_coeff = coeff;
        }
    }
    rep.inf_achieved = best;
    rep.gap = best - rep.target;
    for (std::size_t b = 0; b < basis.size(); ++b)
        rep.certificate.emplace_back(basis[b], best_coeff[b]);
    rep.note = "family: depth-" + std::to_string(family.depth) + " indicators, box " +
               double_to_string(box);
    return rep;
}

// ---------------------------------------------------------------------------
// the log-mass potential construction

struct InfinitePartitionEntropy : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct NullWeightsDiverge : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct PsiConstruction {
    Potential psi;
    double pressure_value = 0;        // log(1 + sum of null weights), closed form
    Scalar one_plus_null_sum{Rat(1)}; // the exact quantity under the log
    double integral = 0;              // = -H_mu(depth-1 partition)
};

/**
 * The potential psi|[n] = log mu([n]) on charged symbols and log a_n on null
 * symbols, for a full-shift measure with finite depth-1 partition entropy
 * and summable positive null weights a_n = coeff * ratio^n. Its full-shift
 * pressure is log(1 + sum_null a_n) and its integral against mu is exactly
 * minus the partition entropy.
 */
inline PsiConstruction construct_psi(const Measure& mu, Rat null_coeff, Rat null_ratio) {
    if (null_ratio <= 0 || null_ratio >= 1 || null_coeff <= 0)
        throw NullWeightsDiverge("null weights must be a summable geometric family");
    const auto H = mu.partition_entropy();
    if (!H.finite) throw InfinitePartitionEntropy("partition entropy is infinite");
    if (mu.kind() == Measure::Kind::DiracInfinity || mu.mass_at_infinity().value() > 0)
        throw InfinitePartitionEntropy(
            "construct_psi applies to measures of the uncompactified shift");

    // Case 1: a geometric product measure. Every symbol is charged and the
    // log-masses form a single log-weight tail, so the pressure sum is the
    // total mass: exactly 1, giving pressure exactly 0.
    if (const auto tail = mu.bernoulli_geometric_tail()) {
        std::map<Symbol, HeadValue> head;
        Scalar null_sum{Rat(0)};
        for (Symbol s = 1; s < tail->start; ++s) {
            const auto it = mu.bernoulli_head().find(s);
            const Rat w = it == mu.bernoulli_head().end() ? Rat(0) : it->second;
            if (w > 0) {
                head[s] = {std::log(to_double(w)), w};
            } else {
                const Rat a = null_coeff * rat_pow(null_ratio, static_cast<long long>(s));
                head[s] = {std::log(to_double(a)), a};
                null_sum += Scalar(a);
            }
        }
        PsiConstruction out{
            Potential::depth1(std::move(head), PotentialTail::log_weight(tail->coeff, tail->ratio)),
            0.0, Scalar(Rat(1)), 0.0};
        out.one_plus_null_sum = Scalar(Rat(1)) + null_sum;
        const auto exp_sum = out.psi.exp_sum_full_shift(1.0);
        if (!exp_sum.finite) throw NullWeightsDiverge("pressure sum diverged");
        if (exp_sum.value.is_exact() && out.one_plus_null_sum.is_exact() &&
            !(exp_sum.value.rational() == out.one_plus_null_sum.rational()))
            throw std::logic_error("construct_psi: closed form and series disagree");
        out.pressure_value = std::log(exp_sum.value.value());
        out.integral = mu.integrate(out.psi).value.value();
        return out;
    }

    // Case 2: finitely many charged symbols. Log-mass head on charged
    // symbols, log-null-weight values elsewhere, geometric null tail.
    const auto charged_max = mu.max_charged_symbol();
    if (!charged_max)
        throw InfinitePartitionEntropy(
            "construct_psi: charged set is infinite but not a geometric family");
    std::map<Symbol, HeadValue> head;
    Scalar null_sum{Rat(0)};
    for (Symbol s = 1; s <= *charged_max; ++s) {
        const Scalar w = mu.mass(BarWord{s});
        if (!w.is_exact())
            throw InfinitePartitionEntropy("construct_psi needs exact depth-1 masses");
        const Rat q = w.rational();
        if (q > 0) {
            head[s] = {std::log(to_double(q)), q};
        } else {
            const Rat a = null_coeff * rat_pow(null_ratio, static_cast<long long>(s));
            head[s] = {std::log(to_double(a)), a};
            null_sum += Scalar(a);
        }
    }
    null_sum += Scalar(null_coeff * geometric_sum(null_ratio, *charged_max + 1));
    PsiConstruction out{
        Potential::depth1(std::move(head), PotentialTail::log_weight(null_coeff, null_ratio)),
        0.0, Scalar(Rat(1)), 0.0};
    out.one_plus_null_sum = Scalar(Rat(1)) + null_sum;
    const auto exp_sum = out.psi.exp_sum_full_shift(1.0);
    if (!exp_sum.finite) throw NullWeightsDiverge("pressure sum diverged");
    if (exp_sum.value.is_exact() && out.one_plus_null_sum.is_exact() &&
        !(exp_sum.value.rational() == out.one_plus_null_sum.rational()))
        throw std::logic_error("construct_psi: closed form and series disagree");
    out.pressure_value = std::log(exp_sum.value.value());
    out.integral = mu.integrate(out.psi).value.value();
    return out;
}

// ---------------------------------------------------------------------------
// measures that are equilibrium states of nothing

struct CertificateInvalid : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct NonEquilibriumCertificate {
    Measure measure;
    double entropy_of_limit = 0;
    double limsup_part_entropy = 0;
    double gap = 0;  // entropy_of_limit - limsup_part_entropy > 0
    std::vector<double> weakstar_distance_to_limit;
    std::string note;
};

/**
 * The countable positive combination sum p_n mu_n of measures converging to
 * a limit of strictly larger entropy is an equilibrium measure of no bounded
 * above continuous potential. The returned certificate records the entropy
 * gap and the distance trend that together witness this.
 */
inline NonEquilibriumCertificate non_equilibrium_measure(const ShiftPresentation& shift,
                                                         const std::vector<Measure>& parts,
                                                         const std::vector<Rat>& weights,
                                                         const Measure& limit,
                                                         const MetricConfig& cfg = {}) {
    if (parts.size() != weights.size() || parts.empty())
        throw CertificateInvalid("parts/weights mismatch");
    Rat total = 0;
    for (const auto& w : weights) {
        if (w <= 0) throw CertificateInvalid("weights must be positive");
        total += w;
    }
    if (total != 1)
        throw CertificateInvalid("weights must sum to 1 exactly (fold the tail into the last)");

    NonEquilibriumCertificate cert{convex_combo(weights, parts), 0, 0, 0, {}, ""};
    cert.entropy_of_limit = limit.entropy().value();
    double limsup = -std::numeric_limits<double>::infinity();
    for (std::size_t t = parts.size() / 2; t < parts.size(); ++t)
        limsup = std::max(limsup, parts[t].entropy().value());
    cert.limsup_part_entropy = limsup;
    cert.gap = cert.entropy_of_limit - cert.limsup_part_entropy;
    for (const auto& p : parts)
        cert.weakstar_distance_to_limit.push_back(weakstar_distance(shift, p, limit, cfg).value);
    if (!(cert.gap > 1e-9))
        throw CertificateInvalid("no entropy gap: lim h(mu_n) must stay below h(limit)");
    cert.note = "free energies along the parts stay a gap below the limit's, so no bounded-above "
                "continuous potential attains its pressure on this combination";
    return cert;
}

}  // namespace cms
