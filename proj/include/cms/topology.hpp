#pragma once

/**
 * @file topology.hpp
 * @brief Canonical metrization of the two convergence notions for invariant
 *        (sub-)measures, and the limit-classification diagnostics.
 *
 * A MetricConfig fixes a deterministic cylinder enumeration: lengths
 * ascending, words lexicographic within a length, coordinates running over
 * the first `symbol_cap` alphabet symbols (with the added symbol placed
 * after the cap when compactified cylinders are requested). Inadmissible
 * words name empty cylinders and are skipped. The i-th enumerated cylinder
 * carries weight 2^{-i}, so
 *
 *     dist(mu, nu) = sum_i 2^{-i} |mu(C_i) - nu(C_i)|
 *
 * truncated after `max_cylinders` terms with tail bound 2^{-stop}. Plain
 * cylinders metrize convergence on cylinders; compactified cylinders
 * metrize weak* convergence for measures of the compactified system (their
 * finite-word masses already determine the rest through invariance).
 *
 * All quantitative rates reported here are artifacts of this configuration
 * and are labeled with its parameters.
 *
 * diagnose_convergence fits per-cylinder limits of a measure sequence,
 * extrapolates the retained depth-1 mass to estimate the escape parameter
 * lambda, and classifies the limit: a probability measure, a genuine
 * sub-probability (escape of mass), total escape to the point mass at
 * infinity, or a finitely additive limit that is not countably additive
 * (detected by a depth-1 additivity defect in the fitted limits; such
 * limits fall outside the convex hull of the shift's measures and the
 * point mass at infinity).
 */

#include "cms/measure.hpp"
#include "cms/shift.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace cms {

struct MetricConfig {
    int depth = 6;                  // maximal cylinder length
    std::size_t symbol_cap = 8;     // coordinates range over this many symbols
    std::size_t max_cylinders = 256;
    double cauchy_tol = 1e-6;       // per-cylinder convergence tolerance
    double additivity_tol = 0.05;   // depth-1 defect that flags finite additivity
    double lambda_tol = 1e-6;
};

struct DistanceResult {
    double value = 0;
    double tail_bound = 0;       // weight not examined: 2^{-#terms}
    std::size_t cylinders = 0;   // terms actually summed
};

namespace detail {

/// Enumerated cylinders for a config: admissible words only, deterministic.
inline std::vector<BarWord> enumerate_cylinders(const ShiftPresentation& shift,
                                                const MetricConfig& cfg, bool with_infinity) {
    std::vector<Symbol> symbols = shift.first_symbols(cfg.symbol_cap);
    if (with_infinity) symbols.push_back(kInf);
    std::vector<BarWord> out;
    BarWord w;
    auto admissible = [&](const BarWord& cand) {
        return with_infinity ? shift.is_bar_admissible(cand)
                             : (word_is_finite(cand) && shift.is_admissible(cand));
    };
    std::function<void(int)> rec = [&](int len) {
        if (out.size() >= cfg.max_cylinders) return;
        if (len == 0) {
            if (admissible(w)) out.push_back(w);
            return;
        }
        for (Symbol s : symbols) {
            if (out.size() >= cfg.max_cylinders) return;
            w.push_back(s);
            // prefix pruning: an inadmissible prefix has no admissible
            // extension (limits restrict coordinatewise, so this also holds
            // for the compactified alphabet)
            if (admissible(w)) rec(len - 1);
            w.pop_back();
        }
    };
    for (int len = 1; len <= cfg.depth && out.size() < cfg.max_cylinders; ++len) {
        w.clear();
        rec(len);
    }
    return out;
}

using MassFn = std::function<double(const BarWord&)>;

inline DistanceResult weighted_distance(const std::vector<BarWord>& cylinders,
                                        const MassFn& mu, const MassFn& nu) {
    DistanceResult r;
    double weight = 0.5;
    for (const auto& c : cylinders) {
        r.value += weight * std::fabs(mu(c) - nu(c));
        weight *= 0.5;
        ++r.cylinders;
    }
    r.tail_bound = weight * 2.0;  // sum of the remaining geometric weights
    return r;
}

inline MassFn measure_fn(const Measure& m) {
    return [&m](const BarWord& c) { return m.mass(c).value(); };
}

}  // namespace detail

/// Distance in the cylinder (escape-aware) metrization: plain cylinders only.
inline DistanceResult cylinder_distance(const ShiftPresentation& shift, const Measure& mu,
                                        const Measure& nu, const MetricConfig& cfg = {}) {
    const auto cyls = detail::enumerate_cylinders(shift, cfg, false);
    return detail::weighted_distance(cyls, detail::measure_fn(mu), detail::measure_fn(nu));
}

/// Distance in the weak* metrization of the compactified system: cylinders
/// over the alphabet with the added symbol.
inline DistanceResult weakstar_distance(const ShiftPresentation& shift, const Measure& mu,
                                        const Measure& nu, const MetricConfig& cfg = {}) {
    const auto cyls = detail::enumerate_cylinders(shift, cfg, true);
    return detail::weighted_distance(cyls, detail::measure_fn(mu), detail::measure_fn(nu));
}

enum class LimitClass {
    Probability,       // lambda = 1: limit stayed a probability measure
    SubProbability,    // lambda in (0,1): escape of mass toward lambda mu
    TotalEscape,       // lambda = 0: the point mass at infinity
    OutsideConvexHull, // fitted cylinder limits are only finitely additive
};

inline std::string limit_class_to_string(LimitClass c) {
    switch (c) {
        case LimitClass::Probability: return "probability-limit";
        case LimitClass::SubProbability: return "sub-probability (escape)";
        case LimitClass::TotalEscape: return "point mass at infinity (total escape)";
        case LimitClass::OutsideConvexHull: return "outside-convex-hull (finitely additive limit)";
    }
    return "?";
}

struct NotConverged : std::runtime_error {
    explicit NotConverged(const std::string& diag)
        : std::runtime_error("sequence fails the per-cylinder Cauchy test: " + diag) {}
};

struct CylinderFit {
    BarWord cylinder;
    std::vector<double> masses;  // one per sequence element
    double fitted_limit = 0;
};

struct ConvergenceReport {
    std::vector<CylinderFit> table;       // plain cylinders up to the config depth
    double lambda = 1.0;                  // extrapolated retained depth-1 mass
    LimitClass classification = LimitClass::Probability;
    double max_additivity_defect = 0;     // depth-1 countable-additivity violation
    Symbol worst_defect_symbol = 0;
    // both metrics evaluated against the candidate lambda mu + (1-lambda) delta_inf,
    // one entry per sequence element (the two-topology consistency check)
    std::vector<double> cylinder_dist_to_candidate;
    std::vector<double> weakstar_dist_to_candidate;
    std::string note;
};

namespace detail {

/// Limit of a convergent-looking sequence: geometric extrapolation from the
/// last three terms when the decrements shrink consistently.
inline double extrapolate(const std::vector<double>& xs) {
    const std::size_t n = xs.size();
    if (n == 1) return xs[0];
    if (n == 2) return xs[1];
    const double a = xs[n - 3], b = xs[n - 2], c = xs[n - 1];
    const double d1 = b - a, d2 = c - b;
    if (std::fabs(d1) < 1e-15) return c;
    const double q = d2 / d1;
    if (q > -0.95 && q < 0.95) return c + d2 * q / (1 - q);
    return c;
}

}  // namespace detail

/**
 * Fit the limit of a measure sequence. Throws NotConverged when some
 * cylinder column keeps oscillating above the Cauchy tolerance.
 */
inline ConvergenceReport diagnose_convergence(const ShiftPresentation& shift,
                                              const std::vector<Measure>& sequence,
                                              const MetricConfig& cfg = {}) {
    if (sequence.size() < 3)
        throw std::invalid_argument("diagnose_convergence: need at least 3 measures");
    ConvergenceReport rep;
    const auto cylinders = detail::enumerate_cylinders(shift, cfg, false);
    for (const auto& c : cylinders) {
        CylinderFit fit;
        fit.cylinder = c;
        for (const auto& m : sequence) fit.masses.push_back(m.mass(c).value());
        const std::size_t T = fit.masses.size();
        const double d_last = std::fabs(fit.masses[T - 1] - fit.masses[T - 2]);
        const double d_prev = std::fabs(fit.masses[T - 2] - fit.masses[T - 3]);
        if (d_last > cfg.cauchy_tol && d_last > 0.66 * d_prev)
            throw NotConverged("cylinder " + word_to_string(c) + " moved by " +
                               double_to_string(d_last) + " in the last step");
        fit.fitted_limit = detail::extrapolate(fit.masses);
        rep.table.push_back(std::move(fit));
    }

    // lambda: extrapolated total mass retained on the first symbol_cap symbols
    const auto symbols = shift.first_symbols(cfg.symbol_cap);
    std::vector<double> retained(sequence.size(), 0.0);
    for (std::size_t t = 0; t < sequence.size(); ++t)
        for (Symbol a : symbols) retained[t] += sequence[t].mass({a}).value();
    rep.lambda = std::clamp(detail::extrapolate(retained), 0.0, 1.0);

    // depth-1 additivity of the fitted limits: m([a]) vs sum_s m([a,s])
    auto fitted = [&](const BarWord& c) -> std::optional<double> {
        for (const auto& f : rep.table)
            if (f.cylinder == c) return f.fitted_limit;
        return std::nullopt;
    };
    for (Symbol a : symbols) {
        const auto base = fitted({a});
        if (!base) continue;
        double children = 0;
        bool complete = true;
        for (Symbol s : symbols) {
            const auto child = fitted({a, s});
            if (child) children += *child;
            else if (shift.has_edge(a, s)) complete = false;
        }
        if (!complete) continue;  // truncated table: defect unknown here
        const double defect = *base - children;
        if (defect > rep.max_additivity_defect) {
            rep.max_additivity_defect = defect;
            rep.worst_defect_symbol = a;
        }
    }

    if (rep.max_additivity_defect > cfg.additivity_tol) {
        rep.classification = LimitClass::OutsideConvexHull;
        rep.note = "fitted limits lose depth-1 additivity at symbol " +
                   symbol_to_string(rep.worst_defect_symbol) + " (defect " +
                   double_to_string(rep.max_additivity_defect) + ")";
    } else if (rep.lambda <= cfg.lambda_tol) {
        rep.classification = LimitClass::TotalEscape;
    } else if (rep.lambda < 1.0 - cfg.lambda_tol) {
        rep.classification = LimitClass::SubProbability;
    } else {
        rep.classification = LimitClass::Probability;
    }

    // numeric two-topology check against the candidate lambda mu + (1-lambda) delta:
    // candidate masses come from the fitted table (zero on truncation misses)
    const double lambda = rep.lambda;
    detail::MassFn candidate_plain = [&](const BarWord& c) {
        const auto v = fitted(c);
        return v ? *v : 0.0;
    };
    detail::MassFn candidate_bar = [&](const BarWord& c) {
        if (word_is_finite(c)) return candidate_plain(c);
        const bool all_inf = std::all_of(c.begin(), c.end(), [](Symbol s) { return s == kInf; });
        return all_inf ? 1.0 - lambda : 0.0;
    };
    const auto plain_cyls = cylinders;
    const auto bar_cyls = detail::enumerate_cylinders(shift, cfg, true);
    for (const auto& m : sequence) {
        rep.cylinder_dist_to_candidate.push_back(
            detail::weighted_distance(plain_cyls, detail::measure_fn(m), candidate_plain).value);
        rep.weakstar_dist_to_candidate.push_back(
            detail::weighted_distance(bar_cyls, detail::measure_fn(m), candidate_bar).value);
    }
    return rep;
}

/// Mass kept on the finite unions K_M of the first M depth-1 cylinders.
struct EscapeProfile {
    std::vector<std::size_t> M_list;
    std::vector<std::vector<double>> masses;  // masses[i][t] = mu_t(K_{M_list[i]})
    std::vector<double> tail_infimum;         // inf over the later half of each row
};

inline EscapeProfile mass_escape_profile(const ShiftPresentation& shift,
                                         const std::vector<Measure>& sequence,
                                         const std::vector<std::size_t>& M_list) {
    EscapeProfile p;
    p.M_list = M_list;
    for (const std::size_t M : M_list) {
        const auto symbols = shift.first_symbols(M);
        std::vector<double> row;
        for (const auto& m : sequence) {
            double total = 0;
            for (Symbol a : symbols) total += m.mass({a}).value();
            row.push_back(total);
        }
        double inf = row.empty() ? 0.0 : row.back();
        for (std::size_t t = row.size() / 2; t < row.size(); ++t) inf = std::min(inf, row[t]);
        p.masses.push_back(std::move(row));
        p.tail_infimum.push_back(inf);
    }
    return p;
}

}  // namespace cms
