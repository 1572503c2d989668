#pragma once

/**
 * @file approx.hpp
 * @brief Constructive approximation: periodic orbits glued from typical
 *        segments, compactified orbit approximants, and total-escape
 *        sequences.
 *
 * Gluing: to approximate an average (1/N) sum mu_i of ergodic targets, draw
 * a Birkhoff-typical word y_i of length about n from each target, connect
 * consecutive segments with shortest admissible words, and close the
 * necklace y_1 w_1 ... y_N w_N into a periodic orbit. Segment lengths
 * dominate connector lengths, so the orbit's empirical statistics approach
 * the target average as n grows. Typicality sets are realized by seeded
 * sampling with the empirical depth-1 error recorded in the plan; the
 * distance guarantee is checked by the caller at its chosen depth.
 *
 * Compactified approximants: when word finiteness fails, a periodic word x
 * extends to orbits x...x w with an inf inside w; their measures approach
 * the measure of x at rate |w| / (k |x| + |w|).
 *
 * Escape: systems without a finite uniform Rome carry explicit orbit
 * sequences whose depth-1 masses are bounded by 2/n.
 */

#include "cms/measure.hpp"
#include "cms/properties.hpp"
#include "cms/rng.hpp"
#include "cms/shift.hpp"
#include "cms/topology.hpp"

#include <algorithm>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace cms {

struct ConnectorNotFound : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct TargetsNotFinitelySupported : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct BlockNotAdmissible : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct FPropertyHolds : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct FPropertyUndecided : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// typical words

struct TypicalWord {
    Word word;
    double depth1_error = 0;  // max |empirical - stationary| over the support
};

/// A length-`length` sample path of a stationary finite chain, seeded and
/// reproducible. The construction wants points with good Birkhoff averages,
/// so a handful of candidate paths are drawn from per-index substreams and
/// the one with the smallest depth-1 deviation wins.
inline TypicalWord typical_word(const Measure& chain, std::size_t length, std::uint64_t seed,
                                std::size_t candidates = 48) {
    if (chain.kind() != Measure::Kind::FiniteMarkov)
        throw MeasureDomainError("typical_word samples finite Markov chains");
    if (length == 0) throw std::invalid_argument("typical_word: length >= 1");
    const auto& support = chain.support();
    const auto& P = chain.transition();
    const auto& pi = chain.stationary();
    std::vector<double> pi_weights;
    for (const auto& p : pi) pi_weights.push_back(p.value());

    // test family for typicality: every charged word over the support up to
    // depth 4, weighted like the cylinder metrization, so the winning
    // candidate is the one whose empirical measure sits closest in the same
    // sense the caller will measure
    std::vector<std::tuple<Word, double, double>> tests;  // word, target mass, weight
    double test_weight = 0.5;
    std::function<void(Word&)> add_tests = [&](Word& w) {
        if (!w.empty()) {
            const double m = chain.mass(w).value();
            if (m <= 0) return;  // extensions of a null word are null
            tests.emplace_back(w, m, test_weight);
            test_weight *= 0.5;
        }
        if (w.size() == 4) return;
        for (Symbol s : support) {
            w.push_back(s);
            add_tests(w);
            w.pop_back();
        }
    };
    Word scratch;
    add_tests(scratch);

    TypicalWord best;
    double best_score = 0;
    for (std::size_t c = 0; c < std::max<std::size_t>(candidates, 1); ++c) {
        Rng rng = Rng::split(seed, /*tag=*/0x7f9c, /*index=*/c);
        std::size_t state = rng.next_weighted(pi_weights);
        TypicalWord cand;
        cand.word.reserve(length);
        for (std::size_t t = 0; t < length; ++t) {
            cand.word.push_back(support[state]);
            std::vector<double> row;
            for (const auto& p : P[state]) row.push_back(p.value());
            state = rng.next_weighted(row);
        }
        double score = 0;
        for (const auto& [w, target, weight] : tests) {
            std::size_t hits = 0;
            for (std::size_t t = 0; t + w.size() <= length; ++t) {
                bool match = true;
                for (std::size_t i = 0; i < w.size() && match; ++i)
                    match = cand.word[t + i] == w[i];
                hits += match;
            }
            const std::size_t windows = length + 1 - w.size();
            const double emp = static_cast<double>(hits) / static_cast<double>(windows);
            const double dev = std::fabs(emp - target);
            score += weight * dev;
            if (w.size() == 1) cand.depth1_error = std::max(cand.depth1_error, dev);
        }
        if (c == 0 || score < best_score) {
            best_score = score;
            best = std::move(cand);
        }
    }
    return best;
}

// ---------------------------------------------------------------------------
// gluing

struct GluingPlan {
    std::vector<Word> segments;        // y_i, one per target
    std::vector<Word> connectors;      // interior fillers between segments
    std::vector<std::size_t> offsets;  // m_k: end position of y_k w_k in the cycle
    std::vector<double> segment_depth1_errors;
    std::size_t connector_bound = 0;   // L_0: longest connector used
    Word cycle;                        // the assembled periodic word
};

struct GluedApproximation {
    Measure measure;
    GluingPlan plan;
};

/**
 * Periodic approximation of the equal-weight average of the targets by
 * gluing typical segments of length about n. Targets must be supported in a
 * common finite symbol set on which the shift is transitive.
 */
inline GluedApproximation glue_periodic_approximation(const ShiftPresentation& shift,
                                                      const std::vector<Measure>& targets,
                                                      std::size_t n, std::uint64_t seed,
                                                      std::uint64_t connector_max_len = 64) {
    if (targets.empty()) throw std::invalid_argument("gluing needs at least one target");
    GluingPlan plan;
    for (std::size_t i = 0; i < targets.size(); ++i) {
        const auto& mu = targets[i];
        switch (mu.kind()) {
            case Measure::Kind::FiniteMarkov: {
                const auto tw = typical_word(mu, std::max<std::size_t>(n, 1),
                                             Rng::split(seed, 0x91e, i).next_u64());
                plan.segments.push_back(tw.word);
                plan.segment_depth1_errors.push_back(tw.depth1_error);
                break;
            }
            case Measure::Kind::Periodic: {
                if (!word_is_finite(mu.cycle()))
                    throw TargetsNotFinitelySupported(
                        "gluing targets must live on the uncompactified shift");
                Word seg;
                while (seg.size() < n) seg.insert(seg.end(), mu.cycle().begin(), mu.cycle().end());
                plan.segments.push_back(seg);
                plan.segment_depth1_errors.push_back(0.0);
                break;
            }
            default:
                throw TargetsNotFinitelySupported(
                    "gluing targets must be periodic orbits or finite chains");
        }
    }
    // connectors: shortest words between consecutive segment boundaries
    const std::size_t N = plan.segments.size();
    for (std::size_t i = 0; i < N; ++i) {
        const Symbol from = plan.segments[i].back();
        const Symbol to = plan.segments[(i + 1) % N].front();
        if (shift.has_edge(from, to)) {
            plan.connectors.push_back({});
            continue;
        }
        const auto path = shift.connect(from, to, connector_max_len);
        if (!path || path->size() < 2)
            throw ConnectorNotFound("no admissible word from " + symbol_to_string(from) +
                                    " to " + symbol_to_string(to) + " within length " +
                                    std::to_string(connector_max_len));
        // interior of the endpoint-inclusive path
        plan.connectors.push_back(Word(path->begin() + 1, path->end() - 1));
    }
    for (const auto& w : plan.connectors)
        plan.connector_bound = std::max(plan.connector_bound, w.size());
    // assemble the necklace and record the m_k offsets
    for (std::size_t i = 0; i < N; ++i) {
        plan.cycle.insert(plan.cycle.end(), plan.segments[i].begin(), plan.segments[i].end());
        plan.cycle.insert(plan.cycle.end(), plan.connectors[i].begin(),
                          plan.connectors[i].end());
        plan.offsets.push_back(plan.cycle.size());
    }
    Measure glued = Measure::periodic(shift, plan.cycle);
    return {std::move(glued), std::move(plan)};
}

// ---------------------------------------------------------------------------
// compactified approximants

/**
 * The orbit of x ... x w (k copies of x) for a compactified-admissible block
 * w that starts at x_1, ends at x_last, and passes through inf. Exists only
 * in the absence of word finiteness. Mass at infinity is exactly
 * (#inf in w) / (k |x| + |w|) and the measure approaches the orbit of x at
 * rate O(1/k).
 */
inline Measure compactified_periodic_approximant(const ShiftPresentation& shift, const Word& x,
                                                 const BarWord& w, std::size_t k) {
    const auto f = check_f_property(shift);
    if (f.state == Tri::Holds)
        throw FPropertyHolds("the construction needs word finiteness to fail");
    if (k == 0) throw std::invalid_argument("k >= 1 copies of the base block");
    if (!shift.is_cyclically_admissible(x))
        throw BlockNotAdmissible("x must be a cyclically admissible word");
    if (word_is_finite(w))
        throw BlockNotAdmissible("w must pass through inf");
    // A block running from x_1 back to x_last splices in automatically; any
    // other block is accepted as long as the assembled cycle verifies.
    BarWord cycle;
    for (std::size_t i = 0; i < k; ++i) cycle.insert(cycle.end(), x.begin(), x.end());
    cycle.insert(cycle.end(), w.begin(), w.end());
    try {
        return Measure::periodic(shift, cycle);
    } catch (const NotCyclicallyAdmissible&) {
        throw BlockNotAdmissible("the block does not splice into the orbit of x: cycle " +
                                 word_to_string(cycle) + " is not admissible");
    }
}

/// A compactified connecting block x_1 -> inf -> x_last for the supported
/// presentation classes, or nullopt when none exists within the bound.
inline std::optional<BarWord> find_infinity_block(const ShiftPresentation& shift, Symbol first,
                                                  Symbol last, std::uint64_t max_len = 16) {
    switch (shift.kind()) {
        case ShiftPresentation::Kind::FullShift:
            return BarWord{first, kInf, last};
        case ShiftPresentation::Kind::FiniteMatrix:
            return std::nullopt;
        case ShiftPresentation::Kind::LoopSystem: {
            // any interior run needs a loop length with infinitely many loops
            std::uint64_t run = 0;
            const auto& d = shift.loops();
            for (auto& [len, cnt] : d.head)
                if (cnt.infinite && len >= 2) run = len - 1;
            if (d.tail.kind == LoopTail::Kind::Constant && d.tail.constant.infinite)
                run = d.head_max + 1;
            if (run == 0) return std::nullopt;
            // route first -> 0, the inf run, then 0 -> last
            const auto into = shift.connect(first, 0, max_len);
            const auto out = shift.connect(0, last, max_len);
            if (!into || !out) return std::nullopt;
            BarWord w(into->begin(), into->end());
            w.insert(w.end(), run, kInf);
            w.insert(w.end(), out->begin(), out->end());
            if (!shift.is_bar_admissible(w)) return std::nullopt;
            return w;
        }
        case ShiftPresentation::Kind::RuleGraph: {
            const auto into = shift.connect(first, 0, max_len);
            const auto out = shift.connect(0, last, max_len);
            if (!into || !out) return std::nullopt;
            BarWord w(into->begin(), into->end());
            w.push_back(kInf);
            w.insert(w.end(), out->begin(), out->end());
            if (!shift.is_bar_admissible(w)) return std::nullopt;
            return w;
        }
    }
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// total-escape sequences

struct ZeroMeasureSequence {
    bool refused = false;
    RomePair rome;        // the obstruction when refused
    std::vector<Measure> measures;
    std::vector<Word> cycles;
    std::string note;
};

/**
 * Periodic measures whose fixed-cylinder masses die off like 2/n, one per
 * requested n. Refused exactly when a finite uniform Rome pins mass down.
 */
inline ZeroMeasureSequence zero_measure_sequence(const ShiftPresentation& shift,
                                                 const std::vector<std::uint64_t>& n_list,
                                                 std::size_t rome_symbol_cap = 4,
                                                 std::uint64_t rome_N_cap = 16) {
    ZeroMeasureSequence out;
    const auto rome = find_finite_rome(shift, rome_symbol_cap, rome_N_cap);
    if (rome.found) {
        out.refused = true;
        out.rome = rome.pair;
        out.note = "a finite uniform Rome keeps every invariant measure from vanishing";
        return out;
    }
    for (const std::uint64_t n : n_list) {
        Word cycle;
        switch (shift.kind()) {
            case ShiftPresentation::Kind::FullShift: {
                // n fresh symbols, escalating with n so every fixed cylinder dies
                for (std::uint64_t i = 0; i < n; ++i) cycle.push_back(n + i);
                break;
            }
            case ShiftPresentation::Kind::LoopSystem: {
                // the first loop of length >= n
                shift.for_each_loop([&](const ShiftPresentation::LoopRef& ref) {
                    if (ref.len < n || ref.len < 2) return true;
                    cycle.push_back(0);
                    for (std::uint64_t t = 0; t + 1 < ref.len; ++t)
                        cycle.push_back(ref.first_mid + t);
                    return false;
                });
                if (cycle.empty())
                    throw std::logic_error("no long loop despite the absence of a Rome");
                break;
            }
            case ShiftPresentation::Kind::RuleGraph: {
                // walk excursion 0 -> +h -> 0 of length 2h >= n
                const std::uint64_t h = (n + 1) / 2;
                cycle.push_back(0);
                for (std::uint64_t lv = 1; lv <= h; ++lv) cycle.push_back(3 * lv - 1);
                for (std::uint64_t lv = h; lv-- >= 2;) cycle.push_back(3 * lv - 1);
                break;
            }
            case ShiftPresentation::Kind::FiniteMatrix:
                throw std::logic_error("finite alphabets always have a Rome");
        }
        out.cycles.push_back(cycle);
        out.measures.push_back(Measure::periodic(shift, cycle));
    }
    out.note = "depth-1 masses bounded by 2/n per element";
    return out;
}

// ---------------------------------------------------------------------------
// the dichotomy report

struct DichotomyReport {
    Tri f_property = Tri::Unknown;
    // word-finiteness branch: every sampled finite-inf-finite sandwich rejected
    bool sandwiches_all_rejected = false;
    std::size_t sandwiches_checked = 0;
    // failure branch: random periodic targets approximated by compactified orbits
    struct TargetResult {
        Word target_cycle;
        BarWord inf_block;
        std::size_t k = 0;
        double distance = 0;
    };
    std::vector<TargetResult> targets;
    double max_distance = 0;
    bool all_targets_within_tolerance = false;
    std::string note;
};

struct DichotomyParams {
    std::size_t num_targets = 5;
    double tolerance = 0.05;
    int depth = 5;
    std::uint64_t seed = 7;
    std::vector<std::size_t> k_schedule{4, 8, 16, 32, 64, 128};
    std::size_t max_target_period = 5;
};

/**
 * The two regimes of the compactified simplex, decided by word finiteness:
 * either the point mass at infinity is the only new ergodic measure (checked
 * through rejected sandwich patterns), or new ergodic measures are dense
 * (checked by approximating random periodic targets with compactified
 * orbits within tolerance).
 */
inline DichotomyReport dichotomy_report(const ShiftPresentation& shift,
                                        const DichotomyParams& params = {}) {
    DichotomyReport rep;
    const auto f = check_f_property(shift);
    rep.f_property = f.state;
    if (f.state == Tri::Unknown)
        throw FPropertyUndecided("word finiteness undecided at the configured cap");

    if (f.state == Tri::Holds) {
        const auto symbols = shift.first_symbols(6);
        rep.sandwiches_all_rejected = true;
        for (Symbol a : symbols)
            for (Symbol b : symbols)
                for (std::uint64_t r = 1; r <= 3; ++r) {
                    BarWord w{a};
                    w.insert(w.end(), r, kInf);
                    w.push_back(b);
                    ++rep.sandwiches_checked;
                    if (shift.is_bar_admissible(w)) rep.sandwiches_all_rejected = false;
                }
        rep.note = "word finiteness holds: the only new ergodic measure is the point mass at "
                   "infinity";
        return rep;
    }

    MetricConfig cfg;
    cfg.depth = params.depth;
    const auto symbols = shift.first_symbols(8);
    for (std::size_t t = 0; t < params.num_targets; ++t) {
        Rng rng = Rng::split(params.seed, 0xd1c0, t);
        // a random cyclically admissible target word
        Word cycle;
        for (int attempt = 0; attempt < 200 && cycle.empty(); ++attempt) {
            const std::size_t len = 1 + rng.next_below(params.max_target_period);
            Word cand{symbols[rng.next_below(symbols.size())]};
            bool ok = true;
            for (std::size_t i = 1; i < len && ok; ++i) {
                std::vector<Symbol> nexts;
                for (Symbol s : symbols)
                    if (shift.has_edge(cand.back(), s)) nexts.push_back(s);
                if (nexts.empty()) ok = false;
                else cand.push_back(nexts[rng.next_below(nexts.size())]);
            }
            if (ok && shift.is_cyclically_admissible(cand)) cycle = cand;
        }
        if (cycle.empty())
            throw std::runtime_error("could not sample an admissible periodic target");
        const auto block = find_infinity_block(shift, cycle.front(), cycle.back());
        if (!block)
            throw BlockNotAdmissible("no compactified connecting block for the sampled target");
        const auto target_measure = Measure::periodic(shift, cycle);
        DichotomyReport::TargetResult tr;
        tr.target_cycle = cycle;
        tr.inf_block = *block;
        for (std::size_t k : params.k_schedule) {
            const auto approx = compactified_periodic_approximant(shift, cycle, *block, k);
            tr.k = k;
            tr.distance = weakstar_distance(shift, approx, target_measure, cfg).value;
            if (tr.distance < params.tolerance) break;
        }
        rep.max_distance = std::max(rep.max_distance, tr.distance);
        rep.targets.push_back(std::move(tr));
    }
    rep.all_targets_within_tolerance = rep.max_distance < params.tolerance;
    rep.note = "word finiteness fails: compactified orbits approximate every sampled target";
    return rep;
}

}  // namespace cms
