#pragma once

/**
 * @file properties.hpp
 * @brief Combinatorial finiteness properties of a presented shift.
 *
 * Two properties drive everything downstream.
 *
 * Word finiteness ("F"): for every symbol a and length n there are only
 * finitely many admissible words of length n from a to a. Loop systems
 * decide this exactly (all loop counts finite); the full shift fails it
 * (infinitely many (a,k,a)); a finite alphabet satisfies it trivially.
 *
 * Finite uniform Rome: a finite symbol set F and a bound N such that no
 * admissible word of N consecutive symbols avoids F (equivalently, every
 * walk of N+1 edges has an interior vertex in F). The bound reported by the
 * search is the smallest N that works for the first workable F in
 * size-then-lexicographic order.
 *
 * For transitive noncompact presentations the two properties exclude each
 * other, and results here are tri-state so bounded searches can answer
 * honestly.
 */

#include "cms/series.hpp"
#include "cms/shift.hpp"

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace cms {

enum class Tri { Holds, Fails, Unknown };

inline std::string tri_to_string(Tri t) {
    switch (t) {
        case Tri::Holds: return "holds";
        case Tri::Fails: return "fails";
        case Tri::Unknown: return "unknown";
    }
    return "unknown";
}

struct TailRuleUnsupported : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Witness for a failing word-finiteness check: infinitely many admissible
/// words of length `length` from `symbol` to `symbol`.
struct FWitness {
    Symbol symbol = 0;
    std::uint64_t length = 0;
};

struct FPropertyResult {
    Tri state = Tri::Unknown;
    std::optional<FWitness> witness;  // present when state == Fails
    std::uint64_t cap = 0;            // search cap at which Unknown was declared
    std::string note;
};

struct RomePair {
    std::vector<Symbol> rome;  // finite symbol set F
    std::uint64_t bound = 0;   // N
};

struct RomeSearchResult {
    bool found = false;
    RomePair pair;
    std::string note;
};

struct PropertyReport {
    FPropertyResult f_property;
    RomeSearchResult rome;
    Tri finite_entropy = Tri::Unknown;
    Tri locally_compact = Tri::Unknown;
    std::string note;
};

// ---------------------------------------------------------------------------
// word finiteness

inline FPropertyResult check_f_property(const ShiftPresentation& shift, std::uint64_t cap = 64) {
    FPropertyResult r;
    r.cap = cap;
    switch (shift.kind()) {
        case ShiftPresentation::Kind::FiniteMatrix:
            r.state = Tri::Holds;
            r.note = "finite alphabet: the shift is compact";
            return r;
        case ShiftPresentation::Kind::FullShift:
            r.state = Tri::Fails;
            // words (1, k, 1): one per alphabet symbol k
            r.witness = FWitness{1, 3};
            return r;
        case ShiftPresentation::Kind::LoopSystem: {
            // finite iff every loop count is a natural number
            const auto& d = shift.loops();
            for (auto& [len, cnt] : d.head) {
                if (cnt.infinite) {
                    r.state = Tri::Fails;
                    r.witness = FWitness{0, len + 1};  // words (0, mids..., 0)
                    return r;
                }
            }
            if (d.tail.kind == LoopTail::Kind::Constant && d.tail.constant.infinite) {
                r.state = Tri::Fails;
                r.witness = FWitness{0, d.head_max + 2};
                return r;
            }
            r.state = Tri::Holds;
            return r;
        }
        case ShiftPresentation::Kind::RuleGraph:
            switch (shift.rule()) {
                case BuiltinRule::Loops2PlusRandomWalk:
                    r.state = Tri::Fails;
                    r.witness = FWitness{0, 3};  // (0, mid_k, 0) for every k
                    return r;
            }
            r.state = Tri::Unknown;
            return r;
    }
    return r;
}

// ---------------------------------------------------------------------------
// uniform Rome

namespace detail {

/// Longest admissible word avoiding F in a finite graph, or nullopt when
/// unbounded (the avoiding subgraph has a cycle). Length counted in symbols.
inline std::optional<std::uint64_t> longest_avoiding_path_finite(const FiniteMatrixData& d,
                                                                 const std::set<Symbol>& F) {
    const std::size_t V = d.alphabet.size();
    std::vector<std::size_t> keep;
    for (std::size_t i = 0; i < V; ++i)
        if (!F.count(d.alphabet[i])) keep.push_back(i);
    if (keep.empty()) return 0;
    // detect a cycle / compute the longest path on the induced DAG
    enum { White, Grey, Black };
    std::vector<int> color(V, White);
    std::vector<std::uint64_t> best(V, 0);
    bool cyclic = false;
    auto dfs = [&](auto&& self, std::size_t v) -> void {
        color[v] = Grey;
        std::uint64_t longest_tail = 0;
        for (std::size_t u : keep) {
            if (!d.edge[v][u]) continue;
            if (color[u] == Grey) { cyclic = true; return; }
            if (color[u] == White) self(self, u);
            if (cyclic) return;
            longest_tail = std::max(longest_tail, best[u]);
        }
        best[v] = 1 + longest_tail;
        color[v] = Black;
    };
    for (std::size_t v : keep) {
        if (color[v] == White) dfs(dfs, v);
        if (cyclic) return std::nullopt;
    }
    std::uint64_t best_all = 0;
    for (std::size_t v : keep) best_all = std::max(best_all, best[v]);
    return best_all;
}

/// Longest avoiding word in a loop system (nullopt when unbounded).
inline std::optional<std::uint64_t> longest_avoiding_path_loops(const ShiftPresentation& shift,
                                                                const std::set<Symbol>& F) {
    const bool base_in_F = F.count(0) > 0;
    // group the named midpoints of F by loop instance (keyed by first_mid)
    struct Touched {
        std::uint64_t len = 0;
        std::vector<std::uint64_t> hits;  // positions in [1, len-1], sorted
    };
    std::map<Symbol, Touched> touched;
    for (Symbol s : F) {
        if (s == 0) continue;
        const auto m = shift.mid_lookup(s);
        if (!m) continue;  // not a symbol of this shift: vacuous member of F
        auto& t = touched[m->loop.first_mid];
        t.len = m->loop.len;
        t.hits.push_back(m->pos);
    }
    for (auto& [fm, t] : touched) std::sort(t.hits.begin(), t.hits.end());

    // longest run of consecutive unblocked midpoints in a touched loop,
    // plus the lengths of its unblocked head and tail stretches
    auto runs = [](const Touched& t) {
        std::uint64_t head = t.hits.front() - 1;
        std::uint64_t tail = t.len - 1 - t.hits.back();
        std::uint64_t interior = 0;
        for (std::size_t i = 0; i + 1 < t.hits.size(); ++i)
            interior = std::max(interior, t.hits[i + 1] - t.hits[i] - 1);
        return std::tuple{head, tail, std::max({head, tail, interior})};
    };

    if (base_in_F) {
        // avoiding words are midpoint stretches inside single loops
        if (shift.loop_lengths_unbounded()) return std::nullopt;
        std::uint64_t best = 0;
        const auto& d = shift.loops();
        for (auto& [len, cnt] : d.head) {
            if (!cnt.positive() || len < 2) continue;
            // does some instance of this length escape F entirely?
            std::uint64_t blocked_instances = 0;
            std::uint64_t best_blocked_run = 0;
            for (auto& [fm, t] : touched) {
                if (t.len != len) continue;
                ++blocked_instances;
                best_blocked_run = std::max(best_blocked_run, std::get<2>(runs(t)));
            }
            const bool untouched_instance_exists =
                cnt.infinite || cnt.n > blocked_instances;
            best = std::max(best, untouched_instance_exists ? len - 1 : best_blocked_run);
        }
        return best;
    }

    // base not in F: any loop with no blocked midpoint gives an avoiding
    // cycle, which a finite F can only prevent when the bouquet is finite
    const auto& d = shift.loops();
    if (shift.loop_count(1).positive()) return std::nullopt;  // base self-loop cycles
    if (d.tail.kind != LoopTail::Kind::Zero) return std::nullopt;
    std::uint64_t loops_with_mids = 0;
    for (auto& [len, cnt] : d.head) {
        if (len < 2 || !cnt.positive()) continue;
        if (cnt.infinite) return std::nullopt;  // untouched instance exists
        loops_with_mids += cnt.n;
    }
    if (touched.size() < loops_with_mids) return std::nullopt;  // some loop avoids F
    // all loops blocked: an avoiding walk either stays between two hits of
    // one loop, or passes base exactly once, entering along an unblocked
    // loop tail and leaving along an unblocked head
    std::uint64_t best_head = 0, best_tail = 0, best_interior = 0;
    for (auto& [fm, t] : touched) {
        const auto [head, tail, run] = runs(t);
        best_head = std::max(best_head, head);
        best_tail = std::max(best_tail, tail);
        best_interior = std::max(best_interior, run);
    }
    return std::max(best_interior, best_tail + 1 + best_head);
}

inline std::optional<std::uint64_t> longest_avoiding_path(const ShiftPresentation& shift,
                                                          const std::set<Symbol>& F) {
    switch (shift.kind()) {
        case ShiftPresentation::Kind::FullShift:
            return std::nullopt;  // (k,k,k,...) for any k outside F
        case ShiftPresentation::Kind::FiniteMatrix:
            return longest_avoiding_path_finite(shift.matrix(), F);
        case ShiftPresentation::Kind::LoopSystem:
            return longest_avoiding_path_loops(shift, F);
        case ShiftPresentation::Kind::RuleGraph:
            switch (shift.rule()) {
                case BuiltinRule::Loops2PlusRandomWalk:
                    return std::nullopt;  // the walk ray avoids any finite F
            }
            return std::nullopt;
    }
    return std::nullopt;
}

}  // namespace detail

/**
 * Does (F, N) witness a uniform Rome? True iff no admissible word of N
 * consecutive symbols avoids F. Exact for every shipped presentation class.
 */
inline bool check_uniform_rome(const ShiftPresentation& shift, const std::set<Symbol>& F,
                               std::uint64_t N) {
    if (F.empty()) throw std::invalid_argument("check_uniform_rome: F must be nonempty");
    if (N == 0) throw std::invalid_argument("check_uniform_rome: N must be >= 1");
    const auto longest = detail::longest_avoiding_path(shift, F);
    return longest.has_value() && *longest < N;
}

/**
 * Search for a finite uniform Rome with F inside the first `symbol_cap`
 * alphabet symbols and N <= N_cap. F is scanned by size then
 * lexicographically; the reported bound is minimal for the found F.
 */
inline RomeSearchResult find_finite_rome(const ShiftPresentation& shift,
                                         std::size_t symbol_cap = 4, std::uint64_t N_cap = 16) {
    if (symbol_cap == 0 || N_cap == 0)
        throw std::invalid_argument("find_finite_rome: caps must be >= 1");
    RomeSearchResult out;
    const auto symbols = shift.first_symbols(symbol_cap);
    const std::size_t M = symbols.size();
    // subsets ordered by popcount then by lexicographic symbol list
    std::vector<std::uint32_t> masks;
    for (std::uint32_t m = 1; m < (1u << M); ++m) masks.push_back(m);
    std::sort(masks.begin(), masks.end(), [&](std::uint32_t a, std::uint32_t b) {
        const int pa = __builtin_popcount(a), pb = __builtin_popcount(b);
        if (pa != pb) return pa < pb;
        std::vector<Symbol> va, vb;
        for (std::size_t i = 0; i < M; ++i) {
            if (a & (1u << i)) va.push_back(symbols[i]);
            if (b & (1u << i)) vb.push_back(symbols[i]);
        }
        return va < vb;
    });
    for (std::uint32_t m : masks) {
        std::set<Symbol> F;
        for (std::size_t i = 0; i < M; ++i)
            if (m & (1u << i)) F.insert(symbols[i]);
        const auto longest = detail::longest_avoiding_path(shift, F);
        if (!longest.has_value() || *longest >= N_cap) continue;
        out.found = true;
        out.pair.rome.assign(F.begin(), F.end());
        out.pair.bound = std::max<std::uint64_t>(*longest + 1, 1);
        return out;
    }
    out.note = "no finite uniform Rome within caps (symbols " + std::to_string(symbol_cap) +
               ", bound " + std::to_string(N_cap) + ")";
    return out;
}

// ---------------------------------------------------------------------------
// loop-system classification

/**
 * Classification of a loop system by its loop-count sequence:
 * word finiteness holds iff every count is finite; entropy is finite iff in
 * addition limsup (1/n) log a_n is finite; the shift is locally compact iff
 * the total number of loops is finite.
 */
inline PropertyReport classify_loop_system(const std::map<std::uint64_t, LoopCount>& head,
                                           LoopTail tail, std::size_t rome_symbol_cap = 4,
                                           std::uint64_t rome_N_cap = 16) {
    const auto shift = ShiftPresentation::loop_system(head, tail);
    PropertyReport rep;
    rep.f_property = check_f_property(shift);
    rep.rome = find_finite_rome(shift, rome_symbol_cap, rome_N_cap);

    bool any_infinite_count = false;
    for (auto& [len, cnt] : head) any_infinite_count |= cnt.infinite;
    if (tail.kind == LoopTail::Kind::Constant && tail.constant.infinite) any_infinite_count = true;

    // limsup (1/n) log a_n, decided symbolically from the tail rule
    if (any_infinite_count) {
        rep.finite_entropy = Tri::Fails;
    } else {
        switch (tail.kind) {
            case LoopTail::Kind::Zero:
            case LoopTail::Kind::Constant:
                rep.finite_entropy = Tri::Holds;  // limsup <= 0
                break;
            case LoopTail::Kind::Exponential:
                rep.finite_entropy = Tri::Holds;  // limsup = log(base)
                break;
            case LoopTail::Kind::Superexponential:
                rep.finite_entropy = Tri::Fails;  // (1/n) log 2^{2^n} -> infinity
                break;
        }
    }

    // local compactness: total loop count finite
    const bool total_finite = !any_infinite_count && tail.kind == LoopTail::Kind::Zero;
    rep.locally_compact = total_finite ? Tri::Holds : Tri::Fails;

    // on a noncompact (infinite-alphabet) presentation the two properties
    // exclude each other; finitely many loops mean a compact shift where
    // both hold at once
    if (!total_finite && rep.f_property.state == Tri::Holds && rep.rome.found)
        throw std::logic_error("noncompact loop system reported both word-finiteness and a finite Rome");
    return rep;
}

/**
 * Under word finiteness, no point of the compactified shift passes from a
 * finite symbol through an inf block back to a finite symbol. Samples such
 * sandwich patterns and confirms each one is rejected.
 */
inline bool f_property_word_restriction_check(const ShiftPresentation& shift,
                                              std::size_t symbol_samples = 6,
                                              std::uint64_t max_block = 3) {
    const auto f = check_f_property(shift);
    if (f.state != Tri::Holds)
        throw PreconditionViolated("word restriction check requires word finiteness");
    const auto symbols = shift.first_symbols(symbol_samples);
    for (Symbol a : symbols) {
        for (Symbol b : symbols) {
            for (std::uint64_t r = 1; r <= max_block; ++r) {
                BarWord w{a};
                w.insert(w.end(), r, kInf);
                w.push_back(b);
                if (shift.is_bar_admissible(w)) return false;
            }
        }
    }
    return true;
}

}  // namespace cms
