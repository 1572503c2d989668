#pragma once

/**
 * @file shift.hpp
 * @brief Finite presentations of countable Markov shifts.
 *
 * A shift is presented one of four ways:
 *   - FiniteMatrix: a 0/1 transition matrix over a finite alphabet,
 *     required to be strongly connected with every symbol extendable
 *     both ways.
 *   - LoopSystem: a bouquet of simple loops at a base vertex (symbol 0),
 *     described by loop counts a_n in N u {inf} per length n; midpoint
 *     symbols are numbered 1,2,3,... in a fixed diagonal enumeration of
 *     the loop instances.
 *   - FullShift: every transition allowed, alphabet 1,2,3,...
 *   - RuleGraph: a named built-in infinite graph shipped with hand-proved
 *     transitivity and limit-word rules.
 *
 * Infinite alphabets are never materialized: successors are streamed in
 * increasing symbol order and every enumeration takes a cap and reports
 * whether it was exhaustive.
 *
 * Alongside plain admissibility over N, the compactified alphabet
 * N u {inf} gets its own test: a word is admissible for the compactified
 * shift iff it is a coordinatewise limit of admissible words. For each
 * presentation class this is decided exactly (runs of the inf symbol must
 * be realizable by families of admissible fillers with all entries growing
 * without bound).
 */

#include "cms/rational.hpp"

#include <algorithm>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace cms {

using Symbol = std::uint64_t;

/// Sentinel for the added symbol of the compactified alphabet.
inline constexpr Symbol kInf = std::numeric_limits<Symbol>::max();

/// Finite admissible strings over N; the carriers of cylinders and orbits.
using Word = std::vector<Symbol>;

/// Strings over N u {inf}; the carriers of compactified cylinders.
using BarWord = std::vector<Symbol>;

inline bool word_is_finite(const BarWord& w) {
    return std::find(w.begin(), w.end(), kInf) == w.end();
}

inline std::string symbol_to_string(Symbol s) {
    return s == kInf ? std::string("inf") : std::to_string(s);
}

inline std::string word_to_string(const BarWord& w) {
    std::string out = "(";
    for (std::size_t i = 0; i < w.size(); ++i) {
        if (i) out += ",";
        out += symbol_to_string(w[i]);
    }
    return out + ")";
}

struct CapZero : std::invalid_argument {
    CapZero() : std::invalid_argument("enumeration cap must be >= 1") {}
};

struct PreconditionViolated : std::logic_error {
    using std::logic_error::logic_error;
};

struct NotTransitive : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct InvalidPresentation : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// A loop count: a value in N or countably infinite.
struct LoopCount {
    bool infinite = false;
    std::uint64_t n = 0;

    static LoopCount inf() { return {true, 0}; }
    static LoopCount of(std::uint64_t k) { return {false, k}; }
    bool positive() const { return infinite || n > 0; }
    bool operator==(const LoopCount&) const = default;
};

/// Tail rule for loop counts beyond the explicit head map.
struct LoopTail {
    enum class Kind { Zero, Constant, Exponential, Superexponential };
    Kind kind = Kind::Zero;
    LoopCount constant{};   // Kind::Constant
    double base = 2.0;      // Kind::Exponential: a_n = floor(base^n)
};

struct FiniteMatrixData {
    std::vector<Symbol> alphabet;          // sorted, distinct
    std::vector<std::vector<bool>> edge;   // indexed by alphabet position
};

struct LoopSystemData {
    std::map<std::uint64_t, LoopCount> head;  // length -> count
    LoopTail tail;
    std::uint64_t head_max = 0;               // largest key in head (0 if empty)
};

struct FullShiftData {};

enum class BuiltinRule {
    /// Infinitely many 2-loops at vertex 0 plus a two-sided random-walk
    /// graph through 0. No loop-length bound, and a ray escapes to
    /// infinity, so neither limit-finiteness property holds.
    Loops2PlusRandomWalk,
};

struct RuleGraphData {
    BuiltinRule rule;
};

/// Result of a capped enumeration.
struct EnumeratedWords {
    std::vector<Word> words;
    bool exhaustive = true;
};

class ShiftPresentation {
public:
    enum class Kind { FiniteMatrix, LoopSystem, FullShift, RuleGraph };

    // -- constructors ------------------------------------------------------

    static ShiftPresentation full_shift() {
        ShiftPresentation s;
        s.kind_ = Kind::FullShift;
        s.data_ = FullShiftData{};
        return s;
    }

    static ShiftPresentation finite_matrix(std::vector<Symbol> alphabet,
                                           const std::vector<std::pair<Symbol, Symbol>>& edges) {
        std::sort(alphabet.begin(), alphabet.end());
        if (std::adjacent_find(alphabet.begin(), alphabet.end()) != alphabet.end())
            throw InvalidPresentation("finite_matrix: duplicate alphabet symbol");
        if (alphabet.empty()) throw InvalidPresentation("finite_matrix: empty alphabet");
        FiniteMatrixData d;
        d.alphabet = std::move(alphabet);
        const std::size_t V = d.alphabet.size();
        d.edge.assign(V, std::vector<bool>(V, false));
        for (auto [a, b] : edges) {
            const auto ia = index_of(d.alphabet, a);
            const auto ib = index_of(d.alphabet, b);
            if (!ia || !ib) throw InvalidPresentation("finite_matrix: edge uses unknown symbol");
            d.edge[*ia][*ib] = true;
        }
        validate_matrix(d);
        ShiftPresentation s;
        s.kind_ = Kind::FiniteMatrix;
        s.data_ = std::move(d);
        return s;
    }

    static ShiftPresentation loop_system(const std::map<std::uint64_t, LoopCount>& head,
                                         LoopTail tail) {
        LoopSystemData d;
        d.head = head;
        d.tail = tail;
        for (auto& [len, cnt] : d.head) {
            if (len == 0) throw InvalidPresentation("loop_system: loop length 0");
            if (len == 1 && (cnt.infinite || cnt.n > 1))
                throw InvalidPresentation("loop_system: at most one simple loop of length 1 at the base");
            d.head_max = std::max(d.head_max, len);
        }
        bool any = tail.kind != LoopTail::Kind::Zero;
        for (auto& [len, cnt] : d.head) any = any || cnt.positive();
        if (!any) throw InvalidPresentation("loop_system: no loops at all");
        ShiftPresentation s;
        s.kind_ = Kind::LoopSystem;
        s.data_ = std::move(d);
        // tails may not manufacture several length-1 loops either
        const LoopCount c1 = s.loop_count(1);
        if (c1.infinite || c1.n > 1)
            throw InvalidPresentation(
                "loop_system: the tail rule assigns more than one simple loop of length 1");
        return s;
    }

    static ShiftPresentation rule_graph(BuiltinRule rule) {
        ShiftPresentation s;
        s.kind_ = Kind::RuleGraph;
        s.data_ = RuleGraphData{rule};
        return s;
    }

    Kind kind() const { return kind_; }
    bool finite_alphabet() const { return kind_ == Kind::FiniteMatrix; }

    const FiniteMatrixData& matrix() const { return std::get<FiniteMatrixData>(data_); }
    const LoopSystemData& loops() const { return std::get<LoopSystemData>(data_); }
    BuiltinRule rule() const { return std::get<RuleGraphData>(data_).rule; }

    // -- alphabet ----------------------------------------------------------

    bool contains_symbol(Symbol a) const {
        switch (kind_) {
            case Kind::FullShift: return a >= 1 && a != kInf;
            case Kind::FiniteMatrix: return index_of(matrix().alphabet, a).has_value();
            case Kind::LoopSystem: return a != kInf && (a == 0 || mid_lookup(a).has_value());
            case Kind::RuleGraph: return a != kInf;
        }
        return false;
    }

    /// First `count` alphabet symbols in increasing order (fewer if the
    /// alphabet is smaller).
    std::vector<Symbol> first_symbols(std::size_t count) const {
        std::vector<Symbol> out;
        switch (kind_) {
            case Kind::FullShift:
                for (Symbol a = 1; out.size() < count; ++a) out.push_back(a);
                break;
            case Kind::FiniteMatrix: {
                const auto& al = matrix().alphabet;
                for (std::size_t i = 0; i < al.size() && out.size() < count; ++i) out.push_back(al[i]);
                break;
            }
            case Kind::LoopSystem:
                for (Symbol a = 0; out.size() < count; ++a) {
                    if (contains_symbol(a)) out.push_back(a);
                    else break;  // midpoint ids are dense: first gap is the end
                }
                break;
            case Kind::RuleGraph:
                for (Symbol a = 0; out.size() < count; ++a) out.push_back(a);
                break;
        }
        return out;
    }

    // -- loop-system structure (valid only for Kind::LoopSystem) ------------

    LoopCount loop_count(std::uint64_t len) const {
        const auto& d = loops();
        auto it = d.head.find(len);
        if (it != d.head.end()) return it->second;
        if (len <= d.head_max) return LoopCount::of(0);
        switch (d.tail.kind) {
            case LoopTail::Kind::Zero: return LoopCount::of(0);
            case LoopTail::Kind::Constant: return d.tail.constant;
            case LoopTail::Kind::Exponential: {
                const double v = std::pow(d.tail.base, static_cast<double>(len));
                if (v > 1e18) return LoopCount::of(static_cast<std::uint64_t>(1) << 62);  // saturated
                return LoopCount::of(static_cast<std::uint64_t>(v));
            }
            case LoopTail::Kind::Superexponential: {
                if (len >= 6) return LoopCount::of(static_cast<std::uint64_t>(1) << 62);  // saturated
                return LoopCount::of(std::uint64_t(1) << (std::uint64_t(1) << len));
            }
        }
        return LoopCount::of(0);
    }

    /// True iff loops of length >= min_len keep occurring forever
    /// (infinitely many instances counted with multiplicity).
    bool loops_unbounded_from(std::uint64_t min_len) const {
        const auto& d = loops();
        if (d.tail.kind != LoopTail::Kind::Zero) return true;  // every long length has loops
        for (auto& [len, cnt] : d.head)
            if (len >= min_len && cnt.infinite) return true;
        return false;
    }

    /// True iff arbitrarily long loops exist.
    bool loop_lengths_unbounded() const {
        return loops().tail.kind != LoopTail::Kind::Zero;
    }

    /// Loop instance (length, index, first midpoint symbol). Enumeration is
    /// diagonal over (length + index) so that infinite families interleave
    /// fairly; midpoint symbols are handed out contiguously in this order.
    struct LoopRef {
        std::uint64_t len = 0;
        std::uint64_t index = 0;
        Symbol first_mid = 0;  // undefined for len == 1
    };

    /// Walks the canonical loop enumeration, calling fn(ref) until fn
    /// returns false or the enumeration provably ends.
    template <typename Fn>
    void for_each_loop(Fn&& fn) const {
        const auto& d = loops();
        Symbol next_mid = 1;
        // With a zero tail and all-finite counts the enumeration is finite:
        // the largest diagonal is max(len + count(len)).
        std::uint64_t last_diag = 0;
        bool bounded = d.tail.kind == LoopTail::Kind::Zero;
        if (bounded) {
            for (auto& [len, cnt] : d.head) {
                if (cnt.infinite) { bounded = false; break; }
                if (cnt.n > 0) last_diag = std::max(last_diag, len + cnt.n - 1);
            }
        }
        for (std::uint64_t diag = 1;; ++diag) {
            if (bounded && diag > last_diag) return;
            for (std::uint64_t len = 1; len <= diag; ++len) {
                const std::uint64_t j = diag - len;
                const LoopCount c = loop_count(len);
                if (!c.infinite && j >= c.n) continue;
                LoopRef ref{len, j, next_mid};
                if (len >= 2) next_mid += len - 1;
                if (!fn(ref)) return;
            }
        }
    }

    /// Midpoint lookup: symbol -> (loop, 1-based position along the loop).
    struct MidRef {
        LoopRef loop;
        std::uint64_t pos = 0;  // in [1, len-1]
    };

    std::optional<MidRef> mid_lookup(Symbol a) const {
        if (a == 0 || a == kInf) return std::nullopt;
        std::optional<MidRef> out;
        for_each_loop([&](const LoopRef& ref) {
            if (ref.len < 2) return true;
            const Symbol lo = ref.first_mid, hi = ref.first_mid + ref.len - 2;
            if (a >= lo && a <= hi) {
                out = MidRef{ref, a - lo + 1};
                return false;
            }
            return lo <= a;  // midpoints are handed out in increasing order
        });
        return out;
    }

    // -- edges ---------------------------------------------------------------

    bool has_edge(Symbol a, Symbol b) const {
        if (a == kInf || b == kInf) return false;
        switch (kind_) {
            case Kind::FullShift:
                return a >= 1 && b >= 1;
            case Kind::FiniteMatrix: {
                const auto ia = index_of(matrix().alphabet, a);
                const auto ib = index_of(matrix().alphabet, b);
                return ia && ib && matrix().edge[*ia][*ib];
            }
            case Kind::LoopSystem: {
                if (a == 0 && b == 0) return loop_count(1).positive();
                if (a == 0) {
                    const auto m = mid_lookup(b);
                    return m && m->pos == 1;
                }
                const auto ma = mid_lookup(a);
                if (!ma) return false;
                if (b == 0) return ma->pos == ma->loop.len - 1;
                const auto mb = mid_lookup(b);
                return mb && ma->loop.len == mb->loop.len && ma->loop.index == mb->loop.index &&
                       mb->pos == ma->pos + 1;
            }
            case Kind::RuleGraph:
                return rule_has_edge(a, b);
        }
        return false;
    }

    // -- admissibility --------------------------------------------------------

    /// True iff every consecutive pair is an allowed transition. Total on
    /// nonempty inputs; unknown symbols simply make it false.
    bool is_admissible(const Word& w) const {
        if (w.empty()) throw std::invalid_argument("is_admissible: empty word");
        for (Symbol s : w)
            if (!contains_symbol(s)) return false;
        for (std::size_t i = 0; i + 1 < w.size(); ++i)
            if (!has_edge(w[i], w[i + 1])) return false;
        return true;
    }

    /**
     * Compactified admissibility: true iff the word is a coordinatewise
     * limit of admissible words. Decided per presentation class; exact for
     * every class shipped here.
     */
    bool is_bar_admissible(const BarWord& w) const {
        if (w.empty()) throw std::invalid_argument("is_bar_admissible: empty word");
        switch (kind_) {
            case Kind::FullShift:
                for (Symbol s : w)
                    if (s != kInf && s < 1) return false;
                return true;
            case Kind::FiniteMatrix:
                return word_is_finite(w) && is_admissible(w);
            case Kind::LoopSystem:
                return bar_admissible_loops(w);
            case Kind::RuleGraph:
                return bar_admissible_rule(w);
        }
        return false;
    }

    /// Cyclic (bar-)admissibility: the bi-infinite periodic repetition of w
    /// lies in the (compactified) shift. Checked on the doubled word so every
    /// wrap-around pattern is interior. The all-inf cycle is admissible iff
    /// arbitrarily long finite excursions away from any finite symbol set
    /// exist (decided per class).
    bool is_cyclically_admissible(const Word& w) const {
        if (!is_admissible(w)) return false;
        return has_edge(w.back(), w.front());
    }

    bool is_cyclically_bar_admissible(const BarWord& w) const {
        if (w.empty()) throw std::invalid_argument("cyclic admissibility: empty word");
        const bool all_inf = std::all_of(w.begin(), w.end(), [](Symbol s) { return s == kInf; });
        if (all_inf) return infinity_fixed_point_exists();
        BarWord doubled = w;
        doubled.insert(doubled.end(), w.begin(), w.end());
        // Doubling makes every cyclic adjacency interior; one extra copy of
        // the leading run guards patterns spanning the seam twice.
        doubled.insert(doubled.end(), w.begin(), w.end());
        return is_bar_admissible(doubled);
    }

    /// Whether the all-inf fixed point survives in the compactification:
    /// equivalently, arbitrarily long admissible words avoiding any finite
    /// symbol set exist.
    bool infinity_fixed_point_exists() const {
        switch (kind_) {
            case Kind::FullShift: return true;
            case Kind::FiniteMatrix: return false;
            case Kind::LoopSystem: return loop_lengths_unbounded();
            case Kind::RuleGraph: return true;  // the random-walk ray
        }
        return false;
    }

    // -- exact-step reachability ---------------------------------------------

    /// Is there a path with exactly `steps` edges from a to b?
    bool can_reach(Symbol a, Symbol b, std::uint64_t steps) const {
        if (!contains_symbol(a) || !contains_symbol(b)) return false;
        if (steps == 0) return a == b;
        switch (kind_) {
            case Kind::FullShift:
                return steps == 0 ? a == b : true;
            case Kind::FiniteMatrix:
                return matrix_can_reach(a, b, steps);
            case Kind::LoopSystem:
                return loops_can_reach(a, b, steps);
            case Kind::RuleGraph:
                return rule_can_reach(a, b, steps);
        }
        return false;
    }

    // -- enumeration -----------------------------------------------------------

    /**
     * All admissible words of length n starting at `first` and ending at
     * `last`, in lexicographic order, truncated at `cap` with
     * exhaustive=false when the enumeration was cut short.
     */
    EnumeratedWords enumerate_words(std::uint64_t n, Symbol first, Symbol last,
                                    std::size_t cap) const {
        if (cap == 0) throw CapZero{};
        if (n == 0) throw std::invalid_argument("enumerate_words: length must be >= 1");
        EnumeratedWords out;
        if (!contains_symbol(first) || !contains_symbol(last)) return out;
        if (n == 1) {
            if (first == last) out.words.push_back({first});
            return out;
        }
        if (!can_reach(first, last, n - 1)) return out;
        Word prefix{first};
        out.exhaustive = true;
        extend(prefix, n, last, cap, out);
        return out;
    }

    /**
     * A shortest admissible word starting at a and ending at b, ties broken
     * lexicographically; words of length <= max_len (symbols) are searched.
     * When a == b the single-letter word (a) is the shortest connection.
     * Returns nullopt when no word within the bound exists (the caller
     * distinguishes intransitivity from a bound that is too small).
     */
    std::optional<Word> connect(Symbol a, Symbol b, std::uint64_t max_len) const {
        if (max_len == 0) throw std::invalid_argument("connect: max_len must be >= 1");
        if (!contains_symbol(a) || !contains_symbol(b)) return std::nullopt;
        if (a == b) return Word{a};
        return shortest_path(a, b, 2, max_len);
    }

    /// Shortest closed path (a,...,a) using at least one edge; the word for
    /// the shortest cycle through a. Ties broken lexicographically.
    std::optional<Word> shortest_return(Symbol a, std::uint64_t max_len) const {
        if (!contains_symbol(a)) return std::nullopt;
        return shortest_path(a, a, 2, max_len);
    }

private:
    Kind kind_ = Kind::FullShift;
    std::variant<FiniteMatrixData, LoopSystemData, FullShiftData, RuleGraphData> data_{FullShiftData{}};

    static std::optional<std::size_t> index_of(const std::vector<Symbol>& sorted, Symbol a) {
        const auto it = std::lower_bound(sorted.begin(), sorted.end(), a);
        if (it == sorted.end() || *it != a) return std::nullopt;
        return static_cast<std::size_t>(it - sorted.begin());
    }

    static void validate_matrix(const FiniteMatrixData& d) {
        const std::size_t V = d.alphabet.size();
        for (std::size_t i = 0; i < V; ++i) {
            bool row = false, col = false;
            for (std::size_t j = 0; j < V; ++j) {
                row = row || d.edge[i][j];
                col = col || d.edge[j][i];
            }
            if (!row || !col)
                throw InvalidPresentation("finite_matrix: symbol " +
                                          std::to_string(d.alphabet[i]) +
                                          " does not extend both ways");
        }
        // strong connectivity: forward and backward reachability from vertex 0
        for (bool reversed : {false, true}) {
            std::vector<bool> seen(V, false);
            std::vector<std::size_t> stack{0};
            seen[0] = true;
            while (!stack.empty()) {
                const auto v = stack.back();
                stack.pop_back();
                for (std::size_t u = 0; u < V; ++u) {
                    const bool e = reversed ? d.edge[u][v] : d.edge[v][u];
                    if (e && !seen[u]) {
                        seen[u] = true;
                        stack.push_back(u);
                    }
                }
            }
            if (!std::all_of(seen.begin(), seen.end(), [](bool b) { return b; }))
                throw NotTransitive("finite_matrix: graph is not strongly connected");
        }
    }

    // ---- finite matrix reachability ----

    bool matrix_can_reach(Symbol a, Symbol b, std::uint64_t steps) const {
        const auto& d = matrix();
        const std::size_t V = d.alphabet.size();
        const auto ia = index_of(d.alphabet, a), ib = index_of(d.alphabet, b);
        if (!ia || !ib) return false;
        std::vector<bool> cur(V, false);
        cur[*ia] = true;
        for (std::uint64_t t = 0; t < steps; ++t) {
            std::vector<bool> nxt(V, false);
            bool any = false;
            for (std::size_t v = 0; v < V; ++v) {
                if (!cur[v]) continue;
                for (std::size_t u = 0; u < V; ++u)
                    if (d.edge[v][u]) { nxt[u] = true; any = true; }
            }
            if (!any) return false;
            cur.swap(nxt);
            // strongly connected + saturation: once everything is reachable it stays so
            if (std::all_of(cur.begin(), cur.end(), [](bool x) { return x; }) && steps - t > V)
                return true;
        }
        return cur[*ib];
    }

    // ---- loop system reachability ----

    /// base -> base in exactly t steps: t is a sum of available loop lengths.
    bool loops_base_to_base(std::uint64_t t) const {
        const auto& d = loops();
        std::vector<bool> dp(t + 1, false);
        dp[0] = true;
        const bool tail_lengths = d.tail.kind != LoopTail::Kind::Zero;
        for (std::uint64_t s = 1; s <= t; ++s) {
            for (std::uint64_t len = 1; len <= s; ++len) {
                const bool avail = (len > d.head_max && tail_lengths)
                                       ? (d.tail.kind == LoopTail::Kind::Constant
                                              ? d.tail.constant.positive()
                                              : true)
                                       : loop_count(len).positive();
                if (avail && dp[s - len]) { dp[s] = true; break; }
            }
        }
        return dp[t];
    }

    bool loops_can_reach(Symbol a, Symbol b, std::uint64_t steps) const {
        std::optional<MidRef> ma, mb;
        if (a != 0) {
            ma = mid_lookup(a);
            if (!ma) return false;
        }
        if (b != 0) {
            mb = mid_lookup(b);
            if (!mb) return false;
        }
        if (a == 0 && b == 0) return loops_base_to_base(steps);
        if (a == 0) {  // enter b's loop through its first k midpoints
            const auto k = mb->pos;
            return steps >= k && loops_base_to_base(steps - k);
        }
        if (b == 0) {  // finish a's loop, then base cycles
            const auto exit = ma->loop.len - ma->pos;
            return steps >= exit && loops_base_to_base(steps - exit);
        }
        // same loop, strictly ahead
        if (ma->loop.len == mb->loop.len && ma->loop.index == mb->loop.index &&
            mb->pos > ma->pos && steps == mb->pos - ma->pos)
            return true;
        // otherwise exit to base and re-enter
        const auto exit = ma->loop.len - ma->pos;
        const auto enter = mb->pos;
        return steps >= exit + enter && loops_base_to_base(steps - exit - enter);
    }

    // ---- loop-system limit words ----

    bool bar_admissible_loops(const BarWord& w) const {
        // validate finite symbols and transitions between adjacent finite symbols
        for (std::size_t i = 0; i < w.size(); ++i) {
            if (w[i] == kInf) continue;
            if (!contains_symbol(w[i])) return false;
            if (i + 1 < w.size() && w[i + 1] != kInf && !has_edge(w[i], w[i + 1])) return false;
        }
        // every maximal inf-run must be realizable by fillers growing to
        // infinity; in a bouquet those fillers are midpoint stretches, so a
        // finite neighbor of a run can only be the base vertex.
        std::size_t i = 0;
        while (i < w.size()) {
            if (w[i] != kInf) { ++i; continue; }
            std::size_t j = i;
            while (j < w.size() && w[j] == kInf) ++j;
            const std::uint64_t r = j - i;
            const bool left_bounded = i > 0;
            const bool right_bounded = j < w.size();
            if (left_bounded && w[i - 1] != 0) return false;
            if (right_bounded && w[j] != 0) return false;
            if (left_bounded && right_bounded) {
                // interior run of length r between two base visits: needs
                // infinitely many loops of length exactly r+1
                if (!loop_count(r + 1).infinite) return false;
            } else {
                // boundary run: fillers live inside single loops of length >= r+1
                if (!loops_unbounded_from(r + 1)) return false;
            }
            i = j;
        }
        return true;
    }

    // ---- built-in rule graph: 2-loop bouquet + random walk through 0 ----
    //
    // Symbol coding: 0 = base; for k >= 1: 3k-2 = k-th 2-loop midpoint,
    // 3k-1 = walk vertex +k, 3k = walk vertex -k.

    enum class RuleNode { Base, Mid, WalkPos, WalkNeg };

    static RuleNode rule_node(Symbol a, std::uint64_t& level) {
        if (a == 0) { level = 0; return RuleNode::Base; }
        switch (a % 3) {
            case 1: level = (a + 2) / 3; return RuleNode::Mid;
            case 2: level = (a + 1) / 3; return RuleNode::WalkPos;
            default: level = a / 3; return RuleNode::WalkNeg;
        }
    }

    static Symbol rule_symbol(RuleNode n, std::uint64_t level) {
        switch (n) {
            case RuleNode::Base: return 0;
            case RuleNode::Mid: return 3 * level - 2;
            case RuleNode::WalkPos: return 3 * level - 1;
            case RuleNode::WalkNeg: return 3 * level;
        }
        return 0;
    }

    bool rule_has_edge(Symbol a, Symbol b) const {
        std::uint64_t la, lb;
        const RuleNode na = rule_node(a, la), nb = rule_node(b, lb);
        switch (na) {
            case RuleNode::Base:
                return nb == RuleNode::Mid || (nb == RuleNode::WalkPos && lb == 1) ||
                       (nb == RuleNode::WalkNeg && lb == 1);
            case RuleNode::Mid:
                return nb == RuleNode::Base;
            case RuleNode::WalkPos:
                if (nb == RuleNode::WalkPos) return lb == la + 1 || lb + 1 == la;
                return la == 1 && nb == RuleNode::Base;
            case RuleNode::WalkNeg:
                if (nb == RuleNode::WalkNeg) return lb == la + 1 || lb + 1 == la;
                return la == 1 && nb == RuleNode::Base;
        }
        return false;
    }

    /// Exact-step reachability on the rule graph. Midpoints other than a
    /// specific target are interchangeable, which keeps the state space
    /// finite: walk levels are bounded by the step budget.
    bool rule_can_reach(Symbol a, Symbol b, std::uint64_t steps) const {
        std::uint64_t la, lb;
        const RuleNode na = rule_node(a, la);
        const RuleNode nb = rule_node(b, lb);
        // states: walk level in [-(L), L] plus a generic-midpoint flag
        const std::int64_t L = static_cast<std::int64_t>(steps) +
                               static_cast<std::int64_t>(std::max(la, lb)) + 2;
        const std::size_t W = static_cast<std::size_t>(2 * L + 1);
        std::vector<bool> walk(W, false);  // index level+L; level 0 = base
        bool mid = false;
        auto widx = [&](std::int64_t lev) { return static_cast<std::size_t>(lev + L); };
        std::int64_t start_level = 0;
        if (na == RuleNode::Mid) mid = true;
        else if (na == RuleNode::WalkPos) start_level = static_cast<std::int64_t>(la);
        else if (na == RuleNode::WalkNeg) start_level = -static_cast<std::int64_t>(la);
        if (!mid) walk[widx(start_level)] = true;
        for (std::uint64_t t = 0; t < steps; ++t) {
            std::vector<bool> nwalk(W, false);
            bool nmid = false;
            if (mid) nwalk[widx(0)] = true;  // every midpoint steps to base
            for (std::int64_t lev = -L; lev <= L; ++lev) {
                if (!walk[widx(lev)]) continue;
                if (lev == 0) {
                    nmid = true;  // enter some 2-loop
                    nwalk[widx(1)] = true;
                    nwalk[widx(-1)] = true;
                } else {
                    if (lev + 1 <= L) nwalk[widx(lev + 1)] = true;
                    if (lev - 1 >= -L) nwalk[widx(lev - 1)] = true;
                }
            }
            walk.swap(nwalk);
            mid = nmid;
        }
        switch (nb) {
            case RuleNode::Base: return walk[widx(0)];
            case RuleNode::Mid: return mid;  // any midpoint is reachable iff one is
            case RuleNode::WalkPos: return walk[widx(static_cast<std::int64_t>(lb))];
            case RuleNode::WalkNeg: return walk[widx(-static_cast<std::int64_t>(lb))];
        }
        return false;
    }

    bool bar_admissible_rule(const BarWord& w) const {
        const bool all_inf = std::all_of(w.begin(), w.end(), [](Symbol s) { return s == kInf; });
        if (all_inf) return true;  // interior of the escaping ray
        for (std::size_t i = 0; i < w.size(); ++i) {
            if (w[i] == kInf) continue;
            if (i + 1 < w.size() && w[i + 1] != kInf && !rule_has_edge(w[i], w[i + 1])) return false;
        }
        // finite symbols present: inf can only occur as an isolated symbol
        // whose in-word neighbors are the base vertex (the 2-loop family)
        for (std::size_t i = 0; i < w.size(); ++i) {
            if (w[i] != kInf) continue;
            if (i > 0 && w[i - 1] != 0) return false;
            if (i + 1 < w.size() && w[i + 1] != 0) return false;
        }
        return true;
    }

    // ---- viable-successor streams and lexicographic search ----

    /**
     * Calls fn(s) for successors s of v (ascending) that can still reach
     * `target` in exactly `budget` further steps; stops when fn returns
     * false. Streams are provably finite given the viability filter.
     */
    template <typename Fn>
    void for_each_viable_successor(Symbol v, Symbol target, std::uint64_t budget, Fn&& fn) const {
        switch (kind_) {
            case Kind::FullShift: {
                if (budget == 0) { fn(target); return; }
                for (Symbol s = 1;; ++s)
                    if (!fn(s)) return;
            }
            case Kind::FiniteMatrix: {
                const auto& d = matrix();
                const auto iv = index_of(d.alphabet, v);
                if (!iv) return;
                for (std::size_t u = 0; u < d.alphabet.size(); ++u) {
                    if (!d.edge[*iv][u]) continue;
                    const Symbol s = d.alphabet[u];
                    if (!can_reach(s, target, budget)) continue;
                    if (!fn(s)) return;
                }
                return;
            }
            case Kind::LoopSystem: {
                if (v != 0) {
                    const auto m = mid_lookup(v);
                    if (!m) return;
                    const Symbol s = (m->pos == m->loop.len - 1) ? 0 : v + 1;
                    if (can_reach(s, target, budget)) fn(s);
                    return;
                }
                // successors of base: the base itself (if a 1-loop exists),
                // then first midpoints of loops in enumeration order
                if (loop_count(1).positive() && can_reach(Symbol{0}, target, budget)) {
                    if (!fn(Symbol{0})) return;
                }
                // Entering a loop of length len and completing requires exiting
                // (len-1 more steps) unless the target sits inside that very
                // loop instance; so generic viability depends on len alone.
                std::optional<MidRef> mt;
                if (target != 0) mt = mid_lookup(target);
                std::uint64_t max_diag = 0;     // last enumeration diagonal worth scanning
                bool viable_infinite = false;   // some viable length has infinitely many loops
                for (std::uint64_t len = 2; len <= budget + 1; ++len) {
                    const LoopCount c = loop_count(len);
                    if (!c.positive()) continue;
                    // representative viability: exit in len-1 steps, then base -> target
                    const std::uint64_t after_exit = budget - (len - 1);
                    const bool ok = (target == 0)
                                        ? loops_base_to_base(after_exit)
                                        : (after_exit >= mt->pos &&
                                           loops_base_to_base(after_exit - mt->pos));
                    if (!ok) continue;
                    if (c.infinite) viable_infinite = true;
                    else max_diag = std::max(max_diag, len + c.n - 1);
                }
                if (mt) max_diag = std::max(max_diag, mt->loop.len + mt->loop.index);
                if (!viable_infinite && max_diag == 0) return;
                for_each_loop([&](const LoopRef& ref) {
                    if (!viable_infinite && ref.len + ref.index > max_diag) return false;
                    if (ref.len < 2) return true;
                    if (!can_reach(ref.first_mid, target, budget)) return true;
                    return fn(ref.first_mid);
                });
                return;
            }
            case Kind::RuleGraph: {
                std::uint64_t lv;
                const RuleNode nv = rule_node(v, lv);
                if (nv == RuleNode::Mid) {
                    if (can_reach(Symbol{0}, target, budget)) fn(Symbol{0});
                    return;
                }
                if (nv != RuleNode::Base) {
                    Symbol down, up;
                    if (nv == RuleNode::WalkPos) {
                        down = lv == 1 ? 0 : rule_symbol(RuleNode::WalkPos, lv - 1);
                        up = rule_symbol(RuleNode::WalkPos, lv + 1);
                    } else {
                        down = lv == 1 ? 0 : rule_symbol(RuleNode::WalkNeg, lv - 1);
                        up = rule_symbol(RuleNode::WalkNeg, lv + 1);
                    }
                    Symbol cands[2] = {std::min(down, up), std::max(down, up)};
                    for (Symbol s : cands)
                        if (can_reach(s, target, budget) && !fn(s)) return;
                    return;
                }
                // successors of base, ascending ids: m_1=1, +1=2, -1=3, m_2=4, m_3=7, ...
                const bool generic_mid_ok = can_reach(Symbol{1}, target, budget);
                std::uint64_t lt;
                const RuleNode nt = rule_node(target, lt);
                for (std::uint64_t k = 1;; ++k) {
                    const Symbol mid_k = 3 * k - 2;
                    const bool mid_ok = generic_mid_ok ||
                                        (nt == RuleNode::Mid && target == mid_k &&
                                         can_reach(mid_k, target, budget));
                    if (mid_ok && !fn(mid_k)) return;
                    if (k == 1) {
                        for (Symbol s : {Symbol{2}, Symbol{3}})
                            if (can_reach(s, target, budget) && !fn(s)) return;
                    }
                    if (!generic_mid_ok && (nt != RuleNode::Mid || mid_k >= target) && k > 1) return;
                }
            }
        }
    }

    void extend(Word& prefix, std::uint64_t n, Symbol last, std::size_t cap,
                EnumeratedWords& out) const {
        if (prefix.size() == n) {
            out.words.push_back(prefix);
            return;
        }
        const std::uint64_t budget = n - prefix.size() - 1;
        for_each_viable_successor(prefix.back(), last, budget, [&](Symbol s) {
            // every viable candidate completes to >= 1 word, so a full quota
            // with a candidate still pending means the enumeration is cut
            if (out.words.size() >= cap) {
                out.exhaustive = false;
                return false;
            }
            prefix.push_back(s);
            extend(prefix, n, last, cap, out);
            prefix.pop_back();
            return out.exhaustive;
        });
    }

    std::optional<Word> shortest_path(Symbol a, Symbol b, std::uint64_t min_len,
                                      std::uint64_t max_len) const {
        for (std::uint64_t L = min_len; L <= max_len; ++L) {
            if (!can_reach(a, b, L - 1)) continue;
            Word w{a};
            std::uint64_t remaining = L - 1;
            while (remaining > 0) {
                std::optional<Symbol> pick;
                for_each_viable_successor(w.back(), b, remaining - 1, [&](Symbol s) {
                    pick = s;
                    return false;  // first viable = lexicographically smallest
                });
                if (!pick) return std::nullopt;  // cannot happen if can_reach was true
                w.push_back(*pick);
                --remaining;
            }
            return w;
        }
        return std::nullopt;
    }
};

}  // namespace cms
