#include <catch2/catch_amalgamated.hpp>

#include "cms/rng.hpp"
#include "cms/shift.hpp"
#include "oracles.hpp"

using namespace cms;

namespace {

ShiftPresentation golden_mean() {
    return ShiftPresentation::finite_matrix({1, 2}, {{1, 1}, {1, 2}, {2, 1}});
}

ShiftPresentation golden_mean_loops() {
    // a_1 = 1, a_2 = 1
    return ShiftPresentation::loop_system(
        {{1, LoopCount::of(1)}, {2, LoopCount::of(1)}}, LoopTail{});
}

ShiftPresentation unit_loops() {
    // a_n = 1 for every n
    LoopTail tail;
    tail.kind = LoopTail::Kind::Constant;
    tail.constant = LoopCount::of(1);
    return ShiftPresentation::loop_system({}, tail);
}

ShiftPresentation two_loop_infinite() {
    // a_1 = 1, a_2 = inf, nothing else
    return ShiftPresentation::loop_system(
        {{1, LoopCount::of(1)}, {2, LoopCount::inf()}}, LoopTail{});
}

}  // namespace

TEST_CASE("admissibility is the transition check") {
    const auto full = ShiftPresentation::full_shift();
    CHECK(full.is_admissible({7, 1, 7}));

    const auto gm = golden_mean();
    CHECK_FALSE(gm.is_admissible({1, 2, 2}));  // 2 -> 2 forbidden
    CHECK(gm.is_admissible({1, 2, 1, 1}));
    CHECK_FALSE(gm.is_admissible({1, 3}));  // unknown symbol

    // loop system walked against its explicit 2-vertex encoding
    const auto gl = golden_mean_loops();
    const auto g = oracle::golden_mean_loop_graph();
    for (const Word& w : {Word{0, 1, 0, 0}, Word{0, 0, 1}, Word{1, 1}, Word{1, 0, 1}}) {
        CAPTURE(word_to_string(w));
        CHECK(gl.is_admissible(w) == oracle::walk_is_admissible(g, w));
    }
    // same system hand-encoded as the finite matrix on {1,2}
    const auto enc = ShiftPresentation::finite_matrix({1, 2}, {{1, 1}, {1, 2}, {2, 1}});
    CHECK(enc.is_admissible({1, 2, 1, 1}));
}

TEST_CASE("word enumeration matches brute force on finite matrices") {
    const auto gm = golden_mean();
    const auto g = oracle::golden_mean_graph();
    for (std::size_t n = 1; n <= 8; ++n) {
        for (Symbol a : {1, 2}) {
            for (Symbol b : {1, 2}) {
                const auto got = gm.enumerate_words(n, a, b, 10000);
                REQUIRE(got.exhaustive);
                CHECK(got.words == oracle::brute_enumerate(g, n, a, b));
            }
        }
    }
    const auto r = gm.enumerate_words(3, 1, 1, 100);
    REQUIRE(r.words == std::vector<Word>{{1, 1, 1}, {1, 2, 1}});
}

TEST_CASE("enumeration on infinite alphabets reports truncation") {
    const auto full = ShiftPresentation::full_shift();
    const auto two = full.enumerate_words(2, 1, 1, 100);
    CHECK(two.exhaustive);
    CHECK(two.words == std::vector<Word>{{1, 1}});

    const auto three = full.enumerate_words(3, 1, 1, 5);
    CHECK_FALSE(three.exhaustive);
    CHECK(three.words.size() == 5);
    CHECK(three.words.front() == Word{1, 1, 1});
    CHECK(three.words[1] == Word{1, 2, 1});  // lexicographic

    // infinitely many 2-loops: five words of the shape (0, k, 0)
    const auto il = two_loop_infinite().enumerate_words(3, 0, 0, 5);
    CHECK_FALSE(il.exhaustive);
    CHECK(il.words.size() == 5);
    for (const auto& w : il.words) {
        CHECK(w.front() == 0);
        CHECK(w.back() == 0);
    }

    CHECK_THROWS_AS(full.enumerate_words(2, 1, 1, 0), CapZero);
}

TEST_CASE("unit loop system enumerations stay exhaustive") {
    const auto ul = unit_loops();
    // base->base words of length 4: compositions of {1,2,3} into 3 edges,
    // i.e. 1+1+1, 1+2, 2+1, 3
    const auto r = ul.enumerate_words(4, 0, 0, 100);
    REQUIRE(r.exhaustive);
    CHECK(r.words.size() == 4);
    for (const auto& w : r.words) CHECK(ul.is_cyclically_admissible(w));
}

TEST_CASE("connect returns shortest words, ties lexicographic") {
    const auto gm = golden_mean();
    CHECK(gm.connect(1, 1, 3) == Word{1});      // single-letter connection
    CHECK(gm.connect(2, 2, 3) == Word{2});      // likewise; BFS distance 0
    CHECK(gm.shortest_return(2, 3) == Word{2, 1, 2});
    CHECK(gm.shortest_return(1, 3) == Word{1, 1});

    const auto full = ShiftPresentation::full_shift();
    CHECK(full.connect(5, 9, 4) == Word{5, 9});

    // oracle agreement on nontrivial pairs
    const auto g = oracle::golden_mean_graph();
    CHECK(gm.connect(2, 1, 5) == oracle::bfs_connect(g, 2, 1, 5));
    CHECK(gm.connect(1, 2, 5) == oracle::bfs_connect(g, 1, 2, 5));

    // not reachable within the bound
    const auto chain = ShiftPresentation::finite_matrix(
        {1, 2, 3}, {{1, 2}, {2, 3}, {3, 1}});
    CHECK_FALSE(chain.connect(1, 3, 2).has_value());
    CHECK(chain.connect(1, 3, 3) == Word{1, 2, 3});
}

TEST_CASE("connect output is admissible with matching endpoints") {
    const auto ul = unit_loops();
    Rng rng(11);
    const auto syms = ul.first_symbols(12);
    for (int trial = 0; trial < 50; ++trial) {
        const Symbol a = syms[rng.next_below(syms.size())];
        const Symbol b = syms[rng.next_below(syms.size())];
        const auto w = ul.connect(a, b, 40);
        REQUIRE(w.has_value());
        CHECK(w->front() == a);
        CHECK(w->back() == b);
        CHECK(ul.is_admissible(*w));
        // shortest: no strictly shorter word exists
        for (std::uint64_t L = (a == b ? 1 : 2); L < w->size(); ++L)
            CHECK_FALSE(ul.can_reach(a, b, L - 1));
    }
}

TEST_CASE("limit-word admissibility per presentation class") {
    const auto full = ShiftPresentation::full_shift();
    CHECK(full.is_bar_admissible({1, kInf, 1}));  // witnesses (1,k,1)
    CHECK(full.is_bar_admissible({kInf, kInf}));

    const auto gm = golden_mean();
    CHECK_FALSE(gm.is_bar_admissible({1, kInf}));  // finite alphabet: nothing tends to inf
    CHECK(gm.is_bar_admissible({1, 2, 1}));

    const auto t = two_loop_infinite();
    CHECK(t.is_bar_admissible({0, kInf, 0}));   // midpoints of the 2-loop family
    CHECK_FALSE(t.is_bar_admissible({0, kInf, kInf, 0}));  // would need infinitely many 3-loops
    CHECK_FALSE(t.is_bar_admissible({kInf, kInf}));        // loop lengths are bounded by 2

    const auto ul = unit_loops();
    CHECK_FALSE(ul.is_bar_admissible({0, kInf, 0}));  // one loop per length only
    CHECK(ul.is_bar_admissible({0, kInf}));           // escape into ever longer loops
    CHECK(ul.is_bar_admissible({kInf, kInf, 0}));     // tails of long loops
    CHECK(ul.is_bar_admissible({kInf, kInf, kInf}));

    const auto rg = ShiftPresentation::rule_graph(BuiltinRule::Loops2PlusRandomWalk);
    CHECK(rg.is_bar_admissible({0, kInf, 0}));
    CHECK(rg.is_bar_admissible({kInf, kInf, kInf}));   // the escaping ray
    CHECK_FALSE(rg.is_bar_admissible({0, kInf, kInf, 0}));
    CHECK_FALSE(rg.is_bar_admissible({2, kInf}));      // walk vertices have bounded neighbors
}

TEST_CASE("inf-free limit admissibility coincides with plain admissibility") {
    Rng rng(5);
    const auto shifts = {golden_mean(), unit_loops(), two_loop_infinite(),
                         ShiftPresentation::full_shift()};
    for (const auto& s : shifts) {
        const auto syms = s.first_symbols(6);
        for (int trial = 0; trial < 200; ++trial) {
            Word w(1 + rng.next_below(6));
            for (auto& x : w) x = syms[rng.next_below(syms.size())];
            CAPTURE(word_to_string(w));
            CHECK(s.is_admissible(w) == s.is_bar_admissible(w));
        }
    }
}

TEST_CASE("exact-step reachability agrees with enumeration counts") {
    const auto ul = unit_loops();
    for (std::uint64_t steps = 1; steps <= 9; ++steps) {
        const bool reach = ul.can_reach(0, 0, steps);
        const auto words = ul.enumerate_words(steps + 1, 0, 0, 100000);
        REQUIRE(words.exhaustive);
        CHECK(reach == !words.words.empty());
    }
}

namespace {

// Brute-force exact-step reachability on a materialized symbol window.
// Sound whenever every witness path stays inside the window: t steps from a
// cannot reach symbols whose shortest representative lies beyond it.
bool oracle_can_reach(const ShiftPresentation& shift, Symbol a, Symbol b, std::uint64_t steps,
                      Symbol id_bound) {
    std::vector<bool> cur(id_bound + 1, false), nxt(id_bound + 1, false);
    if (a > id_bound) return false;
    cur[a] = true;
    for (std::uint64_t t = 0; t < steps; ++t) {
        std::fill(nxt.begin(), nxt.end(), false);
        for (Symbol u = 0; u <= id_bound; ++u) {
            if (!cur[u]) continue;
            for (Symbol v = 0; v <= id_bound; ++v)
                if (shift.has_edge(u, v)) nxt[v] = true;
        }
        cur.swap(nxt);
    }
    return b <= id_bound && cur[b];
}

}  // namespace

TEST_CASE("reachability agrees with materialized brute force") {
    // rule graph: equivalent midpoints keep the state space finite; any
    // witness of <= 8 steps from symbols below id 12 fits in a window of
    // levels <= 14, i.e. ids <= 3*14+2
    const auto rg = ShiftPresentation::rule_graph(BuiltinRule::Loops2PlusRandomWalk);
    Rng rng(59);
    for (int trial = 0; trial < 250; ++trial) {
        const Symbol a = rng.next_below(12);
        const Symbol b = rng.next_below(12);
        const std::uint64_t steps = rng.next_below(9);
        CAPTURE(a, b, steps);
        CHECK(rg.can_reach(a, b, steps) == oracle_can_reach(rg, a, b, steps, 3 * 14 + 2));
    }

    // unit bouquet: ids up to the window are the loops of length <= 7, and
    // paths of <= 8 steps between low symbols stay on loops of length <= 8
    const auto ul = unit_loops();
    for (int trial = 0; trial < 250; ++trial) {
        const Symbol a = rng.next_below(11);
        const Symbol b = rng.next_below(11);
        const std::uint64_t steps = rng.next_below(9);
        if (!ul.contains_symbol(a) || !ul.contains_symbol(b)) continue;
        CAPTURE(a, b, steps);
        // window: all midpoints of loops of length <= 10 (ids 1..45)
        CHECK(ul.can_reach(a, b, steps) == oracle_can_reach(ul, a, b, steps, 45));
    }

    // hub system: infinitely many 2-loops; a window of the first ten
    // midpoints is enough because they are interchangeable
    const auto hub = two_loop_infinite();
    for (int trial = 0; trial < 200; ++trial) {
        const Symbol a = rng.next_below(6);
        const Symbol b = rng.next_below(6);
        const std::uint64_t steps = rng.next_below(8);
        CAPTURE(a, b, steps);
        CHECK(hub.can_reach(a, b, steps) == oracle_can_reach(hub, a, b, steps, 10));
    }
}

TEST_CASE("presentation validation") {
    // all-zero column: symbol 2 has no incoming edge
    CHECK_THROWS_AS(ShiftPresentation::finite_matrix({1, 2}, {{1, 1}, {2, 1}}),
                    InvalidPresentation);
    // connected one way only
    CHECK_THROWS_AS(ShiftPresentation::finite_matrix({1, 2}, {{1, 1}, {1, 2}, {2, 2}}),
                    NotTransitive);
    // disconnected
    CHECK_THROWS_AS(ShiftPresentation::finite_matrix(
                        {1, 2, 3, 4}, {{1, 2}, {2, 1}, {3, 4}, {4, 3}}),
                    NotTransitive);
    // two simple 1-loops at one vertex cannot exist
    CHECK_THROWS_AS(ShiftPresentation::loop_system({{1, LoopCount::of(2)}}, LoopTail{}),
                    InvalidPresentation);
}

TEST_CASE("loop system structure queries") {
    const auto t = two_loop_infinite();
    CHECK(t.loop_count(1) == LoopCount::of(1));
    CHECK(t.loop_count(2).infinite);
    CHECK(t.loop_count(3) == LoopCount::of(0));
    CHECK_FALSE(t.loop_lengths_unbounded());
    CHECK(t.loops_unbounded_from(2));
    CHECK_FALSE(t.loops_unbounded_from(3));

    const auto ul = unit_loops();
    CHECK(ul.loop_lengths_unbounded());
    CHECK(ul.loops_unbounded_from(100));

    // midpoint symbols are dense and consistent with edges
    const auto syms = ul.first_symbols(10);
    REQUIRE(syms.size() == 10);
    for (Symbol s : syms) {
        if (s == 0) continue;
        const auto m = ul.mid_lookup(s);
        REQUIRE(m.has_value());
        CHECK(m->pos >= 1);
        CHECK(m->pos <= m->loop.len - 1);
    }
}
