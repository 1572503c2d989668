#include <catch2/catch_amalgamated.hpp>

#include "cms/properties.hpp"
#include "cms/rng.hpp"

#include <set>

using namespace cms;

namespace {

ShiftPresentation unit_loops() {
    LoopTail tail;
    tail.kind = LoopTail::Kind::Constant;
    tail.constant = LoopCount::of(1);
    return ShiftPresentation::loop_system({}, tail);
}

ShiftPresentation two_loop_infinite() {
    return ShiftPresentation::loop_system(
        {{1, LoopCount::of(1)}, {2, LoopCount::inf()}}, LoopTail{});
}

}  // namespace

TEST_CASE("word finiteness decisions") {
    CHECK(check_f_property(unit_loops()).state == Tri::Holds);

    const auto full = check_f_property(ShiftPresentation::full_shift());
    CHECK(full.state == Tri::Fails);
    REQUIRE(full.witness.has_value());
    CHECK(full.witness->symbol == 1);
    CHECK(full.witness->length == 3);  // (1, k, 1), one word per k

    const auto ex = check_f_property(two_loop_infinite());
    CHECK(ex.state == Tri::Fails);
    REQUIRE(ex.witness.has_value());
    CHECK(ex.witness->symbol == 0);
    CHECK(ex.witness->length == 3);  // (0, mid_k, 0)

    const auto gm = check_f_property(
        ShiftPresentation::finite_matrix({1, 2}, {{1, 1}, {1, 2}, {2, 1}}));
    CHECK(gm.state == Tri::Holds);
}

TEST_CASE("witnesses really index infinite word families") {
    // for a failing shift, enumeration at the witness length never exhausts
    for (const auto& s : {ShiftPresentation::full_shift(), two_loop_infinite()}) {
        const auto f = check_f_property(s);
        REQUIRE(f.state == Tri::Fails);
        const auto words =
            s.enumerate_words(f.witness->length, f.witness->symbol, f.witness->symbol, 200);
        CHECK_FALSE(words.exhaustive);
    }
    // for a holding loop system, every a->a enumeration up to length 7 exhausts
    const auto ul = unit_loops();
    for (std::uint64_t n = 2; n <= 7; ++n) {
        const auto words = ul.enumerate_words(n, 0, 0, 100000);
        CHECK(words.exhaustive);
    }
}

TEST_CASE("uniform Rome checks are exact") {
    const auto ex = two_loop_infinite();
    CHECK(check_uniform_rome(ex, {0}, 2));
    CHECK_FALSE(check_uniform_rome(ex, {0}, 1));  // a lone midpoint avoids the base

    CHECK_FALSE(check_uniform_rome(ShiftPresentation::full_shift(), {1, 2, 3}, 50));

    // unbounded loop lengths: the interior of a long loop avoids the base
    CHECK_FALSE(check_uniform_rome(unit_loops(), {0}, 7));

    const auto rg = ShiftPresentation::rule_graph(BuiltinRule::Loops2PlusRandomWalk);
    CHECK_FALSE(check_uniform_rome(rg, {0, 1, 2, 3}, 25));

    // finite matrix: bound equals the longest path outside F
    const auto chain = ShiftPresentation::finite_matrix(
        {1, 2, 3}, {{1, 2}, {2, 3}, {3, 1}});
    CHECK(check_uniform_rome(chain, {1}, 3));
    CHECK_FALSE(check_uniform_rome(chain, {1}, 2));
}

TEST_CASE("Rome search returns the canonical witness") {
    const auto found = find_finite_rome(two_loop_infinite());
    REQUIRE(found.found);
    CHECK(found.pair.rome == std::vector<Symbol>{0});
    CHECK(found.pair.bound == 2);

    CHECK_FALSE(find_finite_rome(ShiftPresentation::full_shift()).found);
    CHECK_FALSE(find_finite_rome(unit_loops()).found);
    CHECK_FALSE(
        find_finite_rome(ShiftPresentation::rule_graph(BuiltinRule::Loops2PlusRandomWalk)).found);
}

TEST_CASE("Rome pairs bound enumerated avoiding words") {
    // cross-check against enumeration: when (F, N) verifies, every
    // enumerated word of N symbols between non-F endpoints must pass
    // through F, i.e. no run of N symbols avoids F
    const auto check_against_enumeration = [](const ShiftPresentation& shift) {
        const auto found = find_finite_rome(shift, 4, 16);
        REQUIRE(found.found);
        const std::set<Symbol> F(found.pair.rome.begin(), found.pair.rome.end());
        const auto N = found.pair.bound;
        for (Symbol a : shift.first_symbols(6)) {
            if (F.count(a)) continue;
            for (Symbol b : shift.first_symbols(6)) {
                if (F.count(b)) continue;
                const auto words = shift.enumerate_words(N, a, b, 500);
                for (const auto& w : words.words) {
                    bool hits_F = false;
                    for (Symbol s : w) hits_F = hits_F || F.count(s) > 0;
                    CAPTURE(word_to_string(w));
                    CHECK(hits_F);
                }
            }
        }
    };
    check_against_enumeration(two_loop_infinite());
    check_against_enumeration(
        ShiftPresentation::finite_matrix({1, 2, 3}, {{1, 2}, {2, 3}, {3, 1}}));

    // and the bound is tight: words of N-1 symbols avoiding F exist
    const auto ex = two_loop_infinite();
    const auto found = find_finite_rome(ex);
    REQUIRE(found.pair.bound == 2);
    const auto singles = ex.enumerate_words(1, 1, 1, 10);  // a lone midpoint
    CHECK_FALSE(singles.words.empty());
}

TEST_CASE("loop-system classification follows the count sequence") {
    // one loop of every length
    LoopTail unit;
    unit.kind = LoopTail::Kind::Constant;
    unit.constant = LoopCount::of(1);
    const auto a = classify_loop_system({}, unit);
    CHECK(a.f_property.state == Tri::Holds);
    CHECK(a.finite_entropy == Tri::Holds);
    CHECK(a.locally_compact == Tri::Fails);
    CHECK_FALSE(a.rome.found);

    // a_1 = 1, a_2 = inf
    const auto b =
        classify_loop_system({{1, LoopCount::of(1)}, {2, LoopCount::inf()}}, LoopTail{});
    CHECK(b.f_property.state == Tri::Fails);
    CHECK(b.locally_compact == Tri::Fails);
    CHECK(b.finite_entropy == Tri::Fails);
    CHECK(b.rome.found);

    // a_n = 2^(2^n): counts finite but explosive
    LoopTail super;
    super.kind = LoopTail::Kind::Superexponential;
    const auto c = classify_loop_system({}, super);
    CHECK(c.f_property.state == Tri::Holds);
    CHECK(c.finite_entropy == Tri::Fails);
    CHECK(c.locally_compact == Tri::Fails);

    // golden-mean bouquet: compact-like in every respect except local shape
    const auto d =
        classify_loop_system({{1, LoopCount::of(1)}, {2, LoopCount::of(1)}}, LoopTail{});
    CHECK(d.f_property.state == Tri::Holds);
    CHECK(d.finite_entropy == Tri::Holds);
    CHECK(d.locally_compact == Tri::Holds);
}

TEST_CASE("classification agrees with the direct check on random specs") {
    Rng rng(47);
    for (int trial = 0; trial < 50; ++trial) {
        std::map<std::uint64_t, LoopCount> head;
        const std::size_t picks = 1 + rng.next_below(4);
        for (std::size_t i = 0; i < picks; ++i) {
            const std::uint64_t len = 1 + rng.next_below(6);
            if (len == 1) head[len] = LoopCount::of(1);
            else head[len] = rng.next_below(5) == 0 ? LoopCount::inf()
                                                    : LoopCount::of(1 + rng.next_below(3));
        }
        LoopTail tail;
        switch (rng.next_below(3)) {
            case 0: tail.kind = LoopTail::Kind::Zero; break;
            case 1:
                tail.kind = LoopTail::Kind::Constant;
                tail.constant = LoopCount::of(rng.next_below(2));
                break;
            default:
                tail.kind = LoopTail::Kind::Exponential;
                tail.base = 2.0;
                break;
        }
        bool valid = tail.kind != LoopTail::Kind::Zero;
        for (auto& [len, cnt] : head) valid = valid || cnt.positive();
        if (!valid) continue;
        const auto rep = classify_loop_system(head, tail);
        const auto direct = check_f_property(ShiftPresentation::loop_system(head, tail));
        CHECK(rep.f_property.state == direct.state);
    }
}

TEST_CASE("sandwich patterns are rejected under word finiteness") {
    CHECK(f_property_word_restriction_check(unit_loops()));
    // finite alphabet: vacuous (no symbol tends to infinity)
    CHECK(f_property_word_restriction_check(
        ShiftPresentation::finite_matrix({1, 2}, {{1, 1}, {1, 2}, {2, 1}})));
    CHECK_THROWS_AS(f_property_word_restriction_check(ShiftPresentation::full_shift()),
                    PreconditionViolated);
}
