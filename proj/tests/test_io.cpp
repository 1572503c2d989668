#include <catch2/catch_amalgamated.hpp>

#include "cms/io.hpp"

using namespace cms;

TEST_CASE("shift schemas round-trip") {
    const std::vector<std::string> inputs{
        R"({"type":"finite_matrix","alphabet":[1,2],"edges":[[1,1],[1,2],[2,1]]})",
        R"({"type":"loop_system","loops":{"1":1,"2":"inf"},"tail":"zero"})",
        R"({"type":"loop_system","loops":{},"tail":{"kind":"constant","value":1}})",
        R"({"type":"full_shift"})",
        R"({"type":"rule","name":"loops2_plus_random_walk"})",
    };
    for (const auto& text : inputs) {
        CAPTURE(text);
        const auto shift = shift_from_json(Json::parse(text));
        const auto dumped = shift_to_json(shift);
        const auto again = shift_from_json(dumped);
        CHECK(shift_to_json(again) == dumped);  // fixed point after one round
    }
    // spot semantics: the alphabet survives
    const auto gm = shift_from_json(Json::parse(inputs[0]));
    CHECK(gm.is_admissible({1, 2, 1}));
    CHECK_FALSE(gm.is_admissible({2, 2}));
}

TEST_CASE("potential schema") {
    const auto j = Json::parse(
        R"({"depth":1,"head":{"1":0.0},"tail":{"kind":"log","coeff":-2.0},
            "var_bound":{"kind":"geometric","C":1.0,"lambda":0.5}})");
    const auto phi = potential_from_json(j);
    CHECK(phi.depth() == 1);
    CHECK(phi.value({1}) == 0.0);
    CHECK(phi.value({5}) == Catch::Approx(-2.0 * std::log(5.0)));
    CHECK(phi.var_bound().kind == VarBound::Kind::Geometric);

    const auto round = potential_from_json(potential_to_json(phi));
    CHECK(round.value({7}) == phi.value({7}));

    // depth-2 heads use comma-joined keys
    const auto j2 = Json::parse(R"({"depth":2,"head":{"1,2":0.25},"tail":{"kind":"none"}})");
    const auto phi2 = potential_from_json(j2);
    CHECK(phi2.value({1, 2}) == 0.25);

    // exact weights survive the trip
    const auto j3 = Json::parse(
        R"({"depth":1,"head":{},"tail":{"kind":"log_weight","coeff":"1","ratio":"1/2"}})");
    const auto phi3 = potential_from_json(j3);
    const auto sum = phi3.exp_sum_full_shift(1.0);
    REQUIRE(sum.finite);
    CHECK(sum.value.rational() == 1);
}

TEST_CASE("measure schemas round-trip with exact rationals") {
    const auto full = ShiftPresentation::full_shift();
    const std::vector<std::string> inputs{
        R"({"type":"periodic","word":[1,2]})",
        R"({"type":"periodic","word":[1,"inf"]})",
        R"({"type":"bernoulli_geometric","head":{},"coeff":"1","ratio":"1/2","tail_start":1})",
        R"({"type":"bernoulli_finite","head":{"1":"1/2","2":"1/2"}})",
        R"({"type":"dirac_infinity"})",
        R"({"type":"combo","parts":[
             {"weight":"1/2","measure":{"type":"periodic","word":[1]}},
             {"weight":"1/2","measure":{"type":"dirac_infinity"}}]})",
    };
    for (const auto& text : inputs) {
        CAPTURE(text);
        const auto m = measure_from_json(full, Json::parse(text));
        const auto dumped = measure_to_json(m);
        const auto again = measure_from_json(full, dumped);
        CHECK(again == m);
        CHECK(measure_to_json(again).dump() == dumped.dump());  // byte-identical
    }
    // rationals come back as "p/q" strings
    const auto m = measure_from_json(full, Json::parse(inputs[2]));
    CHECK(measure_to_json(m)["ratio"] == "1/2");

    const auto markov = measure_from_json(
        full, Json::parse(
                  R"({"type":"finite_markov","support":[1,2],
                      "P":[["1/2","1/2"],["1/2","1/2"]],"pi":["1/2","1/2"]})"));
    CHECK(markov.mass({1, 2}).rational() == Rat(1, 4));
}

TEST_CASE("sequence construction with templates") {
    const auto full = ShiftPresentation::full_shift();
    const auto seq = sequence_from_json(
        full, Json::parse(
                  R"({"kind":"template","n_list":[4,8,16],
                      "measure":{"type":"periodic","word":[1,"$n"]}})"));
    REQUIRE(seq.size() == 3);
    CHECK(seq[0].mass({4}).rational() == Rat(1, 2));
    CHECK(seq[2].mass({16}).rational() == Rat(1, 2));
}

TEST_CASE("parse errors carry field paths") {
    const auto full = ShiftPresentation::full_shift();
    CHECK_THROWS_WITH(shift_from_json(Json::parse(R"({"no_type":1})")),
                      Catch::Matchers::ContainsSubstring("type"));
    CHECK_THROWS_WITH(
        measure_from_json(full, Json::parse(R"({"type":"bernoulli_geometric",
            "head":{},"coeff":"x/y","ratio":"1/2","tail_start":1})")),
        Catch::Matchers::ContainsSubstring("measure.coeff"));
    CHECK_THROWS_AS(shift_from_json(Json::parse(R"({"type":"rule","name":"unknown"})")),
                    ParseError);
}

TEST_CASE("reports serialize deterministically") {
    const auto shift = shift_from_json(
        Json::parse(R"({"type":"loop_system","loops":{"1":1,"2":"inf"},"tail":"zero"})"));
    const auto rep = classify_loop_system(shift.loops().head, shift.loops().tail);
    const auto a = property_report_to_json(rep).dump(2);
    const auto b = property_report_to_json(
                       classify_loop_system(shift.loops().head, shift.loops().tail))
                       .dump(2);
    CHECK(a == b);
}
