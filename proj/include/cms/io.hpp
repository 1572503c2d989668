#pragma once

/**
 * @file io.hpp
 * @brief JSON schemas for shifts, potentials, measures, and reports.
 *
 * Exact rationals travel as "p/q" strings, floats as shortest round-trip
 * decimals, and the inf symbol as the string "inf". Keys keep insertion
 * order (ordered_json) so identical inputs serialize byte-identically.
 *
 * Shift presentations:
 *   {"type":"finite_matrix","alphabet":[1,2],"edges":[[1,1],[1,2],[2,1]]}
 *   {"type":"loop_system","loops":{"1":1,"2":"inf"},"tail":"zero"}
 *   {"type":"loop_system","loops":{},"tail":{"kind":"constant","value":1}}
 *   {"type":"full_shift"}
 *   {"type":"rule","name":"loops2_plus_random_walk"}
 *
 * Potentials:
 *   {"depth":1,"head":{"1":0.0},"tail":{"kind":"log","coeff":-2.0},
 *    "var_bound":{"kind":"geometric","C":1.0,"lambda":0.5}}
 *
 * Measures:
 *   {"type":"periodic","word":[1,"inf"]}
 *   {"type":"finite_markov","support":[1,2],"P":[["1/2","1/2"],["1","0"]],
 *    "pi":["2/3","1/3"]}
 *   {"type":"bernoulli_geometric","head":{},"coeff":"1","ratio":"1/2","tail_start":1}
 *   {"type":"bernoulli_finite","head":{"1":"1/2","2":"1/2"}}
 *   {"type":"bernoulli_power","s":2.0}
 *   {"type":"dirac_infinity"}
 *   {"type":"combo","parts":[{"weight":"1/2","measure":{...}}, ...]}
 *
 * Measure sequences for convergence runs:
 *   {"kind":"template","n_list":[4,8,16],"measure":{"type":"periodic","word":[1,"$n"]}}
 *   {"kind":"zero_measure","n_list":[8,16,32]}
 */

#include "cms/approx.hpp"
#include "cms/measure.hpp"
#include "cms/potential.hpp"
#include "cms/properties.hpp"
#include "cms/shift.hpp"
#include "cms/thermo.hpp"
#include "cms/topology.hpp"

#include <nlohmann/json.hpp>

#include <string>
#include <vector>

namespace cms {

using Json = nlohmann::ordered_json;

struct ParseError : std::invalid_argument {
    ParseError(const std::string& path, const std::string& what)
        : std::invalid_argument(path + ": " + what) {}
};

namespace io_detail {

inline Symbol symbol_from_json(const Json& j, const std::string& path) {
    if (j.is_string()) {
        if (j.get<std::string>() == "inf") return kInf;
        throw ParseError(path, "expected a symbol or \"inf\"");
    }
    if (!j.is_number_unsigned()) throw ParseError(path, "expected a nonnegative symbol");
    return j.get<Symbol>();
}

inline Json symbol_to_json(Symbol s) {
    if (s == kInf) return Json("inf");
    return Json(s);
}

inline Scalar scalar_from_json(const Json& j, const std::string& path) {
    if (j.is_string()) {
        try {
            return Scalar(rat_from_string(j.get<std::string>()));
        } catch (const std::invalid_argument& e) {
            throw ParseError(path, e.what());
        }
    }
    if (j.is_number_integer()) return Scalar(Rat(j.get<long long>()));
    if (j.is_number()) return Scalar::approx(j.get<double>());
    throw ParseError(path, "expected a number or \"p/q\" string");
}

inline Rat rat_from_json(const Json& j, const std::string& path) {
    const Scalar s = scalar_from_json(j, path);
    if (!s.is_exact()) throw ParseError(path, "expected an exact rational");
    return s.rational();
}

inline Json scalar_to_json(const Scalar& s) {
    if (s.is_exact()) return Json(rat_to_string(s.rational()));
    return Json(s.value());
}

}  // namespace io_detail

// ---------------------------------------------------------------------------
// shifts

inline ShiftPresentation shift_from_json(const Json& j) {
    using io_detail::symbol_from_json;
    if (!j.is_object() || !j.contains("type")) throw ParseError("shift", "missing \"type\"");
    const std::string type = j.at("type").get<std::string>();
    if (type == "full_shift") return ShiftPresentation::full_shift();
    if (type == "finite_matrix") {
        if (!j.contains("alphabet") || !j.contains("edges"))
            throw ParseError("shift", "finite_matrix needs \"alphabet\" and \"edges\"");
        std::vector<Symbol> alphabet;
        for (const auto& a : j.at("alphabet"))
            alphabet.push_back(symbol_from_json(a, "shift.alphabet"));
        std::vector<std::pair<Symbol, Symbol>> edges;
        for (const auto& e : j.at("edges")) {
            if (!e.is_array() || e.size() != 2)
                throw ParseError("shift.edges", "each edge is a pair [i, j]");
            edges.emplace_back(symbol_from_json(e[0], "shift.edges"),
                               symbol_from_json(e[1], "shift.edges"));
        }
        return ShiftPresentation::finite_matrix(std::move(alphabet), edges);
    }
    if (type == "loop_system") {
        std::map<std::uint64_t, LoopCount> head;
        if (j.contains("loops")) {
            for (const auto& [key, val] : j.at("loops").items()) {
                const std::uint64_t len = std::stoull(key);
                if (val.is_string() && val.get<std::string>() == "inf")
                    head[len] = LoopCount::inf();
                else if (val.is_number_unsigned())
                    head[len] = LoopCount::of(val.get<std::uint64_t>());
                else
                    throw ParseError("shift.loops." + key, "count must be a number or \"inf\"");
            }
        }
        LoopTail tail;
        const Json jt = j.contains("tail") ? j.at("tail") : Json("zero");
        if (jt.is_string()) {
            const std::string s = jt.get<std::string>();
            if (s == "zero") tail.kind = LoopTail::Kind::Zero;
            else if (s == "superexponential") tail.kind = LoopTail::Kind::Superexponential;
            else throw ParseError("shift.tail", "unknown tail \"" + s + "\"");
        } else {
            const std::string kind = jt.at("kind").get<std::string>();
            if (kind == "zero") {
                tail.kind = LoopTail::Kind::Zero;
            } else if (kind == "constant") {
                tail.kind = LoopTail::Kind::Constant;
                const auto& v = jt.at("value");
                tail.constant = v.is_string() && v.get<std::string>() == "inf"
                                    ? LoopCount::inf()
                                    : LoopCount::of(v.get<std::uint64_t>());
            } else if (kind == "exponential") {
                tail.kind = LoopTail::Kind::Exponential;
                tail.base = jt.at("base").get<double>();
            } else if (kind == "superexponential") {
                tail.kind = LoopTail::Kind::Superexponential;
            } else {
                throw ParseError("shift.tail.kind", "unknown tail kind \"" + kind + "\"");
            }
        }
        return ShiftPresentation::loop_system(head, tail);
    }
    if (type == "rule") {
        const std::string name = j.at("name").get<std::string>();
        if (name == "loops2_plus_random_walk")
            return ShiftPresentation::rule_graph(BuiltinRule::Loops2PlusRandomWalk);
        throw ParseError("shift.name", "unknown rule graph \"" + name + "\"");
    }
    throw ParseError("shift.type", "unknown presentation \"" + type + "\"");
}

inline Json shift_to_json(const ShiftPresentation& shift) {
    Json j;
    switch (shift.kind()) {
        case ShiftPresentation::Kind::FullShift:
            j["type"] = "full_shift";
            return j;
        case ShiftPresentation::Kind::FiniteMatrix: {
            j["type"] = "finite_matrix";
            j["alphabet"] = shift.matrix().alphabet;
            Json edges = Json::array();
            const auto& d = shift.matrix();
            for (std::size_t a = 0; a < d.alphabet.size(); ++a)
                for (std::size_t b = 0; b < d.alphabet.size(); ++b)
                    if (d.edge[a][b]) edges.push_back({d.alphabet[a], d.alphabet[b]});
            j["edges"] = edges;
            return j;
        }
        case ShiftPresentation::Kind::LoopSystem: {
            j["type"] = "loop_system";
            Json loops = Json::object();
            for (auto& [len, cnt] : shift.loops().head)
                loops[std::to_string(len)] = cnt.infinite ? Json("inf") : Json(cnt.n);
            j["loops"] = loops;
            const auto& tail = shift.loops().tail;
            switch (tail.kind) {
                case LoopTail::Kind::Zero: j["tail"] = "zero"; break;
                case LoopTail::Kind::Constant:
                    j["tail"] = {{"kind", "constant"},
                                 {"value", tail.constant.infinite ? Json("inf")
                                                                  : Json(tail.constant.n)}};
                    break;
                case LoopTail::Kind::Exponential:
                    j["tail"] = {{"kind", "exponential"}, {"base", tail.base}};
                    break;
                case LoopTail::Kind::Superexponential:
                    j["tail"] = "superexponential";
                    break;
            }
            return j;
        }
        case ShiftPresentation::Kind::RuleGraph:
            j["type"] = "rule";
            j["name"] = "loops2_plus_random_walk";
            return j;
    }
    return j;
}

// ---------------------------------------------------------------------------
// potentials

inline Potential potential_from_json(const Json& j) {
    if (!j.is_object()) throw ParseError("potential", "expected an object");
    const int depth = j.contains("depth") ? j.at("depth").get<int>() : 1;
    std::map<Word, HeadValue> head;
    if (j.contains("head")) {
        for (const auto& [key, val] : j.at("head").items()) {
            Word w;
            std::size_t pos = 0;
            while (pos < key.size()) {
                const auto comma = key.find(',', pos);
                const std::string tok =
                    key.substr(pos, comma == std::string::npos ? comma : comma - pos);
                w.push_back(static_cast<Symbol>(std::stoull(tok)));
                if (comma == std::string::npos) break;
                pos = comma + 1;
            }
            HeadValue hv;
            if (val.is_object()) {
                hv.value = val.at("value").get<double>();
                if (val.contains("exp_exact"))
                    hv.exp_value = io_detail::rat_from_json(val.at("exp_exact"),
                                                            "potential.head." + key);
            } else {
                hv.value = val.get<double>();
            }
            head[w] = hv;
        }
    }
    PotentialTail tail;
    if (j.contains("tail") && !j.at("tail").is_null()) {
        const Json& jt = j.at("tail");
        const std::string kind = jt.at("kind").get<std::string>();
        if (kind == "none") {
            tail = PotentialTail::none();
        } else if (kind == "constant") {
            tail = PotentialTail::constant(jt.at("value").get<double>());
        } else if (kind == "poly") {
            tail = PotentialTail::poly(jt.value("c0", 0.0), jt.value("c1", 0.0),
                                       jt.value("c2", 0.0));
        } else if (kind == "log") {
            tail = PotentialTail::log(jt.at("coeff").get<double>());
        } else if (kind == "log_weight") {
            tail = PotentialTail::log_weight(
                io_detail::rat_from_json(jt.at("coeff"), "potential.tail.coeff"),
                io_detail::rat_from_json(jt.at("ratio"), "potential.tail.ratio"));
        } else {
            throw ParseError("potential.tail.kind", "unknown kind \"" + kind + "\"");
        }
    }
    VarBound var;
    if (j.contains("var_bound")) {
        const Json& jv = j.at("var_bound");
        const std::string kind = jv.at("kind").get<std::string>();
        if (kind == "zero") {
            var.kind = VarBound::Kind::Zero;
        } else if (kind == "geometric") {
            var.kind = VarBound::Kind::Geometric;
            var.C = jv.at("C").get<double>();
            var.lambda = jv.at("lambda").get<double>();
        } else {
            throw ParseError("potential.var_bound.kind", "unknown kind \"" + kind + "\"");
        }
    }
    return Potential(depth, std::move(head), tail, var);
}

inline Json potential_to_json(const Potential& phi) {
    Json j;
    j["depth"] = phi.depth();
    Json head = Json::object();
    for (auto& [w, hv] : phi.head()) {
        std::string key;
        for (std::size_t i = 0; i < w.size(); ++i) {
            if (i) key += ",";
            key += std::to_string(w[i]);
        }
        if (hv.exp_value)
            head[key] = {{"value", hv.value}, {"exp_exact", rat_to_string(*hv.exp_value)}};
        else
            head[key] = hv.value;
    }
    j["head"] = head;
    const auto& tail = phi.tail();
    switch (tail.kind) {
        case PotentialTail::Kind::None: j["tail"] = {{"kind", "none"}}; break;
        case PotentialTail::Kind::Poly:
            j["tail"] = {{"kind", "poly"}, {"c0", tail.c0}, {"c1", tail.c1}, {"c2", tail.c2}};
            break;
        case PotentialTail::Kind::Log:
            j["tail"] = {{"kind", "log"}, {"coeff", tail.log_coeff}};
            break;
        case PotentialTail::Kind::LogWeightGeometric:
            j["tail"] = {{"kind", "log_weight"},
                         {"coeff", rat_to_string(tail.lwg_coeff)},
                         {"ratio", rat_to_string(tail.lwg_ratio)}};
            break;
    }
    const auto& var = phi.var_bound();
    if (var.kind == VarBound::Kind::Zero) j["var_bound"] = {{"kind", "zero"}};
    else j["var_bound"] = {{"kind", "geometric"}, {"C", var.C}, {"lambda", var.lambda}};
    return j;
}

// ---------------------------------------------------------------------------
// measures

inline Measure measure_from_json(const ShiftPresentation& shift, const Json& j) {
    using io_detail::rat_from_json;
    using io_detail::scalar_from_json;
    using io_detail::symbol_from_json;
    if (!j.is_object() || !j.contains("type")) throw ParseError("measure", "missing \"type\"");
    const std::string type = j.at("type").get<std::string>();
    if (type == "periodic") {
        BarWord w;
        for (const auto& s : j.at("word")) w.push_back(symbol_from_json(s, "measure.word"));
        return Measure::periodic(shift, w);
    }
    if (type == "finite_markov") {
        std::vector<Symbol> support;
        for (const auto& s : j.at("support"))
            support.push_back(symbol_from_json(s, "measure.support"));
        std::vector<std::vector<Scalar>> P;
        for (const auto& row : j.at("P")) {
            std::vector<Scalar> r;
            for (const auto& x : row) r.push_back(scalar_from_json(x, "measure.P"));
            P.push_back(std::move(r));
        }
        std::vector<Scalar> pi;
        for (const auto& x : j.at("pi")) pi.push_back(scalar_from_json(x, "measure.pi"));
        return Measure::finite_markov(shift, std::move(support), std::move(P), std::move(pi));
    }
    if (type == "bernoulli_geometric") {
        std::map<Symbol, Rat> head;
        if (j.contains("head"))
            for (const auto& [key, val] : j.at("head").items())
                head[std::stoull(key)] = rat_from_json(val, "measure.head." + key);
        return Measure::bernoulli_geometric(
            std::move(head), rat_from_json(j.at("coeff"), "measure.coeff"),
            rat_from_json(j.at("ratio"), "measure.ratio"),
            j.value("tail_start", Symbol{1}));
    }
    if (type == "bernoulli_finite") {
        std::map<Symbol, Rat> head;
        for (const auto& [key, val] : j.at("head").items())
            head[std::stoull(key)] = rat_from_json(val, "measure.head." + key);
        return Measure::bernoulli_finite(std::move(head));
    }
    if (type == "bernoulli_power") return Measure::bernoulli_power(j.at("s").get<double>());
    if (type == "dirac_infinity") return Measure::dirac_infinity(shift);
    if (type == "combo") {
        std::vector<std::pair<Rat, Measure>> parts;
        for (const auto& p : j.at("parts"))
            parts.emplace_back(rat_from_json(p.at("weight"), "measure.parts.weight"),
                               measure_from_json(shift, p.at("measure")));
        return Measure::combo(parts);
    }
    throw ParseError("measure.type", "unknown measure \"" + type + "\"");
}

inline Json measure_to_json(const Measure& m) {
    Json j;
    switch (m.kind()) {
        case Measure::Kind::Periodic: {
            j["type"] = "periodic";
            Json w = Json::array();
            for (Symbol s : m.cycle()) w.push_back(io_detail::symbol_to_json(s));
            j["word"] = w;
            return j;
        }
        case Measure::Kind::FiniteMarkov: {
            j["type"] = "finite_markov";
            j["support"] = m.support();
            Json P = Json::array();
            for (const auto& row : m.transition()) {
                Json r = Json::array();
                for (const auto& x : row) r.push_back(io_detail::scalar_to_json(x));
                P.push_back(r);
            }
            j["P"] = P;
            Json pi = Json::array();
            for (const auto& x : m.stationary()) pi.push_back(io_detail::scalar_to_json(x));
            j["pi"] = pi;
            return j;
        }
        case Measure::Kind::Bernoulli: {
            if (const auto tail = m.bernoulli_geometric_tail()) {
                j["type"] = "bernoulli_geometric";
                Json head = Json::object();
                for (auto& [s, w] : m.bernoulli_head())
                    head[std::to_string(s)] = rat_to_string(w);
                j["head"] = head;
                j["coeff"] = rat_to_string(tail->coeff);
                j["ratio"] = rat_to_string(tail->ratio);
                j["tail_start"] = tail->start;
                return j;
            }
            j["type"] = "bernoulli_finite";
            Json head = Json::object();
            for (auto& [s, w] : m.bernoulli_head()) head[std::to_string(s)] = rat_to_string(w);
            j["head"] = head;
            return j;
        }
        case Measure::Kind::DiracInfinity:
            j["type"] = "dirac_infinity";
            return j;
        case Measure::Kind::Combo: {
            j["type"] = "combo";
            Json parts = Json::array();
            for (auto& [w, part] : m.parts())
                parts.push_back({{"weight", rat_to_string(w)}, {"measure", measure_to_json(*part)}});
            j["parts"] = parts;
            return j;
        }
    }
    return j;
}

// ---------------------------------------------------------------------------
// measure sequences

inline std::vector<Measure> sequence_from_json(const ShiftPresentation& shift, const Json& j) {
    if (!j.is_object() || !j.contains("kind")) throw ParseError("sequence", "missing \"kind\"");
    const std::string kind = j.at("kind").get<std::string>();
    std::vector<std::uint64_t> n_list;
    for (const auto& n : j.at("n_list")) n_list.push_back(n.get<std::uint64_t>());
    if (kind == "template") {
        std::vector<Measure> out;
        for (const std::uint64_t n : n_list) {
            Json inst = j.at("measure");
            // substitute "$n" in word arrays
            std::function<void(Json&)> subst = [&](Json& node) {
                if (node.is_array() || node.is_object()) {
                    for (auto& child : node) subst(child);
                } else if (node.is_string() && node.get<std::string>() == "$n") {
                    node = Json(n);
                }
            };
            subst(inst);
            out.push_back(measure_from_json(shift, inst));
        }
        return out;
    }
    if (kind == "zero_measure") {
        const auto seq = zero_measure_sequence(shift, n_list);
        if (seq.refused)
            throw ParseError("sequence",
                             "zero-measure sequence refused: " + seq.note);
        return seq.measures;
    }
    throw ParseError("sequence.kind", "unknown kind \"" + kind + "\"");
}

// ---------------------------------------------------------------------------
// reports

inline Json property_report_to_json(const PropertyReport& rep) {
    Json j;
    Json f;
    f["state"] = tri_to_string(rep.f_property.state);
    if (rep.f_property.witness) {
        f["witness"] = {{"symbol", io_detail::symbol_to_json(rep.f_property.witness->symbol)},
                        {"length", rep.f_property.witness->length}};
    }
    if (!rep.f_property.note.empty()) f["note"] = rep.f_property.note;
    j["f_property"] = f;
    Json r;
    r["found"] = rep.rome.found;
    if (rep.rome.found) {
        r["rome"] = rep.rome.pair.rome;
        r["bound"] = rep.rome.pair.bound;
    }
    if (!rep.rome.note.empty()) r["note"] = rep.rome.note;
    j["finite_uniform_rome"] = r;
    j["finite_entropy"] = tri_to_string(rep.finite_entropy);
    j["locally_compact"] = tri_to_string(rep.locally_compact);
    return j;
}

inline Json pressure_to_json(const PressureEstimate& est) {
    Json j;
    j["value"] = est.diverged ? Json("inf") : Json(est.value);
    j["diverged"] = est.diverged;
    switch (est.method) {
        case PressureMethod::Auto: j["method"] = "auto"; break;
        case PressureMethod::ClosedForm: j["method"] = "closed-form"; break;
        case PressureMethod::LoopGeneratingFunction: j["method"] = "loop-generating-function"; break;
        case PressureMethod::Truncation: j["method"] = "truncation"; break;
        case PressureMethod::PartitionSum: j["method"] = "partition-sum"; break;
    }
    switch (est.error_kind) {
        case PressureEstimate::ErrorKind::Exact: j["error"] = "exact"; break;
        case PressureEstimate::ErrorKind::TwoSided: j["error"] = est.error_bound; break;
        case PressureEstimate::ErrorKind::OneSidedLower: j["error"] = "one-sided (lower)"; break;
    }
    if (std::isfinite(est.certified_lower)) j["certified_lower"] = est.certified_lower;
    Json table = Json::array();
    for (auto [param, value] : est.table) table.push_back({{"step", param}, {"value", value}});
    j["table"] = table;
    if (!est.note.empty()) j["note"] = est.note;
    return j;
}

inline Json convergence_report_to_json(const ConvergenceReport& rep) {
    Json j;
    j["classification"] = limit_class_to_string(rep.classification);
    j["lambda"] = rep.lambda;
    j["max_additivity_defect"] = rep.max_additivity_defect;
    Json table = Json::array();
    for (const auto& fit : rep.table) {
        Json row;
        Json w = Json::array();
        for (Symbol s : fit.cylinder) w.push_back(io_detail::symbol_to_json(s));
        row["cylinder"] = w;
        row["masses"] = fit.masses;
        row["fitted_limit"] = fit.fitted_limit;
        table.push_back(row);
    }
    j["cylinders"] = table;
    j["cylinder_distance_to_candidate"] = rep.cylinder_dist_to_candidate;
    j["weakstar_distance_to_candidate"] = rep.weakstar_dist_to_candidate;
    if (!rep.note.empty()) j["note"] = rep.note;
    return j;
}

inline Json duality_report_to_json(const DualityReport& rep) {
    Json j;
    j["target"] = rep.target;
    j["inf_achieved"] = rep.inf_achieved;
    j["gap"] = rep.gap;
    j["min_margin"] = rep.min_margin;
    j["evaluations"] = rep.evaluations;
    Json cert = Json::array();
    for (const auto& [w, c] : rep.certificate) {
        Json e;
        e["word"] = w;
        e["coefficient"] = c;
        cert.push_back(e);
    }
    j["certificate"] = cert;
    j["note"] = rep.note;
    return j;
}

inline Json dichotomy_report_to_json(const DichotomyReport& rep) {
    Json j;
    j["f_property"] = tri_to_string(rep.f_property);
    if (rep.f_property == Tri::Holds) {
        j["sandwiches_checked"] = rep.sandwiches_checked;
        j["all_rejected"] = rep.sandwiches_all_rejected;
    } else {
        Json targets = Json::array();
        for (const auto& t : rep.targets) {
            Json e;
            e["target"] = t.target_cycle;
            Json block = Json::array();
            for (Symbol s : t.inf_block) block.push_back(io_detail::symbol_to_json(s));
            e["inf_block"] = block;
            e["k"] = t.k;
            e["distance"] = t.distance;
            targets.push_back(e);
        }
        j["targets"] = targets;
        j["max_distance"] = rep.max_distance;
        j["within_tolerance"] = rep.all_targets_within_tolerance;
    }
    j["note"] = rep.note;
    return j;
}

inline Json gluing_plan_to_json(const GluingPlan& plan) {
    Json j;
    j["segments"] = plan.segments;
    j["connectors"] = plan.connectors;
    j["offsets"] = plan.offsets;
    j["segment_depth1_errors"] = plan.segment_depth1_errors;
    j["connector_bound"] = plan.connector_bound;
    j["cycle"] = plan.cycle;
    return j;
}

}  // namespace cms
