// cms: command-line driver for the countable-Markov-shift toolkit.
//
// Subcommands: classify, pressure, s-infinity, converge, approximate,
// dichotomy, dualvp, demo. Inputs are JSON files (see include/cms/io.hpp for
// the schemas); reports go to stdout or --out as JSON, with optional CSV
// tables for plotting. Exit codes: 0 success, 2 refused/undecided/not
// converged, 1 bad input or internal error.

#include "cms/approx.hpp"
#include "cms/io.hpp"
#include "cms/thermo.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <string>

namespace {

using cms::Json;

Json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw cms::ParseError(path, "cannot open file");
    Json j;
    try {
        in >> j;
    } catch (const nlohmann::json::parse_error& e) {
        throw cms::ParseError(path, e.what());
    }
    return j;
}

void emit(const Json& j, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << j.dump(2) << "\n";
        return;
    }
    std::ofstream out(out_path);
    out << j.dump(2) << "\n";
}

void emit_csv(const std::string& path, const std::vector<std::string>& meta,
              const std::vector<std::string>& columns,
              const std::vector<std::vector<double>>& rows) {
    std::ofstream out(path);
    for (const auto& m : meta) out << "# " << m << "\n";
    for (std::size_t c = 0; c < columns.size(); ++c)
        out << columns[c] << (c + 1 < columns.size() ? "," : "\n");
    for (const auto& row : rows) {
        for (std::size_t c = 0; c < row.size(); ++c)
            out << cms::double_to_string(row[c]) << (c + 1 < row.size() ? "," : "\n");
    }
}

int run_demo_escape_full_shift(const std::string& out_csv) {
    // orbits (1, n) on the full shift: the cylinder [1] keeps mass 1/2 at
    // every step while each [1, s] eventually empties; the limit is only
    // finitely additive and corresponds to the compactified orbit (1, inf)
    const auto shift = cms::ShiftPresentation::full_shift();
    std::vector<cms::Measure> seq;
    std::vector<std::uint64_t> ns{4, 8, 16, 32, 64, 128, 256};
    for (auto n : ns) seq.push_back(cms::Measure::periodic(shift, {1, n}));
    const auto rep = cms::diagnose_convergence(shift, seq);

    std::vector<std::vector<double>> rows;
    const auto target = cms::Measure::periodic(shift, {1, cms::kInf});
    for (std::size_t t = 0; t < seq.size(); ++t) {
        std::vector<double> row{static_cast<double>(ns[t]), seq[t].mass({1}).value()};
        for (cms::Symbol s = 1; s <= 4; ++s) row.push_back(seq[t].mass({1, s}).value());
        row.push_back(cms::weakstar_distance(shift, seq[t], target).value);
        rows.push_back(row);
    }
    if (!out_csv.empty()) {
        emit_csv(out_csv,
                 {"escape on the full shift: orbits (1, n)",
                  "masses are exact orbit counts; distances truncated at 256 cylinders "
                  "(tail bound 2^-256), depth 6, symbol cap 8"},
                 {"n", "mass[1]", "mass[1,1]", "mass[1,2]", "mass[1,3]", "mass[1,4]",
                  "weakstar_distance_to_orbit_1inf"},
                 rows);
    }
    Json j;
    j["sequence"] = "periodic orbits (1, n), n in [4, 256]";
    j["diagnosis"] = cms::convergence_report_to_json(rep);
    emit(j, "");
    return rep.classification == cms::LimitClass::OutsideConvexHull ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"countable Markov shift toolkit"};
    app.require_subcommand(1);

    std::string shift_path, potential_path, measure_path, sequence_path, targets_path;
    std::string out_path, out_csv, method = "auto", demo_name;
    std::uint64_t seed = 7;
    std::size_t cap = 64, symbols = 8, num_targets = 5, n_param = 512;
    int depth = 6;
    double tol = 1e-3, tau = 0.05;

    auto* classify = app.add_subcommand("classify", "finiteness properties of a presentation");
    classify->add_option("--shift", shift_path)->required();
    classify->add_option("--cap", cap);
    classify->add_option("--out", out_path);

    auto* pressure_cmd = app.add_subcommand("pressure", "Gurevich pressure of a potential");
    pressure_cmd->add_option("--shift", shift_path)->required();
    pressure_cmd->add_option("--potential", potential_path)->required();
    pressure_cmd->add_option("--method", method)
        ->check(CLI::IsMember({"auto", "closed-form", "loop-gf", "truncation", "partition-sum"}));
    pressure_cmd->add_option("--out", out_path);

    auto* sinf = app.add_subcommand("s-infinity", "finiteness threshold of t*phi");
    sinf->add_option("--shift", shift_path)->required();
    sinf->add_option("--potential", potential_path)->required();
    sinf->add_option("--tol", tol);
    sinf->add_option("--out", out_path);

    auto* converge = app.add_subcommand("converge", "limit diagnosis of a measure sequence");
    converge->add_option("--shift", shift_path)->required();
    converge->add_option("--sequence", sequence_path)->required();
    converge->add_option("--depth", depth);
    converge->add_option("--cap", symbols);
    converge->add_option("--out", out_path);

    auto* approximate = app.add_subcommand("approximate", "periodic gluing approximation");
    approximate->add_option("--shift", shift_path)->required();
    approximate->add_option("--targets", targets_path)->required();
    approximate->add_option("--n", n_param);
    approximate->add_option("--seed", seed);
    approximate->add_option("--out", out_path);

    auto* dichotomy = app.add_subcommand("dichotomy", "the new-ergodic-measure dichotomy");
    dichotomy->add_option("--shift", shift_path)->required();
    dichotomy->add_option("--targets", num_targets);
    dichotomy->add_option("--tau", tau);
    dichotomy->add_option("--depth", depth);
    dichotomy->add_option("--seed", seed);
    dichotomy->add_option("--out", out_path);

    auto* dualvp = app.add_subcommand("dualvp", "dual variational principle check");
    dualvp->add_option("--shift", shift_path)->required();
    dualvp->add_option("--potential", potential_path)->required();
    dualvp->add_option("--measure", measure_path)->required();
    dualvp->add_option("--depth", depth)->description("indicator family depth");
    dualvp->add_option("--symbols", symbols);
    dualvp->add_option("--seed", seed);
    dualvp->add_option("--out", out_path);

    auto* demo = app.add_subcommand("demo", "built-in demonstrations");
    demo->add_option("name", demo_name)->required()->check(CLI::IsMember({"escape-full-shift"}));
    demo->add_option("--out", out_csv);

    CLI11_PARSE(app, argc, argv);

    try {
        if (*classify) {
            const auto shift = cms::shift_from_json(load_json(shift_path));
            cms::PropertyReport rep;
            if (shift.kind() == cms::ShiftPresentation::Kind::LoopSystem) {
                rep = cms::classify_loop_system(shift.loops().head, shift.loops().tail);
            } else {
                rep.f_property = cms::check_f_property(shift, cap);
                rep.rome = cms::find_finite_rome(shift);
                switch (shift.kind()) {
                    case cms::ShiftPresentation::Kind::FiniteMatrix:
                        rep.finite_entropy = cms::Tri::Holds;
                        rep.locally_compact = cms::Tri::Holds;
                        break;
                    case cms::ShiftPresentation::Kind::FullShift:
                        rep.finite_entropy = cms::Tri::Fails;
                        rep.locally_compact = cms::Tri::Fails;
                        break;
                    default:
                        rep.finite_entropy = cms::Tri::Unknown;
                        rep.locally_compact = cms::Tri::Unknown;
                        break;
                }
            }
            emit(cms::property_report_to_json(rep), out_path);
            return rep.f_property.state == cms::Tri::Unknown ? 2 : 0;
        }
        if (*pressure_cmd) {
            const auto shift = cms::shift_from_json(load_json(shift_path));
            const auto phi = cms::potential_from_json(load_json(potential_path));
            cms::PressureMethod m = cms::PressureMethod::Auto;
            if (method == "closed-form") m = cms::PressureMethod::ClosedForm;
            else if (method == "loop-gf") m = cms::PressureMethod::LoopGeneratingFunction;
            else if (method == "truncation") m = cms::PressureMethod::Truncation;
            else if (method == "partition-sum") m = cms::PressureMethod::PartitionSum;
            const auto est = cms::pressure(shift, phi, m);
            emit(cms::pressure_to_json(est), out_path);
            return 0;
        }
        if (*sinf) {
            const auto shift = cms::shift_from_json(load_json(shift_path));
            const auto phi = cms::potential_from_json(load_json(potential_path));
            const auto s = cms::s_infinity(shift, phi, tol);
            Json j;
            j["value"] = std::isfinite(s.value) ? Json(s.value) : Json("inf");
            j["edge"] = s.edge == cms::SInfinityResult::Edge::Zero
                            ? "0-edge"
                            : (s.edge == cms::SInfinityResult::Edge::One ? "1-edge" : "none");
            j["heuristic_oracle"] = s.heuristic_oracle;
            if (!s.note.empty()) j["note"] = s.note;
            emit(j, out_path);
            return 0;
        }
        if (*converge) {
            const auto shift = cms::shift_from_json(load_json(shift_path));
            const auto seq = cms::sequence_from_json(shift, load_json(sequence_path));
            cms::MetricConfig cfg;
            cfg.depth = depth;
            cfg.symbol_cap = symbols;
            try {
                const auto rep = cms::diagnose_convergence(shift, seq, cfg);
                emit(cms::convergence_report_to_json(rep), out_path);
            } catch (const cms::NotConverged& e) {
                Json j;
                j["error"] = "not-converged";
                j["detail"] = e.what();
                emit(j, out_path);
                return 2;
            }
            return 0;
        }
        if (*approximate) {
            const auto shift = cms::shift_from_json(load_json(shift_path));
            const Json jt = load_json(targets_path);
            std::vector<cms::Measure> targets;
            for (const auto& t : jt.at("targets"))
                targets.push_back(cms::measure_from_json(shift, t));
            const auto glued = cms::glue_periodic_approximation(shift, targets, n_param, seed);
            std::vector<cms::Rat> weights(targets.size(),
                                          cms::Rat(1, cms::BigInt(targets.size())));
            const auto average = cms::convex_combo(weights, targets);
            Json j;
            j["plan"] = cms::gluing_plan_to_json(glued.plan);
            j["measure"] = cms::measure_to_json(glued.measure);
            j["weakstar_distance_to_average"] =
                cms::weakstar_distance(shift, glued.measure, average).value;
            emit(j, out_path);
            return 0;
        }
        if (*dichotomy) {
            const auto shift = cms::shift_from_json(load_json(shift_path));
            cms::DichotomyParams params;
            params.num_targets = num_targets;
            params.tolerance = tau;
            params.depth = depth;
            params.seed = seed;
            try {
                const auto rep = cms::dichotomy_report(shift, params);
                emit(cms::dichotomy_report_to_json(rep), out_path);
                return 0;
            } catch (const cms::FPropertyUndecided& e) {
                Json j;
                j["error"] = "undecided";
                j["detail"] = e.what();
                emit(j, out_path);
                return 2;
            }
        }
        if (*dualvp) {
            const auto shift = cms::shift_from_json(load_json(shift_path));
            const auto phi = cms::potential_from_json(load_json(potential_path));
            const auto mu = cms::measure_from_json(shift, load_json(measure_path));
            cms::DualVpFamily family;
            family.depth = depth;
            family.symbol_cap = symbols;
            cms::DualVpParams params;
            params.seed = seed;
            const auto rep = cms::dual_vp_check(shift, phi, mu, family, params);
            emit(cms::duality_report_to_json(rep), out_path);
            return 0;
        }
        if (*demo) {
            if (demo_name == "escape-full-shift") return run_demo_escape_full_shift(out_csv);
        }
    } catch (const cms::ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
