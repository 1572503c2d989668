// Acceptance suite: end-to-end checks of the library against analytically
// forced or oracle-derived values, one pass/fail line per criterion.

#include "cms/approx.hpp"
#include "cms/io.hpp"
#include "cms/metrics.hpp"
#include "cms/thermo.hpp"

#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

using namespace cms;

namespace {

struct Harness {
    int failures = 0;
    int index = 0;

    void run(const std::string& name, const std::function<void()>& body) {
        ++index;
        try {
            body();
            std::printf("[PASS] criterion %d: %s\n", index, name.c_str());
        } catch (const std::exception& e) {
            ++failures;
            std::printf("[FAIL] criterion %d: %s\n       %s\n", index, name.c_str(), e.what());
        }
    }
};

void require(bool cond, const std::string& what) {
    if (!cond) throw std::runtime_error(what);
}

const double kLogGolden = std::log((1.0 + std::sqrt(5.0)) / 2.0);

ShiftPresentation golden_matrix() {
    return ShiftPresentation::finite_matrix({1, 2}, {{1, 1}, {1, 2}, {2, 1}});
}

ShiftPresentation golden_loops() {
    return ShiftPresentation::loop_system(
        {{1, LoopCount::of(1)}, {2, LoopCount::of(1)}}, LoopTail{});
}

ShiftPresentation unit_loops() {
    LoopTail tail;
    tail.kind = LoopTail::Kind::Constant;
    tail.constant = LoopCount::of(1);
    return ShiftPresentation::loop_system({}, tail);
}

ShiftPresentation hub_system() {
    return ShiftPresentation::loop_system(
        {{1, LoopCount::of(1)}, {2, LoopCount::inf()}}, LoopTail{});
}

}  // namespace

int main() {
    Harness h;
    const auto full = ShiftPresentation::full_shift();

    h.run("golden-mean entropy by generating function (1e-9), truncation (1e-6), "
          "partition sums at n=30 (1e-3)",
          [&] {
              const auto shift = golden_loops();
              const auto gf =
                  pressure(shift, Potential::zero(), PressureMethod::LoopGeneratingFunction);
              require(std::fabs(gf.value - kLogGolden) < 1e-9,
                      "generating-function root off: " + double_to_string(gf.value));
              const auto tr = pressure(shift, Potential::zero(), PressureMethod::Truncation);
              require(std::fabs(tr.value - kLogGolden) < 1e-6,
                      "truncation value off: " + double_to_string(tr.value));
              const auto ps = pressure_partition_sum(shift, Potential::zero(), 0, 30);
              require(std::fabs(ps.value - kLogGolden) < 1e-3,
                      "partition-sum estimate off: " + double_to_string(ps.value));
              require(ps.certified_lower <= kLogGolden + 1e-12,
                      "partition quotients must stay one-sided lower bounds");
          });

    h.run("full-shift escape: mass[1] = 1/2 exactly, finite-additivity flag fires, "
          "distance to the orbit (1,inf) non-increasing and < 1e-2 at n=256, depth 6",
          [&] {
              std::vector<Measure> seq;
              std::vector<std::uint64_t> ns{4, 8, 16, 32, 64, 128, 256};
              for (auto n : ns) seq.push_back(Measure::periodic(full, {1, n}));
              for (auto& mu : seq)
                  require(mu.mass({1}).rational() == Rat(1, 2), "mass[1] must be exactly 1/2");
              const auto rep = diagnose_convergence(full, seq);
              require(rep.classification == LimitClass::OutsideConvexHull,
                      "finitely-additive classification must fire, got " +
                          limit_class_to_string(rep.classification));
              const auto target = Measure::periodic(full, {1, kInf});
              MetricConfig cfg;  // depth 6
              double prev = 1e300, last = 0;
              for (auto& mu : seq) {
                  last = weakstar_distance(full, mu, target, cfg).value;
                  require(last <= prev + 1e-15, "distance must be non-increasing");
                  prev = last;
              }
              require(last < 1e-2, "final distance " + double_to_string(last) + " >= 1e-2");
          });

    h.run("total escape on the unit bouquet: depth-1 masses <= 2/n exactly and the "
          "limit is the point mass at infinity with lambda = 0 (1e-6)",
          [&] {
              const auto shift = unit_loops();
              const std::vector<std::uint64_t> ns{8, 16, 32, 64};
              const auto seq = zero_measure_sequence(shift, ns);
              require(!seq.refused, "sequence must not be refused");
              for (std::size_t i = 0; i < seq.measures.size(); ++i) {
                  // every charged depth-1 cylinder, plus a window of others
                  std::vector<Symbol> to_check = shift.first_symbols(16);
                  to_check.insert(to_check.end(), seq.cycles[i].begin(), seq.cycles[i].end());
                  for (Symbol a : to_check) {
                      require(seq.measures[i].mass({a}).rational() <= Rat(2, BigInt(ns[i])),
                              "depth-1 mass exceeds 2/n");
                  }
              }
              const auto rep = diagnose_convergence(shift, seq.measures);
              require(rep.classification == LimitClass::TotalEscape,
                      "classification must be total escape, got " +
                          limit_class_to_string(rep.classification));
              require(std::fabs(rep.lambda) <= 1e-6,
                      "lambda = " + double_to_string(rep.lambda) + " not within 1e-6 of 0");
          });

    h.run("dichotomy: finiteness branch rejects every sandwich on the unit bouquet; "
          "failure branch approximates 5/5 targets within 0.05 at depth 5 (seed 7)",
          [&] {
              const auto holds = dichotomy_report(unit_loops());
              require(holds.f_property == Tri::Holds, "unit bouquet must satisfy finiteness");
              require(holds.sandwiches_all_rejected && holds.sandwiches_checked > 0,
                      "every finite-inf-finite sandwich must be rejected");
              DichotomyParams params;  // defaults: 5 targets, 0.05, depth 5, seed 7
              const auto fails = dichotomy_report(full, params);
              require(fails.f_property == Tri::Fails, "the full shift must fail finiteness");
              require(fails.targets.size() == 5, "five targets expected");
              require(fails.all_targets_within_tolerance,
                      "max distance " + double_to_string(fails.max_distance) + " >= 0.05");
          });

    h.run("Rome equivalences: hub system has Rome ({0}, 2) and base mass >= 1/2 on "
          "periodic fixtures; full shift and the walk graph have none and escape",
          [&] {
              const auto hub = hub_system();
              const auto rome = find_finite_rome(hub);
              require(rome.found, "hub system must have a finite uniform Rome");
              require(rome.pair.rome == std::vector<Symbol>{0} && rome.pair.bound == 2,
                      "expected Rome ({0}, 2)");
              // periodic fixtures on the hub: every orbit returns through the base
              std::vector<BarWord> fixtures{{0}, {0, 1}, {0, 0, 1}, {0, 1, 0, 2}};
              bool boundary_hit = false;
              for (const auto& cyc : fixtures) {
                  const auto mu = Measure::periodic(hub, cyc);
                  const Rat m = mu.mass({0}).rational();
                  require(m >= Rat(1, 2), "base-cylinder mass below 1/2");
                  boundary_hit = boundary_hit || m == Rat(1, 2);
              }
              require(boundary_hit,
                      "pure 2-loop orbits sit exactly on the 1/2 boundary (flagged)");
              const auto walk = ShiftPresentation::rule_graph(BuiltinRule::Loops2PlusRandomWalk);
              require(!find_finite_rome(full).found, "the full shift must have no finite Rome");
              require(!find_finite_rome(walk).found, "the walk graph must have no finite Rome");
              require(!zero_measure_sequence(full, {4, 8}).refused,
                      "escape must succeed on the full shift");
              require(!zero_measure_sequence(walk, {4, 8}).refused,
                      "escape must succeed on the walk graph");
              require(zero_measure_sequence(hub, {4, 8}).refused,
                      "escape must be refused on the hub system");
          });

    h.run("gluing: distance to the Parry/fixed-point average non-increasing over "
          "n in {64,...,512} (seed 7) with final < 0.05; self-gluing is exact",
          [&] {
              const auto shift = golden_matrix();
              const auto parry = equilibrium_finite(shift, Potential::zero()).measure;
              const std::vector<Measure> targets{parry, Measure::periodic(shift, {1})};
              const auto average = convex_combo({Rat(1, 2), Rat(1, 2)}, targets);
              MetricConfig cfg;  // depth 6
              double prev = 1e300, last = 0;
              for (std::size_t n : {64, 128, 256, 512}) {
                  const auto glued = glue_periodic_approximation(shift, targets, n, 7);
                  last = weakstar_distance(shift, glued.measure, average, cfg).value;
                  require(last <= prev + 1e-15, "gluing distance must be non-increasing");
                  prev = last;
              }
              require(last < 0.05, "final gluing distance " + double_to_string(last));
              const auto self_target = Measure::periodic(shift, {1, 2});
              const auto self = glue_periodic_approximation(shift, {self_target}, 64, 7);
              require(weakstar_distance(shift, self.measure, self_target, cfg).value == 0.0,
                      "self-gluing distance must be exactly 0");
          });

    h.run("dual variational principle: one-sided inequality up to 1e-10 on every "
          "evaluation; Parry gap < 1e-3; fixed-point gap < 5e-2 with depth-2 family",
          [&] {
              const auto shift = golden_matrix();
              const auto zero = Potential::zero();
              const auto parry = equilibrium_finite(shift, zero).measure;
              const auto rep1 = dual_vp_check(shift, zero, parry);
              require(rep1.min_margin >= -1e-10, "one-sided inequality violated (Parry)");
              require(rep1.gap < 1e-3,
                      "Parry gap " + double_to_string(rep1.gap) + " >= 1e-3");
              const auto fixed = Measure::periodic(shift, {1});
              const auto rep2 = dual_vp_check(shift, zero, fixed);
              require(rep2.min_margin >= -1e-10, "one-sided inequality violated (fixed point)");
              require(rep2.gap >= -1e-10, "gap must stay above -1e-10");
              require(rep2.gap < 5e-2,
                      "fixed-point gap " + double_to_string(rep2.gap) + " >= 5e-2");
          });

    h.run("log-mass potential: P(psi) = 0 exactly on the dyadic product measure, "
          "integral = -2 log 2 (1e-12); s_inf of -2 log n is 0.5 (1e-3)",
          [&] {
              const auto dyadic = Measure::bernoulli_geometric({}, Rat(1), Rat(1, 2), 1);
              const auto psi = construct_psi(dyadic, Rat(1, 2), Rat(1, 2));
              require(psi.pressure_value == 0.0, "P(psi) must be exactly 0");
              require(psi.one_plus_null_sum.rational() == 1,
                      "the pressure sum must be exactly 1");
              require(std::fabs(psi.integral + 2.0 * std::log(2.0)) < 1e-12,
                      "integral must be -2 log 2 within 1e-12");
              const auto s = s_infinity(full, Potential::depth1({}, PotentialTail::log(-2.0)),
                                        1e-3);
              require(std::fabs(s.value - 0.5) <= 1e-3,
                      "s_inf = " + double_to_string(s.value) + " not 0.5 within 1e-3");
          });

    h.run("invariance and metric identities: exact shift invariance at depth <= 5; "
          "d_rho <= d and the clopen radius bound on 1000 pairs; entropy affinity 1e-12",
          [&] {
              // shift invariance over one-symbol extensions, exact rationals
              const auto dyadic = Measure::bernoulli_geometric({}, Rat(1), Rat(1, 2), 1);
              const std::vector<Measure> fixtures{
                  Measure::periodic(full, {1}), Measure::periodic(full, {1, 2}),
                  Measure::periodic(full, {2, 3, 5}),
                  Measure::bernoulli_finite({{1, Rat(1, 3)}, {2, Rat(2, 3)}}),
                  convex_combo({Rat(1, 4), Rat(1, 2)},
                               {Measure::periodic(full, {1}), Measure::periodic(full, {1, 2})})};
              Rng rng(101);
              for (const auto& mu : fixtures) {
                  for (int trial = 0; trial < 25; ++trial) {
                      BarWord cyl(1 + rng.next_below(5));
                      for (auto& s : cyl) s = 1 + rng.next_below(5);
                      Scalar sum{Rat(0)};
                      for (Symbol a = 1; a <= 8; ++a) {
                          BarWord ext{a};
                          ext.insert(ext.end(), cyl.begin(), cyl.end());
                          sum += mu.mass(ext);
                      }
                      require(sum.rational() == mu.mass(cyl).rational(),
                              "invariance identity failed on " + word_to_string(cyl));
                  }
              }
              // the product measure telescopes against its geometric tail
              {
                  const BarWord cyl{3, 1};
                  Scalar partial{Rat(0)};
                  for (Symbol a = 1; a <= 24; ++a) {
                      BarWord ext{a};
                      ext.insert(ext.end(), cyl.begin(), cyl.end());
                      partial += dyadic.mass(ext);
                  }
                  const Rat rest = geometric_sum(Rat(1, 2), 25) * dyadic.mass(cyl).rational();
                  require(partial.rational() + rest == dyadic.mass(cyl).rational(),
                          "product-measure invariance identity failed");
              }
              // metric inequalities on random word pairs
              Rng mr(202);
              for (int trial = 0; trial < 1000; ++trial) {
                  const std::size_t len = 1 + mr.next_below(9);
                  Word x(len), y(len);
                  for (std::size_t i = 0; i < len; ++i) {
                      x[i] = 1 + mr.next_below(24);
                      y[i] = 1 + mr.next_below(24);
                  }
                  const auto rho = metric_d_rho(x, y);
                  require(to_double(rho.partial) <= metric_d(x, y) + 1e-15,
                          "d_rho must not exceed d");
              }
              Rng cr(303);
              for (int trial = 0; trial < 1000; ++trial) {
                  const Symbol a = 1 + cr.next_below(10);
                  const std::size_t len = 1 + cr.next_below(7);
                  Word x(len), y(len);
                  x[0] = a;
                  do { y[0] = 1 + cr.next_below(12); } while (y[0] == a);
                  for (std::size_t i = 1; i < len; ++i) {
                      x[i] = 1 + cr.next_below(12);
                      y[i] = 1 + cr.next_below(12);
                  }
                  const auto rho = metric_d_rho(x, y);
                  require(rho.partial >= clopen_ball_radius(a) - rho.tail_bound,
                          "clopen radius bound failed");
              }
              // entropy affinity on random exact combinations
              const auto gm = golden_matrix();
              const auto parry = equilibrium_finite(gm, Potential::zero()).measure;
              const auto orbit = Measure::periodic(gm, {1, 2});
              Rng er(404);
              for (int trial = 0; trial < 25; ++trial) {
                  const Rat w(1 + er.next_below(99), 100);
                  const auto mix = convex_combo({w, 1 - w}, {parry, orbit});
                  const double expect = to_double(w) * parry.entropy().value() +
                                        to_double(1 - w) * orbit.entropy().value();
                  require(std::fabs(mix.entropy().value() - expect) < 1e-12,
                          "entropy affinity failed");
              }
          });

    if (h.failures == 0) std::printf("all %d criteria passed\n", h.index);
    else std::printf("%d of %d criteria failed\n", h.failures, h.index);
    return h.failures == 0 ? 0 : 1;
}
