#include <doctest.h>

#include <cmath>

#include "coarsehom/acceptance.hpp"
#include "coarsehom/decider.hpp"
#include "coarsehom/errors.hpp"
#include "coarsehom/oracle.hpp"

using namespace coarsehom;

namespace {

FlowProblem problem(const SpaceSpec& spec, int radius, const std::string& demand, int reach) {
  auto w = std::make_shared<const Window>(build_window(spec, radius));
  return FlowProblem{w, make_demand(DemandFamily::parse(demand), *w, spec.is_lattice()), reach,
                     std::nullopt};
}

double oracle(const FlowProblem& p) {
  return brute_force_capacity(*p.window, p.demand, p.reach).c_star;
}

}  // namespace

TEST_CASE("capacity agrees with the exhaustive oracle on lattice windows") {
  for (int reach : {1, 2}) {
    for (int radius : {1, 2}) {
      const FlowProblem p = problem(SpaceSpec::lattice(2), radius, "all-ones", reach);
      CHECK(min_capacity(p).c_star == doctest::Approx(oracle(p)).epsilon(1e-9));
    }
  }
  const FlowProblem alt = problem(SpaceSpec::lattice(1), 8, "alternating", 1);
  CHECK(min_capacity(alt).c_star == doctest::Approx(oracle(alt)).epsilon(1e-9));
}

TEST_CASE("capacity agrees with the oracle on random instances") {
  for (std::uint64_t seed : duality_seeds()) {
    const RandomInstance inst = random_flow_instance(seed);
    const CapacityResult opt = min_capacity(inst.problem);
    const OracleResult ref = brute_force_capacity(*inst.problem.window, inst.problem.demand,
                                                  inst.problem.reach);
    CHECK(std::abs(opt.c_star - ref.c_star) <= 1e-6);
  }
}

TEST_CASE("closed-form capacities") {
  // All-ones on a path of 2R-1 interior vertices: half the mass leaves each end.
  for (int radius : {4, 8, 16}) {
    const FlowProblem p = problem(SpaceSpec::lattice(1), radius, "all-ones", 1);
    CHECK(min_capacity(p).c_star == doctest::Approx(radius - 0.5));
  }
  // Tree(3), window depth d: the whole interior (depth < d) against the
  // 3 * 2^(d-1) edges to the sinks, 1 - 1 / (3 * 2^(d-2)).
  for (int depth : {3, 5, 8}) {
    const FlowProblem p = problem(SpaceSpec::tree(3), depth, "all-ones", 1);
    const double expected = 1.0 - 1.0 / (3.0 * std::pow(2.0, depth - 2));
    CHECK(min_capacity(p).c_star == doctest::Approx(expected).epsilon(1e-9));
  }
  // Unit point mass in the middle of a path splits both ways.
  const FlowProblem point = problem(SpaceSpec::lattice(1), 3, "origin", 1);
  CHECK(min_capacity(point).c_star == doctest::Approx(0.5));
}

TEST_CASE("scaling covariance and reach monotonicity") {
  FlowProblem p = problem(SpaceSpec::lattice(2), 4, "all-ones", 1);
  const double base = min_capacity(p).c_star;
  p.demand = p.demand.scaled(3.0);
  CHECK(min_capacity(p).c_star == doctest::Approx(3.0 * base));
  p.demand = p.demand.scaled(-1.0);
  CHECK(min_capacity(p).c_star == doctest::Approx(3.0 * base));

  for (int radius : {4, 8}) {
    const double r1 = min_capacity(problem(SpaceSpec::lattice(2), radius, "all-ones", 1)).c_star;
    const double r2 = min_capacity(problem(SpaceSpec::lattice(2), radius, "all-ones", 2)).c_star;
    CHECK(r2 <= r1 + 1e-12);
  }
}

TEST_CASE("certificates are exclusive and verifiable") {
  const FlowProblem p = problem(SpaceSpec::lattice(2), 6, "all-ones", 1);
  const double c = min_capacity(p).c_star;

  const FeasibilityResult below = solve_feasibility(p, 0.9 * c);
  REQUIRE_FALSE(below.feasible());
  const auto& ob = std::get<Obstruction>(below.certificate);
  CHECK(verify_obstruction(ob, p).ok);
  CHECK(ob.violation > 0.0);
  CHECK(std::abs(ob.region_sum) > 0.9 * c * ob.cut);

  const FeasibilityResult above = solve_feasibility(p, 1.1 * c);
  REQUIRE(above.feasible());
  const auto& tails = std::get<TailSet>(above.certificate);
  CHECK(verify_tails(tails, p, 1.1 * c).ok);
  CHECK_FALSE(verify_tails(tails, p, 0.5 * c).ok);

  // A tampered obstruction is caught.
  Obstruction bad = ob;
  bad.region_sum += 1.0;
  CHECK_FALSE(verify_obstruction(bad, p).ok);
}

TEST_CASE("tails carry the whole demand to the sinks") {
  const FlowProblem p = problem(SpaceSpec::tree(3), 3, "all-ones", 1);
  const FeasibilityResult r = solve_feasibility(p, 1.0);
  REQUIRE(r.feasible());
  const auto& ts = std::get<TailSet>(r.certificate);
  double total = 0.0;
  for (const Tail& t : ts.tails) {
    REQUIRE(t.path.size() >= 2);
    CHECK(p.window->is_sink(t.path.back()));
    CHECK(p.window->is_interior(t.path.front()));
    total += t.weight;
  }
  CHECK(total == doctest::Approx(double(p.window->interior_vertices().size())));
}

TEST_CASE("demand families") {
  const Window w = build_window(SpaceSpec::lattice(2), 3);
  const Chain0 alt = make_demand(DemandFamily::parse("alternating"), w, true);
  CHECK(alt.at(*w.find({0, 0})) == doctest::Approx(1.0));
  CHECK(alt.at(*w.find({1, 0})) == doctest::Approx(-1.0));
  const Chain0 sub = make_demand(DemandFamily::parse("sublattice:2"), w, true);
  CHECK(sub.at(*w.find({2, 0})) == doctest::Approx(1.0));
  CHECK(sub.at(*w.find({1, 1})) == doctest::Approx(0.0));
  const Chain0 origin = make_demand(DemandFamily::parse("origin"), w, true);
  CHECK(origin.coeffs.size() == 1);
  CHECK(DemandFamily::parse("sublattice:3").name() == "sublattice:3");
  CHECK_THROWS_AS(DemandFamily::parse("sublattice:0"), ConfigError);
  CHECK_THROWS_AS(DemandFamily::parse("stripes"), ConfigError);
}

TEST_CASE("decide separates lattice growth from bounded tree capacity") {
  const Verdict lat = decide(SpaceSpec::lattice(2), DemandFamily{}, 1, {4, 8, 16, 32});
  CHECK(lat.kind == VerdictKind::Obstructed);
  REQUIRE(lat.growth_fit);
  CHECK(lat.growth_fit->slope >= 0.7);
  CHECK(lat.growth_fit->r_squared >= 0.9);
  REQUIRE(lat.witness);
  CHECK(lat.witness_size == 32);
  CHECK(lat.per_size[0].c_star == doctest::Approx(1.05));

  const Verdict tree = decide(SpaceSpec::tree(3), DemandFamily{}, 1, {3, 4, 5, 6, 7, 8});
  CHECK(tree.kind == VerdictKind::Vanishes);
  CHECK_FALSE(tree.low_confidence);
  CHECK(tree.c_sup <= 3.0 + 1e-6);
  CHECK(tree.monotone);
}

TEST_CASE("strict thresholds lower confidence instead of flipping silently") {
  DecideOptions o;
  o.thresholds.min_slope = 5.0;
  const Verdict v = decide(SpaceSpec::lattice(2), DemandFamily{}, 1, {4, 8, 16, 32}, o);
  CHECK(v.kind == VerdictKind::Vanishes);
  CHECK(v.low_confidence);
  CHECK(psc_verdict(v, 1) == PscVerdict::Undetermined);
}

TEST_CASE("scalar curvature trichotomy") {
  const Verdict lat = decide(SpaceSpec::lattice(2), DemandFamily{}, 1, {4, 8, 16, 32});
  const Verdict tree = decide(SpaceSpec::tree(3), DemandFamily{}, 1, {3, 4, 5, 6, 7, 8});
  CHECK(psc_verdict(lat, 1) == PscVerdict::NoNonnegativeScalarCurvature);
  CHECK(psc_verdict(tree, 1) == PscVerdict::AdmitsUPSC);
  CHECK(psc_verdict(lat, 0) == PscVerdict::AdmitsUPSC_by_surgery);
  CHECK(psc_verdict(tree, 0) == PscVerdict::AdmitsUPSC_by_surgery);

  const Verdict alt = decide(SpaceSpec::lattice(1), DemandFamily::parse("alternating"), 1,
                             {4, 8, 16, 32});
  CHECK_THROWS_AS(psc_verdict(alt, 1), ConfigError);
}

TEST_CASE("decide input checks") {
  CHECK_THROWS_AS(decide(SpaceSpec::lattice(2), DemandFamily{}, 1, {4}), ConfigError);
  CHECK_THROWS_AS(decide(SpaceSpec::lattice(2), DemandFamily{}, 0, {4, 8}), ConfigError);
}
