#include <doctest.h>

#include <cmath>

#include "coarsehom/amenability.hpp"
#include "coarsehom/errors.hpp"

using namespace coarsehom;

TEST_CASE("tree ball profile matches the level counts") {
  ProfileOptions o;
  o.radii = {1, 2, 3, 6, 10};
  const IsoperimetricProfile p = isoperimetric_profile(SpaceSpec::tree(3), 1, RegionFamily::Balls, o);
  REQUIRE(p.samples.size() == 5);
  for (std::size_t i = 0; i < o.radii.size(); ++i) {
    const int d = o.radii[i];
    // Ball of radius d: 3 * 2^d - 2 vertices. Collar: the 3 * 2^(d-1)
    // leaves and the 3 * 2^d vertices one level down.
    const double vol = 3.0 * std::pow(2.0, d) - 2.0;
    const double collar = 4.5 * std::pow(2.0, d);
    const ProfileSample& s = p.samples[i];
    REQUIRE(s.ok());
    CHECK(s.vol_region == doctest::Approx(vol));
    CHECK(s.vol_collar == doctest::Approx(collar));
    CHECK(s.ratio == doctest::Approx(collar / vol));
  }
}

TEST_CASE("lattice balls and boxes") {
  ProfileOptions o;
  o.radii = {5, 20};
  const auto balls = isoperimetric_profile(SpaceSpec::lattice(2), 1, RegionFamily::Balls, o);
  for (std::size_t i = 0; i < o.radii.size(); ++i) {
    const double r = o.radii[i];
    CHECK(balls.samples[i].vol_region == doctest::Approx(2 * r * r + 2 * r + 1));
    CHECK(balls.samples[i].vol_collar == doctest::Approx(8 * r + 4));
  }
  const auto boxes = isoperimetric_profile(SpaceSpec::lattice(2), 1, RegionFamily::Boxes, o);
  for (std::size_t i = 0; i < o.radii.size(); ++i) {
    const double side = 2 * o.radii[i] + 1;
    CHECK(boxes.samples[i].vol_region == doctest::Approx(side * side));
    CHECK(boxes.samples[i].vol_collar == doctest::Approx(8 * side - 4));
  }
  CHECK_THROWS_AS(isoperimetric_profile(SpaceSpec::tree(3), 1, RegionFamily::Boxes, o), ConfigError);
}

TEST_CASE("custom regions by label") {
  ProfileOptions o;
  o.regions = {{{0}, {1}, {2}}};
  const auto p = isoperimetric_profile(SpaceSpec::lattice(1), 1, RegionFamily::Custom, o);
  REQUIRE(p.samples.size() == 1);
  CHECK(p.samples[0].vol_region == doctest::Approx(3));
  CHECK(p.samples[0].vol_collar == doctest::Approx(4));
}

TEST_CASE("Foelner search on lattices finds balls below epsilon") {
  const FoelnerReport one = foelner_search(SpaceSpec::lattice(1), 1, 0.1, 10000);
  CHECK(one.kind == FoelnerKind::RegularSequenceFound);
  CHECK(one.floor == doctest::Approx(4.0 / 41.0));  // ball(20): 4 collar points, 41 vertices

  const FoelnerReport two = foelner_search(SpaceSpec::lattice(2), 1, 0.05, 10000);
  CHECK(two.kind == FoelnerKind::RegularSequenceFound);
  CHECK(two.floor == doctest::Approx(644.0 / 12961.0));  // ball(80)
  CHECK(two.floor < 0.05);
  for (std::size_t i = 1; i < two.regions.size(); ++i) {
    CHECK(two.regions[i].ratio < two.regions[i - 1].ratio);
  }
}

TEST_CASE("Foelner search on the tree stays above the floor") {
  const FoelnerReport f = foelner_search(SpaceSpec::tree(3), 1, 0.2, 10000);
  CHECK(f.kind == FoelnerKind::NoSequenceBelow);
  CHECK(f.floor > 0.2);
  CHECK(f.floor >= 1.5);  // every finite subtree has collar at least 1.5 times its volume
  CHECK(f.regions_tested <= 10000);
}

TEST_CASE("budget and epsilon checks") {
  CHECK_THROWS_AS(foelner_search(SpaceSpec::lattice(1), 1, 0.0, 100), ConfigError);
  CHECK_THROWS_AS(foelner_search(SpaceSpec::lattice(1), 1, 1.5, 100), ConfigError);
  CHECK_THROWS_AS(foelner_search(SpaceSpec::lattice(1), 1, 0.1, 0), ConfigError);
  const FoelnerReport small = foelner_search(SpaceSpec::lattice(2), 1, 0.05, 5);
  CHECK(small.kind == FoelnerKind::NoSequenceBelow);
  CHECK(small.regions_tested <= 5);
}

TEST_CASE("amenability and vanishing agree") {
  const std::vector<int> sizes = {4, 8, 16, 32};
  CHECK(cross_check_equivalence(SpaceSpec::lattice(1), 1, sizes, 0.1, 10000).agreement);
  CHECK(cross_check_equivalence(SpaceSpec::lattice(2), 1, sizes, 0.05, 10000).agreement);
  const auto tree = cross_check_equivalence(SpaceSpec::tree(3), 1, {3, 4, 5, 6, 7, 8}, 0.2, 10000);
  CHECK(tree.agreement);
  CHECK(tree.decision.kind == VerdictKind::Vanishes);
}
