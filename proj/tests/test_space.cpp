#include <doctest.h>

#include "coarsehom/errors.hpp"
#include "coarsehom/space.hpp"

using namespace coarsehom;

namespace {

std::size_t count_interior(const Window& w) { return w.interior_vertices().size(); }

}  // namespace

TEST_CASE("lattice windows: interior ball of radius R - 1, sinks at distance R") {
  for (int radius : {1, 3, 6}) {
    const Window w1 = build_window(SpaceSpec::lattice(1), radius);
    CHECK(count_interior(w1) == std::size_t(2 * radius - 1));
    CHECK(w1.sink_vertices().size() == 2);

    const Window w2 = build_window(SpaceSpec::lattice(2), radius);
    CHECK(count_interior(w2) == std::size_t(2 * radius * radius - 2 * radius + 1));
    CHECK(w2.sink_vertices().size() == std::size_t(4 * radius));
    CHECK(w2.max_degree() == 4);
  }
}

TEST_CASE("tree windows count vertices by depth") {
  for (int depth : {2, 3, 5}) {
    const Window w = build_window(SpaceSpec::tree(3), depth);
    CHECK(count_interior(w) == std::size_t(3 * (1 << (depth - 1)) - 2));
    CHECK(w.sink_vertices().size() == std::size_t(3 * (1 << (depth - 1))));
    CHECK(w.max_degree() == 3);
  }
}

TEST_CASE("window lookup and distances") {
  const Window w = build_window(SpaceSpec::lattice(2), 4);
  const auto origin = w.find({0, 0});
  REQUIRE(origin);
  CHECK(*origin == w.basepoint());
  const auto corner = w.find({2, -1});
  REQUIRE(corner);
  CHECK(w.distance(*origin, *corner) == 3);
  CHECK(label_depth(SpaceSpec::lattice(2), {2, -1}) == 3);
  CHECK_FALSE(w.find({9, 9}));
  CHECK_THROWS_AS(w.check_vertex(static_cast<VertexId>(w.size())), ConfigError);
  CHECK(w.within(*origin, 1).size() == 5);
}

TEST_CASE("symmetric collar of a lattice interval") {
  const Window w = build_window(SpaceSpec::lattice(1), 10);
  const VertexId o = w.basepoint();
  const Region r = ball(w, o, 3);
  CHECK(r.size() == 7);
  // Two points just inside and two just outside.
  CHECK(r_boundary(w, r, 1).size() == 4);
  CHECK(r_boundary(w, r, 2).size() == 8);
  CHECK(complement(w, r).size() == w.size() - 7);
}

TEST_CASE("reach pairs") {
  const Window w = build_window(SpaceSpec::lattice(1), 3);  // 7 vertices on a path
  CHECK(reach_pairs(w, 1).size() == 6);
  CHECK(reach_pairs(w, 2).size() == 11);
  CHECK(reach_degree(w, 2) == 4);
}

TEST_CASE("custom graphs validate their edges") {
  CustomFamily g;
  g.vertices = {0, 1, 2};
  g.edges = {{0, 1}, {1, 2}};
  g.sinks = {2};
  const SpaceSpec spec = SpaceSpec::custom(g);
  const Window w = build_window(spec, 0);
  CHECK(w.size() == 3);
  CHECK(w.sink_vertices().size() == 1);

  g.edges.push_back({0, 7});
  CHECK_THROWS_AS(SpaceSpec::custom(g).validate(), ConfigError);
  CHECK_THROWS_AS(SpaceSpec::lattice(0).validate(), ConfigError);
  CHECK_THROWS_AS(SpaceSpec::tree(1).validate(), ConfigError);
}

TEST_CASE("window size limit") {
  WindowOptions small;
  small.max_vertices = 100;
  CHECK_THROWS_AS(build_window(SpaceSpec::lattice(2), 50, small), ConfigError);
}

TEST_CASE("product spaces") {
  const SpaceSpec p = SpaceSpec::product(SpaceSpec::lattice(1), SpaceSpec::lattice(1));
  CHECK(p.describe() == "product(lattice(1),lattice(1))");
  const Window w = build_window(p, 2);
  // Product of two paths with the L1 word metric: same ball as lattice(2).
  CHECK(count_interior(w) == count_interior(build_window(SpaceSpec::lattice(2), 2)));
}
