#include <doctest.h>

#include "coarsehom/chains.hpp"
#include "coarsehom/errors.hpp"

using namespace coarsehom;

TEST_CASE("boundary uses head minus tail") {
  const Window w = build_window(SpaceSpec::lattice(1), 3);
  const VertexId a = *w.find({0}), b = *w.find({1});
  Chain1 flow{w.id(), 1, {}};
  flow.add(a, b, 2.0);
  CHECK(flow.at(a, b) == doctest::Approx(2.0));
  CHECK(flow.at(b, a) == doctest::Approx(-2.0));
  const BoundaryResult d = boundary(flow, w);
  CHECK(d.interior.at(b) == doctest::Approx(2.0));
  CHECK(d.interior.at(a) == doctest::Approx(-2.0));
  CHECK(d.total_mass() == doctest::Approx(0.0));
  CHECK(d.escaped_mass() == doctest::Approx(0.0));
}

TEST_CASE("mass leaving through a sink is kept apart") {
  const Window w = build_window(SpaceSpec::lattice(1), 2);
  const VertexId inner = *w.find({1}), sink = *w.find({2});
  Chain1 flow{w.id(), 1, {}};
  flow.add(inner, sink, 1.5);
  const BoundaryResult d = boundary(flow, w);
  CHECK(d.escaped_mass() == doctest::Approx(1.5));
  CHECK(d.interior.at(inner) == doctest::Approx(-1.5));
  CHECK(d.total_mass() == doctest::Approx(0.0));
}

TEST_CASE("chain validation") {
  const Window w = build_window(SpaceSpec::lattice(1), 3);
  Chain0 c{w.id(), {}};
  c.add(*w.find({3}), 1.0);  // a sink
  CHECK_THROWS_AS(validate(c, w), ConfigError);
  Chain0 other{"elsewhere", {}};
  CHECK_THROWS_AS(validate(other, w), ConfigError);

  Chain1 b{w.id(), 1, {}};
  b.add(*w.find({-2}), *w.find({0}), 1.0);
  CHECK_THROWS_AS(validate(b, w), ConfigError);
  b.span = 2;
  CHECK_NOTHROW(validate(b, w));
}

TEST_CASE("norms and sums") {
  const Window w = build_window(SpaceSpec::lattice(1), 5);
  Chain0 c{w.id(), {}};
  for (int x = -4; x <= 4; ++x) c.add(*w.find({x}), x % 2 == 0 ? 1.0 : -1.0);
  CHECK(uf_norm0(c, w, 1) == doctest::Approx(3.0));
  CHECK(window_sum(c, Region(w.interior_vertices())) == doctest::Approx(1.0));
  CHECK(c.scaled(-2.0).at(*w.find({0})) == doctest::Approx(-2.0));
  CHECK_FALSE(c.is_zero());
  CHECK(Chain0{w.id(), {}}.is_zero());

  Chain1 b{w.id(), 1, {}};
  const VertexId o = *w.find({0});
  b.add(*w.find({-1}), o, 1.0);
  b.add(o, *w.find({1}), -2.0);
  CHECK(throughput(b) == doctest::Approx(3.0));
}
