#include <doctest.h>

#include "coarsehom/maxflow.hpp"

using namespace coarsehom;

TEST_CASE("textbook network") {
  // s=0, t=5; value 23.
  FlowNetwork net(6);
  net.add_arc(0, 1, 16);
  net.add_arc(0, 2, 13);
  net.add_arc(2, 1, 4);
  net.add_arc(1, 3, 12);
  net.add_arc(3, 2, 9);
  net.add_arc(2, 4, 14);
  net.add_arc(4, 3, 7);
  net.add_arc(3, 5, 20);
  net.add_arc(4, 5, 4);
  CHECK(net.max_flow(0, 5) == doctest::Approx(23.0));
  const auto side = net.source_side(0);
  CHECK(side[0]);
  CHECK_FALSE(side[5]);
}

TEST_CASE("undirected pairs carry flow both ways") {
  FlowNetwork net(3);
  const int e = net.add_arc(1, 0, 2.5, 2.5);
  net.add_arc(0, 2, 10);
  CHECK(net.max_flow(1, 2) == doctest::Approx(2.5));
  CHECK(net.flow(e) == doctest::Approx(2.5));

  FlowNetwork back(3);
  const int f = back.add_arc(0, 1, 2.5, 2.5);
  back.add_arc(0, 2, 10);
  CHECK(back.max_flow(1, 2) == doctest::Approx(2.5));
  CHECK(back.flow(f) == doctest::Approx(-2.5));
}

TEST_CASE("minimal source side stops at saturated arcs") {
  FlowNetwork net(4);
  net.add_arc(0, 1, 1);
  net.add_arc(1, 2, 5);
  net.add_arc(2, 3, 1);
  CHECK(net.max_flow(0, 3) == doctest::Approx(1.0));
  const auto side = net.source_side(0);
  CHECK(side[0]);
  CHECK_FALSE(side[1]);
}
