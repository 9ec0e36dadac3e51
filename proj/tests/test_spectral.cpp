#include <doctest.h>

#include <cmath>
#include <numbers>

#include "coarsehom/errors.hpp"
#include "coarsehom/spectral.hpp"

using namespace coarsehom;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST_CASE("dense spectra match the closed forms") {
  for (int n : {16, 64, 128}) {
    const MeshSpec m = MeshSpec::circle(2 * kPi, n);
    const SpectrumReport s = laplacian_spectrum(m);
    CHECK(s.method == "dense");
    CHECK(s.complete());
    CHECK(max_relative_error(s.eigenvalues, closed_form_spectrum(m)) <= 1e-9);
  }
  const MeshSpec t = MeshSpec::torus({2 * kPi, 2 * kPi}, {16, 16});
  CHECK(max_relative_error(laplacian_spectrum(t).eigenvalues, closed_form_spectrum(t)) <= 1e-9);
  const MeshSpec i = MeshSpec::interval(1.0, 20);
  CHECK(max_relative_error(laplacian_spectrum(i).eigenvalues, closed_form_spectrum(i)) <= 1e-9);
}

TEST_CASE("circle eigenvalues approach k^2") {
  const SpectrumReport s = laplacian_spectrum(MeshSpec::circle(2 * kPi, 64));
  CHECK(s.eigenvalues[0] == doctest::Approx(0.0));
  // 4 sin^2(pi/64) / h^2 with h = 2 pi / 64.
  const double h = 2 * kPi / 64;
  CHECK(s.eigenvalues[1] == doctest::Approx(4 * std::pow(std::sin(kPi / 64), 2) / (h * h)));
  CHECK(counting_function(s, 0.0) == 1);
  CHECK(counting_function(s, 4.5) == 5);  // 0, 1, 1, 4, 4
}

TEST_CASE("separable path agrees with dense and honours the cutoff") {
  const MeshSpec t = MeshSpec::torus({2 * kPi, 2 * kPi}, {32, 32});
  SpectralOptions force;
  force.dense_limit = 64;  // whole mesh too big, single axis fine
  const SpectrumReport sep = laplacian_spectrum(t, std::nullopt, force);
  CHECK(sep.method == "separable");
  CHECK(max_relative_error(sep.eigenvalues, laplacian_spectrum(t).eigenvalues) <= 1e-9);

  const SpectrumReport cut = laplacian_spectrum(MeshSpec::torus({8 * kPi, 8 * kPi}, {128, 128}), 10.0);
  CHECK_FALSE(cut.complete());
  CHECK(cut.eigenvalues.back() <= 10.0);
  CHECK_THROWS_AS(counting_function(cut, 11.0), ConfigError);
}

TEST_CASE("mesh validation") {
  CHECK_THROWS_AS(MeshSpec::circle(1.0, 3).validate(), ConfigError);
  CHECK_THROWS_AS(MeshSpec::circle(-1.0, 8).validate(), ConfigError);
  CHECK_THROWS_AS(MeshSpec::torus({1.0, 1.0}, {8}).validate(), ConfigError);
  CHECK_THROWS_AS(parse_manifold("sphere"), ConfigError);
  CHECK(MeshSpec::interval(1.0, 10).vertex_count() == 11);
}

TEST_CASE("unit ball volumes") {
  CHECK(unit_ball_volume(1) == doctest::Approx(2.0));
  CHECK(unit_ball_volume(2) == doctest::Approx(kPi));
  CHECK(unit_ball_volume(3) == doctest::Approx(4.0 * kPi / 3.0));
}

TEST_CASE("Weyl counting on circles collapses by volume") {
  const double h = 2 * kPi / 128;
  std::vector<MeshSpec> meshes;
  for (int n : {128, 256, 512}) meshes.push_back(MeshSpec::circle(n * h, n));
  const WeylReport w = weyl_check(meshes, mid_lambda_grid(meshes));
  CHECK(w.collapse <= 0.10);
  CHECK(w.bound_holds);
  for (const auto& f : w.fits) {
    REQUIRE(f.fit);
    CHECK(f.fit->slope == doctest::Approx(0.5).epsilon(0.1));
  }
}

TEST_CASE("Weyl slope on tori is n/2") {
  const double h = 2 * kPi / 64;
  std::vector<MeshSpec> meshes;
  for (int n : {128, 256, 512}) meshes.push_back(MeshSpec::torus({n * h, n * h}, {n, n}));
  const WeylReport w = weyl_check(meshes, mid_lambda_grid(meshes));
  CHECK(w.bound_holds);
  for (const auto& f : w.fits) {
    REQUIRE(f.fit);
    CHECK(std::abs(f.fit->slope - 1.0) <= 0.1);
  }
}

TEST_CASE("covering and packing on a circle") {
  const MeshSpec m = MeshSpec::circle(2 * kPi, 64);
  // A closed eps-ball covers an arc of length 2 eps; points eps apart fit 2 pi / eps times.
  CHECK(covering_number(m, kPi / 8) == 8);
  CHECK(covering_number(m, kPi / 4) == 4);
  CHECK(covering_number(m, kPi / 2) == 2);
  CHECK(packing_count(m, kPi / 8) == 16);
  CHECK(packing_count(m, kPi / 4) == 8);
  CHECK(packing_bound(m, kPi / 8) == doctest::Approx(16.0));
  CHECK(covering_number(MeshSpec::interval(1.0, 10), 0.2) == 3);
  CHECK(std::isinf(packing_bound(m, 10.0)));
}

TEST_CASE("covering on a torus stays between volume and packing bounds") {
  const MeshSpec m = MeshSpec::torus({2 * kPi, 2 * kPi}, {32, 32});
  for (double eps : {kPi / 4, kPi / 2}) {
    const std::size_t v = covering_number(m, eps);
    // Each ball has area at most pi eps^2.
    CHECK(double(v) >= m.volume() / (kPi * eps * eps));
    CHECK(v <= packing_count(m, eps));
  }
  CHECK_THROWS_AS(covering_number(m, 0.1), ConfigError);  // finer than twice the spacing
}

TEST_CASE("eigenvalue at the covering index scales like eps^-2") {
  const std::vector<double> eps = {kPi / 8, kPi / 4, kPi / 2};
  std::vector<CoveringReport> reports;
  for (int n : {64, 128, 256}) {
    reports.push_back(verify_eigen_covering_bound(MeshSpec::circle(2 * kPi, n), eps));
    CHECK(reports.back().sandwich);
    for (const auto& row : reports.back().rows) {
      CHECK(row.index == row.covering);
      CHECK(row.k == doctest::Approx(row.eigenvalue * row.epsilon * row.epsilon));
      CHECK(row.k > 1.0);
    }
  }
  CHECK(covering_stability(reports).worst <= 2.0);
}
