#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "coarsehom/stats.hpp"

namespace coarsehom {

enum class Manifold { Circle, Torus, Interval };

Manifold parse_manifold(const std::string& text);
std::string to_string(Manifold m);

/// Uniform grid on a flat circle, torus or interval. Circle and torus grids
/// wrap around; an interval of n subdivisions has n + 1 vertices (Neumann).
struct MeshSpec {
  Manifold manifold = Manifold::Circle;
  std::vector<double> sides;       // one per dimension
  std::vector<int> subdivisions;   // one per dimension

  static MeshSpec circle(double length, int n);
  static MeshSpec torus(std::vector<double> sides, std::vector<int> subdivisions);
  static MeshSpec interval(double length, int n);

  int dimension() const { return static_cast<int>(sides.size()); }
  double spacing(int axis) const { return sides[axis] / subdivisions[axis]; }
  double max_spacing() const;
  /// Grid points along an axis (n, or n + 1 for the interval).
  int points(int axis) const;
  std::size_t vertex_count() const;
  double volume() const;
  bool wraps() const { return manifold != Manifold::Interval; }
  std::string describe() const;

  /// Throws ConfigError on fewer than 4 subdivisions, non-positive sides or
  /// mismatched dimensions.
  void validate() const;
};

struct SpectralOptions {
  /// Largest mesh handled by a dense eigensolve of the full Laplacian.
  std::size_t dense_limit = 4096;
  /// Largest number of eigenvalues the separable path will enumerate.
  std::size_t enumeration_limit = std::size_t{1} << 22;
};

/// Eigenvalues of the scaled Laplacian (graph Laplacian with edge weights
/// 1/h^2), ascending with multiplicity. Index k (0-based) is the (k+1)-th
/// eigenvalue; index 0 is the zero eigenvalue of the constants.
struct SpectrumReport {
  MeshSpec mesh;
  std::vector<double> eigenvalues;
  /// Every eigenvalue <= cutoff is present. Infinite when the spectrum is
  /// complete.
  double cutoff = std::numeric_limits<double>::infinity();
  std::string method;  // "dense" or "separable"
  double volume = 0.0;
  int dimension = 1;

  bool complete() const { return eigenvalues.size() == mesh.vertex_count(); }
};

/// Dense solve up to `dense_limit` vertices; larger tori use the Kronecker
/// sum of the per-axis spectra, restricted to values <= cutoff if given.
SpectrumReport laplacian_spectrum(const MeshSpec& mesh,
                                  std::optional<double> cutoff = std::nullopt,
                                  const SpectralOptions& options = {});

/// Exact spectrum from the circulant / path closed forms, sorted.
std::vector<double> closed_form_spectrum(const MeshSpec& mesh);

/// Number of eigenvalues <= lambda with multiplicity. Throws ConfigError if
/// lambda exceeds the cutoff of a truncated spectrum.
std::size_t counting_function(const SpectrumReport& spectrum, double lambda);

/// Largest relative deviation between two sorted spectra of equal length.
double max_relative_error(const std::vector<double>& a, const std::vector<double>& b);

/// Volume of the unit ball in R^n.
double unit_ball_volume(int n);

struct WeylRow {
  double lambda = 0.0;
  std::string mesh;
  std::size_t count = 0;
  double volume = 0.0;
  int dimension = 1;
  double bound_rhs = 0.0;  // C * Vol * max(lambda, lambda0)^(n/2)
};

struct WeylMeshFit {
  std::string mesh;
  double volume = 0.0;
  std::optional<LinearFit> fit;  // log N against log lambda, >= 2 grid points
  double constant = 0.0;  // smallest C for this mesh alone
};

struct WeylReport {
  int dimension = 1;
  std::vector<double> grid;
  std::vector<WeylMeshFit> fits;
  /// max over the grid of (max_i N_i/Vol_i) / (min_i N_i/Vol_i) - 1.
  double collapse = 0.0;
  double lambda0 = 0.0;
  double constant = 0.0;         // smallest C valid for every mesh on the grid
  double constant_spread = 0.0;  // max_i C_i / min_i C_i
  bool bound_holds = false;
  std::vector<WeylRow> rows;
};

/// Grid where finite meshes are in their Weyl regime: from the point where
/// the smallest mesh expects 10 eigenvalues up to 1/(4 h_max^2), spaced
/// geometrically.
std::vector<double> mid_lambda_grid(const std::vector<MeshSpec>& meshes, int count = 16);

/// Counting-function fits and the two-branch bound N <= C Vol max(l, l0)^(n/2)
/// over a family of meshes of one manifold type and dimension.
WeylReport weyl_check(const std::vector<MeshSpec>& meshes, std::vector<double> lambda_grid,
                      const SpectralOptions& options = {});

/// Greedy set cover of the mesh points by closed geodesic epsilon-balls
/// centred at mesh points: an upper bound on V(epsilon).
std::size_t covering_number(const MeshSpec& mesh, double epsilon);

/// Greedy maximal family of mesh points pairwise >= epsilon apart (so the
/// open epsilon/2-balls are disjoint), scanned in index order.
std::size_t packing_count(const MeshSpec& mesh, double epsilon);

/// Continuum packing bound 2^n Vol epsilon^-n / omega_n; infinite when an
/// epsilon/2-ball does not embed in the manifold.
double packing_bound(const MeshSpec& mesh, double epsilon);

struct CoveringRow {
  double epsilon = 0.0;
  std::size_t covering = 0;
  std::size_t packing = 0;
  double packing_bound = 0.0;
  std::size_t index = 0;  // 0-based eigenvalue index read, equal to covering
  double eigenvalue = 0.0;
  double k = 0.0;         // eigenvalue * epsilon^2
};

struct CoveringReport {
  MeshSpec mesh;
  std::vector<CoveringRow> rows;
  double min_k = 0.0;
  bool sandwich = true;  // covering <= packing for every epsilon
};

/// Reads lambda at index V(epsilon) (the (V+1)-th eigenvalue) for each
/// epsilon and reports K = lambda * epsilon^2.
CoveringReport verify_eigen_covering_bound(const MeshSpec& mesh,
                                           const std::vector<double>& epsilons,
                                           const SpectralOptions& options = {});

struct RefinementStability {
  std::vector<double> epsilons;
  std::vector<double> ratio;  // per epsilon: max K / min K across meshes
  double worst = 0.0;
};

/// Compares K(epsilon) across refinements of one manifold; reports must
/// share the epsilon grid.
RefinementStability covering_stability(const std::vector<CoveringReport>& reports);

}  // namespace coarsehom
