#include "coarsehom/spectral.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <queue>
#include <sstream>

#include "coarsehom/errors.hpp"
#include "coarsehom/parallel.hpp"

namespace coarsehom {

namespace {

constexpr double kBallTolerance = 1e-12;

std::vector<double> dense_eigenvalues(const Eigen::MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw NumericalError("dense eigensolver did not converge");
  }
  std::vector<double> out(solver.eigenvalues().data(),
                          solver.eigenvalues().data() + solver.eigenvalues().size());
  // The Laplacian is positive semidefinite; clamp rounding below zero.
  for (double& x : out) x = std::max(x, 0.0);
  std::sort(out.begin(), out.end());
  return out;
}

// Strides for row-major indexing, last axis fastest.
std::vector<std::size_t> strides(const MeshSpec& m) {
  std::vector<std::size_t> s(m.dimension(), 1);
  for (int a = m.dimension() - 2; a >= 0; --a) s[a] = s[a + 1] * m.points(a + 1);
  return s;
}

std::vector<int> coordinates(const MeshSpec& m, std::size_t index) {
  std::vector<int> c(m.dimension());
  for (int a = m.dimension() - 1; a >= 0; --a) {
    c[a] = static_cast<int>(index % m.points(a));
    index /= m.points(a);
  }
  return c;
}

Eigen::MatrixXd laplacian_matrix(const MeshSpec& m) {
  const std::size_t n = m.vertex_count();
  Eigen::MatrixXd lap = Eigen::MatrixXd::Zero(n, n);
  const auto st = strides(m);
  for (std::size_t v = 0; v < n; ++v) {
    const auto c = coordinates(m, v);
    for (int a = 0; a < m.dimension(); ++a) {
      const double w = 1.0 / (m.spacing(a) * m.spacing(a));
      const int p = m.points(a);
      for (int step : {-1, 1}) {
        int x = c[a] + step;
        if (m.wraps()) {
          x = (x + p) % p;
        } else if (x < 0 || x >= p) {
          continue;
        }
        const std::size_t u = v + (static_cast<std::size_t>(x) - c[a]) * st[a];
        lap(v, u) -= w;
        lap(v, v) += w;
      }
    }
  }
  return lap;
}

MeshSpec axis_mesh(const MeshSpec& m, int axis) {
  MeshSpec one;
  one.manifold = m.manifold == Manifold::Torus ? Manifold::Circle : m.manifold;
  one.sides = {m.sides[axis]};
  one.subdivisions = {m.subdivisions[axis]};
  return one;
}

// Points of the closed (or open) epsilon-ball about the origin as per-axis
// offsets. On wrapped axes offsets are residues mod the point count.
std::vector<std::vector<int>> ball_stencil(const MeshSpec& m, double epsilon, bool open) {
  const double limit = open ? epsilon * (1.0 - kBallTolerance) : epsilon * (1.0 + kBallTolerance);
  std::vector<std::vector<std::pair<int, double>>> axis(m.dimension());
  for (int a = 0; a < m.dimension(); ++a) {
    const int p = m.points(a);
    const double h = m.spacing(a);
    if (m.wraps()) {
      for (int r = 0; r < p; ++r) {
        const double d = std::min(r, p - r) * h;
        if (open ? d < limit : d <= limit) axis[a].push_back({r, d});
      }
    } else {
      for (int k = -(p - 1); k <= p - 1; ++k) {
        const double d = std::abs(k) * h;
        if (open ? d < limit : d <= limit) axis[a].push_back({k, d});
      }
    }
  }
  std::vector<std::vector<int>> out;
  std::vector<int> cur(m.dimension());
  std::function<void(int, double)> rec = [&](int a, double sq) {
    if (a == m.dimension()) {
      const double d = std::sqrt(sq);
      if (open ? d < limit : d <= limit) out.push_back(cur);
      return;
    }
    for (auto [off, d] : axis[a]) {
      cur[a] = off;
      rec(a + 1, sq + d * d);
    }
  };
  rec(0, 0.0);
  return out;
}

// Calls f(u) for every mesh point u = v + offset that exists.
template <typename F>
void for_stencil(const MeshSpec& m, const std::vector<std::size_t>& st,
                 const std::vector<std::vector<int>>& stencil, std::size_t v, F&& f) {
  const auto c = coordinates(m, v);
  for (const auto& off : stencil) {
    std::size_t u = 0;
    bool inside = true;
    for (int a = 0; a < m.dimension(); ++a) {
      int x = c[a] + off[a];
      const int p = m.points(a);
      if (m.wraps()) {
        x %= p;
      } else if (x < 0 || x >= p) {
        inside = false;
        break;
      }
      u += static_cast<std::size_t>(x) * st[a];
    }
    if (inside) f(u);
  }
}

void check_epsilon(const MeshSpec& m, double epsilon) {
  m.validate();
  if (!(epsilon >= 2.0 * m.max_spacing() * (1.0 - kBallTolerance)) || !std::isfinite(epsilon)) {
    throw ConfigError("epsilon must be at least twice the mesh spacing (" +
                          std::to_string(2.0 * m.max_spacing()) + ")",
                      "epsilon");
  }
}

}  // namespace

Manifold parse_manifold(const std::string& text) {
  if (text == "circle") return Manifold::Circle;
  if (text == "torus") return Manifold::Torus;
  if (text == "interval") return Manifold::Interval;
  throw ConfigError("unknown manifold '" + text + "' (expected circle, torus or interval)", "mesh");
}

std::string to_string(Manifold m) {
  switch (m) {
    case Manifold::Circle: return "circle";
    case Manifold::Torus: return "torus";
    case Manifold::Interval: return "interval";
  }
  return "circle";
}

MeshSpec MeshSpec::circle(double length, int n) { return {Manifold::Circle, {length}, {n}}; }

MeshSpec MeshSpec::torus(std::vector<double> sides, std::vector<int> subdivisions) {
  return {Manifold::Torus, std::move(sides), std::move(subdivisions)};
}

MeshSpec MeshSpec::interval(double length, int n) { return {Manifold::Interval, {length}, {n}}; }

double MeshSpec::max_spacing() const {
  double h = 0.0;
  for (int a = 0; a < dimension(); ++a) h = std::max(h, spacing(a));
  return h;
}

int MeshSpec::points(int axis) const {
  return manifold == Manifold::Interval ? subdivisions[axis] + 1 : subdivisions[axis];
}

std::size_t MeshSpec::vertex_count() const {
  std::size_t n = 1;
  for (int a = 0; a < dimension(); ++a) n *= static_cast<std::size_t>(points(a));
  return n;
}

double MeshSpec::volume() const {
  double v = 1.0;
  for (double s : sides) v *= s;
  return v;
}

std::string MeshSpec::describe() const {
  std::ostringstream out;
  out.precision(17);
  out << to_string(manifold) << "(";
  for (int a = 0; a < dimension(); ++a) out << (a ? "x" : "") << sides[a];
  out << ";";
  for (int a = 0; a < dimension(); ++a) out << (a ? "x" : "") << subdivisions[a];
  out << ")";
  return out.str();
}

void MeshSpec::validate() const {
  if (sides.empty() || sides.size() != subdivisions.size()) {
    throw ConfigError("mesh needs one side length and one subdivision count per dimension",
                      "subdiv");
  }
  if (manifold != Manifold::Torus && sides.size() != 1) {
    throw ConfigError(to_string(manifold) + " meshes are one-dimensional", "dims");
  }
  if (sides.size() > 3) throw ConfigError("torus dimension must be 1, 2 or 3", "dims");
  for (double s : sides) {
    if (!(s > 0.0) || !std::isfinite(s)) throw ConfigError("side lengths must be positive", "side");
  }
  for (int n : subdivisions) {
    if (n < 4) throw ConfigError("subdivisions must be >= 4", "subdiv");
  }
}

SpectrumReport laplacian_spectrum(const MeshSpec& mesh, std::optional<double> cutoff,
                                  const SpectralOptions& options) {
  mesh.validate();
  if (cutoff && !(*cutoff >= 0.0)) throw ConfigError("cutoff must be nonnegative", "cutoff");
  SpectrumReport rep;
  rep.mesh = mesh;
  rep.volume = mesh.volume();
  rep.dimension = mesh.dimension();

  if (mesh.vertex_count() <= options.dense_limit) {
    rep.method = "dense";
    rep.eigenvalues = dense_eigenvalues(laplacian_matrix(mesh));
    return rep;
  }
  if (mesh.dimension() == 1) {
    throw ConfigError("one-dimensional mesh with " + std::to_string(mesh.vertex_count()) +
                          " vertices exceeds the dense eigensolver limit of " +
                          std::to_string(options.dense_limit),
                      "subdiv");
  }

  // The torus Laplacian is the Kronecker sum of its circle factors, so its
  // spectrum is every sum of one eigenvalue per axis.
  rep.method = "separable";
  std::vector<std::vector<double>> factors;
  for (int a = 0; a < mesh.dimension(); ++a) {
    const MeshSpec one = axis_mesh(mesh, a);
    if (one.vertex_count() > options.dense_limit) {
      throw ConfigError("axis " + std::to_string(a) + " exceeds the dense eigensolver limit",
                        "subdiv");
    }
    factors.push_back(dense_eigenvalues(laplacian_matrix(one)));
  }
  const double limit = cutoff.value_or(std::numeric_limits<double>::infinity());
  std::vector<double> floor_after(mesh.dimension() + 1, 0.0);
  for (int a = mesh.dimension() - 1; a >= 0; --a) floor_after[a] = floor_after[a + 1] + factors[a][0];
  std::function<void(int, double)> rec = [&](int a, double partial) {
    if (a == mesh.dimension()) {
      if (rep.eigenvalues.size() >= options.enumeration_limit) {
        throw ConfigError("spectrum below the cutoff has more than " +
                              std::to_string(options.enumeration_limit) + " eigenvalues",
                          "cutoff");
      }
      rep.eigenvalues.push_back(partial);
      return;
    }
    for (double x : factors[a]) {
      if (partial + x + floor_after[a + 1] > limit) break;
      rec(a + 1, partial + x);
    }
  };
  rec(0, 0.0);
  std::sort(rep.eigenvalues.begin(), rep.eigenvalues.end());
  rep.cutoff = rep.complete() ? std::numeric_limits<double>::infinity() : limit;
  return rep;
}

std::vector<double> closed_form_spectrum(const MeshSpec& mesh) {
  mesh.validate();
  const double pi = std::numbers::pi;
  std::vector<std::vector<double>> axes;
  for (int a = 0; a < mesh.dimension(); ++a) {
    const int p = mesh.points(a);
    const double h2 = mesh.spacing(a) * mesh.spacing(a);
    std::vector<double> ev;
    for (int k = 0; k < p; ++k) {
      if (mesh.wraps()) {
        const double s = std::sin(pi * k / p);
        ev.push_back(4.0 * s * s / h2);
      } else {
        ev.push_back((2.0 - 2.0 * std::cos(pi * k / p)) / h2);
      }
    }
    axes.push_back(std::move(ev));
  }
  std::vector<double> out{0.0};
  for (const auto& ev : axes) {
    std::vector<double> next;
    next.reserve(out.size() * ev.size());
    for (double x : out) {
      for (double y : ev) next.push_back(x + y);
    }
    out = std::move(next);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::size_t counting_function(const SpectrumReport& spectrum, double lambda) {
  if (std::isnan(lambda)) throw ConfigError("lambda is not a number", "lambda");
  if (lambda < 0.0) return 0;
  if (lambda > spectrum.cutoff) {
    throw ConfigError("lambda " + std::to_string(lambda) + " is above the spectrum cutoff " +
                          std::to_string(spectrum.cutoff),
                      "lambda");
  }
  const double slack = 1e-9 * std::max(1.0, std::abs(lambda));
  return static_cast<std::size_t>(std::upper_bound(spectrum.eigenvalues.begin(),
                                                   spectrum.eigenvalues.end(), lambda + slack) -
                                  spectrum.eigenvalues.begin());
}

double max_relative_error(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) return std::numeric_limits<double>::infinity();
  // Zero eigenvalues are measured against the smallest nonzero magnitude.
  double gap = std::numeric_limits<double>::infinity();
  for (double x : b) {
    if (std::abs(x) > 0.0) gap = std::min(gap, std::abs(x));
  }
  if (!std::isfinite(gap)) gap = 1.0;
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double denom = std::max(std::abs(b[i]), gap);
    worst = std::max(worst, std::abs(a[i] - b[i]) / denom);
  }
  return worst;
}

double unit_ball_volume(int n) {
  return std::pow(std::numbers::pi, n / 2.0) / std::tgamma(n / 2.0 + 1.0);
}

std::vector<double> mid_lambda_grid(const std::vector<MeshSpec>& meshes, int count) {
  if (meshes.empty()) throw ConfigError("need at least one mesh", "sizes");
  if (count < 2) throw ConfigError("grid needs at least two points", "lambda");
  const int n = meshes.front().dimension();
  double vol_min = std::numeric_limits<double>::infinity();
  double h_max = 0.0;
  for (const auto& m : meshes) {
    m.validate();
    vol_min = std::min(vol_min, m.volume());
    h_max = std::max(h_max, m.max_spacing());
  }
  // Weyl count omega_n Vol lambda^(n/2) / (2 pi)^n reaches 10 here.
  const double lo = std::pow(10.0 * std::pow(2.0 * std::numbers::pi, n) /
                                 (unit_ball_volume(n) * vol_min),
                             2.0 / n);
  const double hi = 1.0 / (4.0 * h_max * h_max);
  if (!(hi > lo)) {
    throw ConfigError("meshes are too coarse for a mid-range grid (need 1/(4h^2) above " +
                          std::to_string(lo) + ")",
                      "sizes");
  }
  std::vector<double> grid;
  for (int i = 0; i < count; ++i) grid.push_back(lo * std::pow(hi / lo, double(i) / (count - 1)));
  return grid;
}

WeylReport weyl_check(const std::vector<MeshSpec>& meshes, std::vector<double> lambda_grid,
                      const SpectralOptions& options) {
  if (meshes.size() < 3) throw ConfigError("Weyl check needs at least 3 meshes", "sizes");
  for (const auto& m : meshes) {
    m.validate();
    if (m.manifold != meshes.front().manifold || m.dimension() != meshes.front().dimension()) {
      throw ConfigError("meshes must share manifold type and dimension", "sizes");
    }
  }
  WeylReport rep;
  rep.dimension = meshes.front().dimension();

  std::vector<double> grid;
  for (double l : lambda_grid) {
    if (!(l > 0.0) || !std::isfinite(l)) continue;
    bool valid = true;
    for (const auto& m : meshes) valid = valid && l <= 1.0 / (m.max_spacing() * m.max_spacing());
    if (valid) grid.push_back(l);
  }
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  if (grid.empty()) {
    throw ConfigError("lambda grid is empty after removing values outside (0, 1/h^2]", "lambda");
  }
  rep.grid = grid;

  const double top = grid.back();
  auto spectra = parallel_map(meshes.size(), [&](std::size_t i) {
    return laplacian_spectrum(meshes[i], top, options);
  });

  const double half_n = rep.dimension / 2.0;
  double lambda1 = std::numeric_limits<double>::infinity();
  for (const auto& s : spectra) {
    auto it = std::upper_bound(s.eigenvalues.begin(), s.eigenvalues.end(), 1e-9);
    if (it != s.eigenvalues.end()) lambda1 = std::min(lambda1, *it);
  }
  rep.lambda0 = std::isfinite(lambda1) ? std::max(lambda1, grid.front()) : grid.front();

  std::vector<std::vector<std::size_t>> counts(meshes.size());
  for (std::size_t i = 0; i < meshes.size(); ++i) {
    WeylMeshFit f;
    f.mesh = meshes[i].describe();
    f.volume = meshes[i].volume();
    std::vector<double> ys;
    for (double l : grid) {
      const std::size_t c = counting_function(spectra[i], l);
      counts[i].push_back(c);
      ys.push_back(static_cast<double>(c));
      f.constant = std::max(f.constant, c / (f.volume * std::pow(std::max(l, rep.lambda0), half_n)));
    }
    if (grid.size() >= 2) f.fit = fit_log_log(grid, ys);
    rep.constant = std::max(rep.constant, f.constant);
    rep.fits.push_back(std::move(f));
  }

  for (std::size_t g = 0; g < grid.size(); ++g) {
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (std::size_t i = 0; i < meshes.size(); ++i) {
      const double density = counts[i][g] / rep.fits[i].volume;
      lo = std::min(lo, density);
      hi = std::max(hi, density);
    }
    rep.collapse = std::max(rep.collapse, hi / lo - 1.0);
  }

  double cmin = std::numeric_limits<double>::infinity(), cmax = 0.0;
  for (const auto& f : rep.fits) {
    cmin = std::min(cmin, f.constant);
    cmax = std::max(cmax, f.constant);
  }
  rep.constant_spread = cmax / cmin;

  rep.bound_holds = true;
  for (std::size_t g = 0; g < grid.size(); ++g) {
    for (std::size_t i = 0; i < meshes.size(); ++i) {
      WeylRow row;
      row.lambda = grid[g];
      row.mesh = rep.fits[i].mesh;
      row.count = counts[i][g];
      row.volume = rep.fits[i].volume;
      row.dimension = rep.dimension;
      row.bound_rhs =
          rep.constant * row.volume * std::pow(std::max(row.lambda, rep.lambda0), half_n);
      if (static_cast<double>(row.count) > row.bound_rhs * (1.0 + 1e-12)) rep.bound_holds = false;
      rep.rows.push_back(std::move(row));
    }
  }
  return rep;
}

std::size_t covering_number(const MeshSpec& mesh, double epsilon) {
  check_epsilon(mesh, epsilon);
  const std::size_t n = mesh.vertex_count();
  const auto st = strides(mesh);
  const auto stencil = ball_stencil(mesh, epsilon, false);
  std::vector<char> covered(n, 0);

  auto gain = [&](std::size_t c) {
    std::size_t g = 0;
    for_stencil(mesh, st, stencil, c, [&](std::size_t u) { g += !covered[u]; });
    return g;
  };
  // Lazy greedy: stored gains only overestimate, so a popped entry whose
  // gain is still current is the best choice, and among equal gains the
  // smallest index surfaces first.
  using Entry = std::pair<std::size_t, std::size_t>;  // gain, index
  auto worse = [](const Entry& a, const Entry& b) {
    return a.first != b.first ? a.first < b.first : a.second > b.second;
  };
  std::priority_queue<Entry, std::vector<Entry>, decltype(worse)> queue(worse);
  for (std::size_t c = 0; c < n; ++c) queue.push({gain(c), c});
  std::size_t remaining = n, chosen = 0;
  while (remaining > 0) {
    auto [g, c] = queue.top();
    queue.pop();
    const std::size_t now = gain(c);
    if (now != g) {
      if (now > 0) queue.push({now, c});
      continue;
    }
    for_stencil(mesh, st, stencil, c, [&](std::size_t u) {
      if (!covered[u]) {
        covered[u] = 1;
        --remaining;
      }
    });
    ++chosen;
  }
  return chosen;
}

std::size_t packing_count(const MeshSpec& mesh, double epsilon) {
  check_epsilon(mesh, epsilon);
  const std::size_t n = mesh.vertex_count();
  const auto st = strides(mesh);
  const auto open = ball_stencil(mesh, epsilon, true);
  std::vector<char> blocked(n, 0);
  std::vector<std::size_t> centers;
  for (std::size_t v = 0; v < n; ++v) {
    if (blocked[v]) continue;
    centers.push_back(v);
    for_stencil(mesh, st, open, v, [&](std::size_t u) { blocked[u] = 1; });
  }
  // Maximality: the concentric closed epsilon-balls cover the mesh.
  const auto closed = ball_stencil(mesh, epsilon, false);
  std::vector<char> covered(n, 0);
  for (std::size_t c : centers) {
    for_stencil(mesh, st, closed, c, [&](std::size_t u) { covered[u] = 1; });
  }
  if (std::find(covered.begin(), covered.end(), 0) != covered.end()) {
    throw NumericalError("packing is not maximal: its epsilon-balls leave a point uncovered");
  }
  return centers.size();
}

double packing_bound(const MeshSpec& mesh, double epsilon) {
  mesh.validate();
  double shortest = std::numeric_limits<double>::infinity();
  for (double s : mesh.sides) shortest = std::min(shortest, s);
  // An epsilon/2-ball is a Euclidean ball only while it fits in the fundamental domain.
  if (epsilon / 2.0 > shortest / 2.0 || (!mesh.wraps() && epsilon / 2.0 > shortest)) {
    return std::numeric_limits<double>::infinity();
  }
  const int n = mesh.dimension();
  double bound = std::pow(2.0, n) * mesh.volume() * std::pow(epsilon, -n) / unit_ball_volume(n);
  // Interval endpoints: half-balls at the two ends add at most one point each.
  if (!mesh.wraps()) bound += 1.0;
  return bound;
}

CoveringReport verify_eigen_covering_bound(const MeshSpec& mesh,
                                           const std::vector<double>& epsilons,
                                           const SpectralOptions& options) {
  mesh.validate();
  if (epsilons.empty()) throw ConfigError("epsilon grid is empty", "epsilon");
  CoveringReport rep;
  rep.mesh = mesh;
  for (double e : epsilons) check_epsilon(mesh, e);
  const SpectrumReport spec = laplacian_spectrum(mesh, std::nullopt, options);
  rep.min_k = std::numeric_limits<double>::infinity();
  for (double e : epsilons) {
    CoveringRow row;
    row.epsilon = e;
    row.covering = covering_number(mesh, e);
    row.packing = packing_count(mesh, e);
    row.packing_bound = packing_bound(mesh, e);
    row.index = row.covering;
    if (row.index >= spec.eigenvalues.size()) {
      throw NumericalError("spectrum too shallow: eigenvalue index " + std::to_string(row.index) +
                           " (0-based) is required");
    }
    row.eigenvalue = spec.eigenvalues[row.index];
    row.k = row.eigenvalue * e * e;
    rep.min_k = std::min(rep.min_k, row.k);
    if (row.covering > row.packing) rep.sandwich = false;
    rep.rows.push_back(row);
  }
  return rep;
}

RefinementStability covering_stability(const std::vector<CoveringReport>& reports) {
  if (reports.size() < 2) throw ConfigError("stability needs at least two refinements", "sizes");
  RefinementStability out;
  for (std::size_t j = 0; j < reports.front().rows.size(); ++j) {
    const double e = reports.front().rows[j].epsilon;
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (const auto& r : reports) {
      if (r.rows.size() != reports.front().rows.size() || r.rows[j].epsilon != e) {
        throw ConfigError("refinements must share the epsilon grid", "epsilon");
      }
      lo = std::min(lo, r.rows[j].k);
      hi = std::max(hi, r.rows[j].k);
    }
    out.epsilons.push_back(e);
    out.ratio.push_back(hi / lo);
    out.worst = std::max(out.worst, hi / lo);
  }
  return out;
}

}  // namespace coarsehom
