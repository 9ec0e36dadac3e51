#pragma once

#include <map>
#include <string>
#include <utility>

#include "coarsehom/space.hpp"

namespace coarsehom {

/// Uniformly finite 0-chain on a window: a sparse real coefficient per
/// vertex. Support must lie in the window interior (see validate()).
struct Chain0 {
  std::string window;
  std::map<VertexId, double> coeffs;

  double at(VertexId v) const {
    auto it = coeffs.find(v);
    return it == coeffs.end() ? 0.0 : it->second;
  }
  void add(VertexId v, double value);
  Chain0 scaled(double t) const;
  bool is_zero() const;
};

/// Uniformly finite 1-chain. Pairs are stored with x < y; a coefficient
/// `v` on (x, y) means v units on the oriented simplex x -> y.
struct Chain1 {
  std::string window;
  int span = 1;
  std::map<std::pair<VertexId, VertexId>, double> coeffs;

  /// Adds `value` on the oriented simplex x -> y (normalising orientation).
  void add(VertexId x, VertexId y, double value);
  /// Signed value on the oriented simplex x -> y.
  double at(VertexId x, VertexId y) const;
};

/// Throws ConfigError if the support leaves the interior or the window id
/// does not match.
void validate(const Chain0& c, const Window& w);
/// Throws ConfigError if a supported pair is farther apart than `span`.
void validate(const Chain1& b, const Window& w);

/// Boundary with the convention d(x -> y) = delta_y - delta_x. Sink
/// vertices absorb whatever arrives there; that part is kept separately.
struct BoundaryResult {
  Chain0 interior;
  std::map<VertexId, double> sinks;

  double escaped_mass() const;
  /// Sum over every vertex, sinks included. Zero for every 1-chain.
  double total_mass() const;
};

BoundaryResult boundary(const Chain1& b, const Window& w);

/// Best C_r on the window: max over v of the mass of |c| inside ball(v, r).
double uf_norm0(const Chain0& c, const Window& w, int r);

/// Largest total |b| over the simplices incident to a single vertex.
double throughput(const Chain1& b);

/// Exact sum of the coefficients of c over R.
double window_sum(const Chain0& c, const Region& region);

}  // namespace coarsehom
