#include "coarsehom/chains.hpp"

#include <algorithm>
#include <cmath>

#include "coarsehom/errors.hpp"

namespace coarsehom {

void Chain0::add(VertexId v, double value) {
  if (value == 0.0) return;
  double& slot = coeffs[v];
  slot += value;
  if (slot == 0.0) coeffs.erase(v);
}

Chain0 Chain0::scaled(double t) const {
  Chain0 out{window, {}};
  for (auto [v, x] : coeffs) out.add(v, t * x);
  return out;
}

bool Chain0::is_zero() const {
  return std::all_of(coeffs.begin(), coeffs.end(),
                     [](const auto& kv) { return kv.second == 0.0; });
}

void Chain1::add(VertexId x, VertexId y, double value) {
  if (x == y || value == 0.0) return;
  if (x > y) {
    std::swap(x, y);
    value = -value;
  }
  double& slot = coeffs[{x, y}];
  slot += value;
  if (slot == 0.0) coeffs.erase({x, y});
}

double Chain1::at(VertexId x, VertexId y) const {
  const double sign = x < y ? 1.0 : -1.0;
  auto it = coeffs.find({std::min(x, y), std::max(x, y)});
  return it == coeffs.end() ? 0.0 : sign * it->second;
}

void validate(const Chain0& c, const Window& w) {
  if (!c.window.empty() && c.window != w.id()) {
    throw ConfigError("chain belongs to window '" + c.window + "', not '" + w.id() + "'",
                      "window");
  }
  for (auto [v, x] : c.coeffs) {
    w.check_vertex(v);
    if (!w.is_interior(v) && x != 0.0) {
      throw ConfigError("0-chain support leaves the interior at vertex " + std::to_string(v),
                        "coeffs");
    }
    if (!std::isfinite(x)) throw ConfigError("non-finite coefficient", "coeffs");
  }
}

void validate(const Chain1& b, const Window& w) {
  if (!b.window.empty() && b.window != w.id()) {
    throw ConfigError("chain belongs to window '" + b.window + "', not '" + w.id() + "'",
                      "window");
  }
  if (b.span < 1) throw ConfigError("span must be >= 1", "span");
  for (const auto& [pair, x] : b.coeffs) {
    auto [u, v] = pair;
    w.check_vertex(u);
    w.check_vertex(v);
    if (u >= v) throw ConfigError("1-chain pairs must satisfy x < y", "coeffs");
    const int d = w.distance(u, v);
    if (d < 0 || d > b.span) {
      throw ConfigError("1-chain simplex (" + std::to_string(u) + "," + std::to_string(v) +
                            ") is longer than span",
                        "coeffs");
    }
    if (!std::isfinite(x)) throw ConfigError("non-finite coefficient", "coeffs");
  }
}

double BoundaryResult::escaped_mass() const {
  double total = 0.0;
  for (auto [v, x] : sinks) total += x;
  return total;
}

double BoundaryResult::total_mass() const {
  double total = escaped_mass();
  for (auto [v, x] : interior.coeffs) total += x;
  return total;
}

BoundaryResult boundary(const Chain1& b, const Window& w) {
  BoundaryResult out;
  out.interior.window = w.id();
  auto deposit = [&](VertexId v, double x) {
    if (w.is_interior(v)) {
      out.interior.add(v, x);
    } else {
      out.sinks[v] += x;
    }
  };
  for (const auto& [pair, x] : b.coeffs) {
    deposit(pair.second, x);
    deposit(pair.first, -x);
  }
  return out;
}

double uf_norm0(const Chain0& c, const Window& w, int r) {
  if (r < 1) throw ConfigError("radius must be >= 1", "r");
  if (c.coeffs.empty()) return 0.0;
  double best = 0.0;
  for (std::size_t v = 0; v < w.size(); ++v) {
    double mass = 0.0;
    for (VertexId x : w.within(static_cast<VertexId>(v), r)) mass += std::abs(c.at(x));
    best = std::max(best, mass);
  }
  return best;
}

double throughput(const Chain1& b) {
  std::map<VertexId, double> load;
  for (const auto& [pair, x] : b.coeffs) {
    load[pair.first] += std::abs(x);
    load[pair.second] += std::abs(x);
  }
  double best = 0.0;
  for (auto [v, x] : load) best = std::max(best, x);
  return best;
}

double window_sum(const Chain0& c, const Region& region) {
  double total = 0.0;
  if (region.size() < c.coeffs.size()) {
    for (VertexId v : region) total += c.at(v);
  } else {
    for (auto [v, x] : c.coeffs) {
      if (region.contains(v)) total += x;
    }
  }
  return total;
}

}  // namespace coarsehom
