#include "coarsehom/decider.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "coarsehom/errors.hpp"
#include "coarsehom/maxflow.hpp"
#include "coarsehom/parallel.hpp"

namespace coarsehom {

namespace {

constexpr int kMaxIterations = 200;
constexpr double kFeasibleTolerance = 1e-9;

// Flow network for a fixed capacity. Window vertices keep their ids; all
// sinks are tied to the extra node Z, which carries the net demand.
struct Network {
  FlowNetwork net;
  int z, s, t;
  double supply = 0.0;  // total source capacity P
  std::vector<std::pair<std::pair<VertexId, VertexId>, int>> pair_arcs;

  Network(const Window& w, const Chain0& demand,
          const std::vector<std::pair<VertexId, VertexId>>& pairs, double capacity)
      : net(static_cast<int>(w.size()) + 3),
        z(static_cast<int>(w.size())),
        s(z + 1),
        t(z + 2) {
    double positive = 0.0, negative = 0.0;
    for (auto [v, c] : demand.coeffs) {
      if (c > 0.0) {
        net.add_arc(s, v, c);
        positive += c;
      } else if (c < 0.0) {
        net.add_arc(v, t, -c);
        negative -= c;
      }
    }
    const double net_demand = positive - negative;
    supply = positive + std::max(0.0, -net_demand);
    if (net_demand > 0.0) net.add_arc(z, t, net_demand);
    if (net_demand < 0.0) net.add_arc(s, z, -net_demand);
    const double unbounded = 4.0 * supply + 1.0;
    for (VertexId v : w.sink_vertices()) net.add_arc(v, z, unbounded, unbounded);
    for (auto [x, y] : pairs) {
      if (w.is_sink(x) && w.is_sink(y)) continue;
      pair_arcs.push_back({{x, y}, net.add_arc(x, y, capacity, capacity)});
    }
  }

  bool feasible(double flow) const {
    return flow >= supply - kFeasibleTolerance * std::max(1.0, supply);
  }

  Chain1 flow_chain(const std::string& window, int reach) const {
    Chain1 b{window, reach, {}};
    const double dust = 1e-14 * std::max(1.0, supply);
    for (const auto& [pair, arc] : pair_arcs) {
      const double f = net.flow(arc);
      if (std::abs(f) > dust) b.add(pair.first, pair.second, f);
    }
    return b;
  }

  // Region read off the minimal source side of a minimum cut.
  Region cut_region(const Window& w) const {
    const std::vector<char> side = net.source_side(s);
    std::vector<VertexId> ids;
    const bool flip = side[z] != 0;
    for (VertexId v : w.interior_vertices()) {
      if ((side[v] != 0) != flip) ids.push_back(v);
    }
    return Region(std::move(ids));
  }
};

const Window& window_of(const FlowProblem& p) {
  if (!p.window) throw ConfigError("flow problem has no window", "window");
  return *p.window;
}

double total_demand(const Chain0& c) {
  double sum = 0.0;
  for (auto [v, x] : c.coeffs) sum += x;
  return sum;
}

void require_escape(const Window& w, const Chain0& demand) {
  if (w.sink_vertices().empty() && std::abs(total_demand(demand)) > 1e-12) {
    throw ConfigError("demand has nonzero total but the window has no sink vertices",
                      "window");
  }
}

double ratio(double sum, long cut) {
  if (cut <= 0) return std::numeric_limits<double>::infinity();
  return std::abs(sum) / static_cast<double>(cut);
}

bool near_enough(const Window& w, VertexId x, VertexId y, int reach) {
  if (x == y) return false;
  const auto near = w.within(x, reach);
  return std::find(near.begin(), near.end(), y) != near.end();
}

}  // namespace

void FlowProblem::validate() const {
  const Window& w = window_of(*this);
  if (reach < 1) throw ConfigError("reach must be >= 1", "reach");
  coarsehom::validate(demand, w);
  if (capacity && !(*capacity > 0.0 && std::isfinite(*capacity))) {
    throw ConfigError("capacity must be a positive finite number", "capacity");
  }
}

long cut_size(const Window& w, const Region& region, int reach) {
  long cut = 0;
  for (VertexId x : region) {
    for (VertexId y : w.within(x, reach)) {
      if (y != x && !region.contains(y)) ++cut;
    }
  }
  return cut;
}

CapacityResult min_capacity(const FlowProblem& problem) {
  problem.validate();
  const Window& w = *problem.window;
  CapacityResult result;
  result.flow = Chain1{w.id(), problem.reach, {}};
  if (problem.demand.is_zero()) return result;
  require_escape(w, problem.demand);

  const auto pairs = reach_pairs(w, problem.reach);

  // Start from the best single vertex; each infeasible solve yields a region
  // with a strictly larger ratio, so the iteration climbs to the optimum.
  double c = 0.0;
  Region best;
  double best_sum = 0.0;
  long best_cut = 0;
  for (auto [v, x] : problem.demand.coeffs) {
    const Region single({v});
    const long cut = cut_size(w, single, problem.reach);
    const double r = ratio(x, cut);
    if (r > c) {
      c = r;
      best = single;
      best_sum = x;
      best_cut = cut;
    }
  }

  double upper = 0.0;
  for (auto [v, x] : problem.demand.coeffs) upper += std::abs(x);

  for (int it = 1; it <= kMaxIterations; ++it) {
    Network n(w, problem.demand, pairs, c);
    const double f = n.net.max_flow(n.s, n.t);
    if (n.feasible(f)) {
      result.c_star = c;
      result.flow = n.flow_chain(w.id(), problem.reach);
      result.argmax = best;
      result.argmax_sum = best_sum;
      result.argmax_cut = best_cut;
      result.iterations = it;
      return result;
    }
    Region region = n.cut_region(w);
    const double sum = window_sum(problem.demand, region);
    const long cut = cut_size(w, region, problem.reach);
    const double r = ratio(sum, cut);
    if (!(r > c) || !std::isfinite(r)) {
      throw NumericalError("parametric max-flow stalled: cut region does not improve the ratio",
                           c, upper);
    }
    c = r;
    best = std::move(region);
    best_sum = sum;
    best_cut = cut;
  }
  throw NumericalError("parametric max-flow did not converge within " +
                           std::to_string(kMaxIterations) + " iterations",
                       c, upper);
}

FeasibilityResult solve_feasibility(const FlowProblem& problem, double capacity) {
  problem.validate();
  if (!(capacity > 0.0) || !std::isfinite(capacity)) {
    throw ConfigError("capacity must be a positive finite number", "capacity");
  }
  const Window& w = *problem.window;
  require_escape(w, problem.demand);
  const auto pairs = reach_pairs(w, problem.reach);

  FeasibilityResult result;
  Network n(w, problem.demand, pairs, capacity);
  const double f = n.net.max_flow(n.s, n.t);
  if (n.feasible(f)) {
    result.flow = n.flow_chain(w.id(), problem.reach);
    result.certificate = extract_tails(result.flow, problem.demand, w);
    Network tighter(w, problem.demand, pairs, capacity * (1.0 - 1e-9));
    result.boundary_case = !tighter.feasible(tighter.net.max_flow(tighter.s, tighter.t));
    return result;
  }

  Obstruction ob;
  ob.region = n.cut_region(w);
  ob.region_sum = window_sum(problem.demand, ob.region);
  ob.cut = cut_size(w, ob.region, problem.reach);
  ob.capacity = capacity;
  ob.violation = std::abs(ob.region_sum) - capacity * static_cast<double>(ob.cut);
  if (!(ob.violation > 0.0)) {
    throw NumericalError("max-flow reported infeasibility but the cut region is not violated",
                         0.0, capacity);
  }
  const double sign = ob.region_sum >= 0.0 ? 1.0 : -1.0;
  for (VertexId v : ob.region) ob.potential[v] = sign;
  result.flow = Chain1{w.id(), problem.reach, {}};
  result.certificate = std::move(ob);
  return result;
}

TailSet extract_tails(const Chain1& flow, const Chain0& demand, const Window& w,
                      double tolerance) {
  double scale = 1.0;
  for (auto [v, x] : demand.coeffs) scale = std::max(scale, std::abs(x));
  for (const auto& [pair, x] : flow.coeffs) scale = std::max(scale, std::abs(x));

  const BoundaryResult bd = boundary(flow, w);
  for (VertexId v : w.interior_vertices()) {
    const double mismatch = bd.interior.at(v) + demand.at(v);
    if (std::abs(mismatch) > tolerance * scale) {
      throw NumericalError("flow boundary differs from -demand at vertex " + std::to_string(v),
                           -std::abs(mismatch), std::abs(mismatch));
    }
  }

  struct Arc {
    VertexId to;
    double amount;
  };
  const std::size_t nv = w.size();
  std::vector<std::vector<Arc>> out(nv);
  std::vector<double> excess(nv, 0.0);
  for (const auto& [pair, x] : flow.coeffs) {
    auto [a, b] = pair;
    if (x < 0.0) std::swap(a, b);
    out[a].push_back({b, std::abs(x)});
    excess[a] += std::abs(x);
    excess[b] -= std::abs(x);
  }
  for (auto& arcs : out) {
    std::sort(arcs.begin(), arcs.end(), [](const Arc& p, const Arc& q) { return p.to < q.to; });
  }

  const double dust = 1e-12 * scale;
  std::vector<std::size_t> cursor(nv, 0);
  auto next_arc = [&](VertexId v) -> Arc* {
    auto& arcs = out[v];
    while (cursor[v] < arcs.size() && arcs[cursor[v]].amount <= dust) ++cursor[v];
    return cursor[v] < arcs.size() ? &arcs[cursor[v]] : nullptr;
  };

  TailSet result;
  for (VertexId s = 0; s < static_cast<VertexId>(nv); ++s) {
    while (excess[s] > dust) {
      std::vector<VertexId> path{s};
      std::vector<Arc*> used;
      std::vector<int> position(nv, -1);
      position[s] = 0;
      bool delivered = false;
      while (true) {
        const VertexId v = path.back();
        if (v != s && excess[v] < -dust) {
          delivered = true;
          break;
        }
        Arc* arc = next_arc(v);
        if (!arc) {
          if (used.empty()) break;  // only rounding dust remains at s
          used.back()->amount = 0.0;  // dead end: the arc carried only dust
          position[v] = -1;
          path.pop_back();
          used.pop_back();
          continue;
        }
        const VertexId u = arc->to;
        if (position[u] >= 0) {
          // Cancel the cycle closed by this arc and resume from u.
          double amount = arc->amount;
          for (std::size_t i = position[u]; i < used.size(); ++i) {
            amount = std::min(amount, used[i]->amount);
          }
          arc->amount -= amount;
          for (std::size_t i = position[u]; i < used.size(); ++i) used[i]->amount -= amount;
          for (std::size_t i = position[u] + 1; i < path.size(); ++i) position[path[i]] = -1;
          path.resize(position[u] + 1);
          used.resize(position[u]);
          result.residual_discarded = true;
          continue;
        }
        position[u] = static_cast<int>(path.size());
        path.push_back(u);
        used.push_back(arc);
      }
      if (!delivered) {
        excess[s] = 0.0;
        break;
      }
      const VertexId e = path.back();
      double weight = std::min(excess[s], -excess[e]);
      for (Arc* a : used) weight = std::min(weight, a->amount);
      for (Arc* a : used) a->amount -= weight;
      excess[s] -= weight;
      excess[e] += weight;
      if (w.is_sink(s) && w.is_sink(e)) {
        result.residual_discarded = true;
      } else if (weight > dust) {
        result.tails.push_back({std::move(path), weight});
      }
    }
  }
  for (const auto& arcs : out) {
    for (const Arc& a : arcs) {
      if (a.amount > dust) result.residual_discarded = true;
    }
  }
  return result;
}

Check verify_tails(const TailSet& tails, const FlowProblem& problem, double capacity) {
  const Window& w = window_of(problem);
  auto fail = [](std::string why) { return Check{false, std::move(why)}; };
  Chain1 sum{w.id(), problem.reach, {}};
  for (std::size_t i = 0; i < tails.tails.size(); ++i) {
    const Tail& t = tails.tails[i];
    const std::string tag = "tail " + std::to_string(i) + ": ";
    if (t.path.size() < 2) return fail(tag + "path has fewer than two vertices");
    if (!(t.weight > 0.0) || !std::isfinite(t.weight)) return fail(tag + "weight is not positive");
    for (VertexId v : t.path) {
      if (v < 0 || v >= static_cast<VertexId>(w.size())) return fail(tag + "unknown vertex");
    }
    const VertexId first = t.path.front();
    const VertexId last = t.path.back();
    if (w.is_interior(first) && !(problem.demand.at(first) > 0.0)) {
      return fail(tag + "starts outside the positive support of the demand");
    }
    if (w.is_sink(first) && !(w.is_interior(last) && problem.demand.at(last) < 0.0)) {
      return fail(tag + "starts at a sink but does not end at a negative demand");
    }
    if (w.is_interior(last) && !(problem.demand.at(last) < 0.0)) {
      return fail(tag + "ends at an interior vertex without negative demand");
    }
    for (std::size_t k = 0; k + 1 < t.path.size(); ++k) {
      if (!near_enough(w, t.path[k], t.path[k + 1], problem.reach)) {
        return fail(tag + "consecutive vertices farther apart than reach");
      }
      sum.add(t.path[k], t.path[k + 1], t.weight);
    }
  }
  double scale = 1.0;
  for (auto [v, x] : problem.demand.coeffs) scale += std::abs(x);
  const double tol = kFeasibleTolerance * scale;
  for (const auto& [pair, x] : sum.coeffs) {
    if (std::abs(x) > capacity * (1.0 + 1e-9) + tol) {
      return fail("load " + std::to_string(std::abs(x)) + " on (" + std::to_string(pair.first) +
                  "," + std::to_string(pair.second) + ") exceeds capacity");
    }
  }
  const BoundaryResult bd = boundary(sum, w);
  for (VertexId v : w.interior_vertices()) {
    if (std::abs(bd.interior.at(v) + problem.demand.at(v)) > tol) {
      return fail("superposed tails do not carry the demand away at vertex " +
                  std::to_string(v));
    }
  }
  return {};
}

Check verify_obstruction(const Obstruction& ob, const FlowProblem& problem) {
  const Window& w = window_of(problem);
  auto fail = [](std::string why) { return Check{false, std::move(why)}; };
  if (ob.region.empty()) return fail("region is empty");
  for (VertexId v : ob.region) {
    if (v < 0 || v >= static_cast<VertexId>(w.size())) return fail("unknown vertex in region");
    if (!w.is_interior(v)) return fail("region contains a sink vertex");
  }
  const double sum = window_sum(problem.demand, ob.region);
  const long cut = cut_size(w, ob.region, problem.reach);
  const double tol = 1e-9 * std::max(1.0, std::abs(sum));
  if (std::abs(sum - ob.region_sum) > tol) return fail("region sum does not match the demand");
  if (cut != ob.cut) return fail("cut size does not match the window");
  if (!(std::abs(sum) > ob.capacity * static_cast<double>(cut))) {
    return fail("region demand fits through its cut");
  }

  auto u = [&](VertexId v) {
    auto it = ob.potential.find(v);
    return it == ob.potential.end() ? 0.0 : it->second;
  };
  for (auto [v, x] : ob.potential) {
    if (v < 0 || v >= static_cast<VertexId>(w.size())) return fail("unknown vertex in potential");
    if (!std::isfinite(x)) return fail("potential is not finite");
    if (w.is_sink(v) && x != 0.0) return fail("potential is nonzero on a sink");
  }
  double pairing = 0.0;
  for (auto [v, x] : problem.demand.coeffs) pairing += x * u(v);
  double variation = 0.0;
  for (auto [x, y] : reach_pairs(w, problem.reach)) {
    const double du = std::abs(u(x) - u(y));
    if (du > 1.0 + 1e-12) return fail("potential jumps by more than 1 across a reach pair");
    variation += du;
  }
  if (!(pairing > ob.capacity * variation)) {
    return fail("potential does not separate the demand from the capacity");
  }
  return {};
}

// ------------------------------------------------------------ demand rules

DemandFamily DemandFamily::parse(const std::string& text) {
  if (text == "all-ones") return {DemandRule::AllOnes, 1};
  if (text == "alternating") return {DemandRule::Alternating, 1};
  if (text == "origin") return {DemandRule::Origin, 1};
  const std::string prefix = "sublattice:";
  if (text.rfind(prefix, 0) == 0) {
    const std::string rest = text.substr(prefix.size());
    std::size_t used = 0;
    int k = 0;
    try {
      k = std::stoi(rest, &used);
    } catch (...) {
      used = 0;
    }
    if (used == 0 || used != rest.size() || k < 1) {
      throw ConfigError("sublattice index must be a positive integer", "demand");
    }
    return {DemandRule::Sublattice, k};
  }
  throw ConfigError("unknown demand family '" + text +
                        "' (expected all-ones, alternating, sublattice:K or origin)",
                    "demand");
}

std::string DemandFamily::name() const {
  switch (rule) {
    case DemandRule::AllOnes: return "all-ones";
    case DemandRule::Alternating: return "alternating";
    case DemandRule::Origin: return "origin";
    case DemandRule::Sublattice: return "sublattice:" + std::to_string(stride);
  }
  return "all-ones";
}

Chain0 make_demand(const DemandFamily& family, const Window& w, bool lattice_coordinates) {
  Chain0 c{w.id(), {}};
  const std::vector<int> depth = w.distances_from(w.basepoint());
  for (VertexId v : w.interior_vertices()) {
    const Label& label = w.label(v);
    switch (family.rule) {
      case DemandRule::AllOnes:
        c.add(v, 1.0);
        break;
      case DemandRule::Alternating: {
        int parity = depth[v];
        if (lattice_coordinates) {
          parity = 0;
          for (int x : label) parity += x;
        }
        c.add(v, parity % 2 == 0 ? 1.0 : -1.0);
        break;
      }
      case DemandRule::Sublattice: {
        bool on = depth[v] % family.stride == 0;
        if (lattice_coordinates) {
          on = std::all_of(label.begin(), label.end(),
                           [&](int x) { return x % family.stride == 0; });
        }
        if (on) c.add(v, 1.0);
        break;
      }
      case DemandRule::Origin:
        if (v == w.basepoint()) c.add(v, 1.0);
        break;
    }
  }
  return c;
}

// ------------------------------------------------------------ verdicts

Verdict decide(const SpaceSpec& spec, const DemandFamily& family, int reach,
               std::vector<int> sizes, const DecideOptions& options) {
  spec.validate();
  if (reach < 1) throw ConfigError("reach must be >= 1", "reach");
  std::sort(sizes.begin(), sizes.end());
  sizes.erase(std::unique(sizes.begin(), sizes.end()), sizes.end());
  if (sizes.size() < 2) throw ConfigError("decide needs at least two distinct sizes", "sizes");
  if (sizes.front() < 1) throw ConfigError("window sizes must be >= 1", "sizes");
  if (family.rule == DemandRule::Sublattice && family.stride < 1) {
    throw ConfigError("sublattice index must be a positive integer", "demand");
  }

  struct Solved {
    SizeResult row;
    std::shared_ptr<const Window> window;
    FlowProblem problem;
  };
  auto solved = parallel_map(sizes.size(), [&](std::size_t i) {
    auto w = std::make_shared<const Window>(build_window(spec, sizes[i], options.window));
    FlowProblem p{w, make_demand(family, *w, spec.is_lattice()), reach, std::nullopt};
    const CapacityResult r = min_capacity(p);
    SizeResult row;
    row.size = sizes[i];
    row.c_star = r.c_star;
    row.vertices = w->size();
    row.interior = w->interior_vertices().size();
    std::size_t twice_pairs = 0;
    for (std::size_t v = 0; v < w->size(); ++v) {
      twice_pairs += w->within(static_cast<VertexId>(v), reach).size() - 1;
    }
    row.reach_pairs = twice_pairs / 2;
    row.argmax_size = r.argmax.size();
    row.argmax_sum = r.argmax_sum;
    row.argmax_cut = r.argmax_cut;
    row.iterations = r.iterations;
    row.cut_to_collar_factor = reach_degree(*w, reach);
    return Solved{row, w, std::move(p)};
  });

  Verdict v;
  v.space = spec.describe();
  v.demand = family.name();
  v.reach = reach;
  v.thresholds = options.thresholds;
  std::vector<double> xs, ys;
  for (const auto& s : solved) {
    v.per_size.push_back(s.row);
    v.c_sup = std::max(v.c_sup, s.row.c_star);
    xs.push_back(s.row.size);
    ys.push_back(s.row.c_star);
  }
  for (std::size_t i = 1; i < ys.size(); ++i) {
    if (ys[i] < ys[i - 1] * (1.0 - 1e-6) - 1e-12) v.monotone = false;
  }
  const bool positive = std::all_of(ys.begin(), ys.end(), [](double y) { return y > 0.0; });
  if (sizes.size() >= 4 && positive) v.growth_fit = fit_log_log(xs, ys);

  const auto& th = options.thresholds;
  const std::size_t half = sizes.size() / 2;
  const auto [lo, hi] = std::minmax_element(ys.begin() + half, ys.end());
  const bool stable = *hi - *lo <= th.sup_stability * *hi;

  if (!v.monotone) {
    v.kind = VerdictKind::Undetermined;
  } else if (v.growth_fit && v.growth_fit->slope > th.min_slope &&
             v.growth_fit->r_squared >= th.min_r_squared) {
    v.kind = VerdictKind::Obstructed;
    const Solved& largest = solved.back();
    const double capacity = std::min(ys.front(), ys.back() * (1.0 - 1e-6));
    const FeasibilityResult fr = solve_feasibility(largest.problem, capacity);
    if (const auto* ob = std::get_if<Obstruction>(&fr.certificate)) {
      v.witness = *ob;
      v.witness_size = largest.row.size;
    }
  } else if (stable) {
    v.kind = VerdictKind::Vanishes;
  } else {
    v.kind = VerdictKind::Vanishes;
    v.low_confidence = true;
  }
  return v;
}

PscVerdict psc_verdict(const Verdict& decision, int ahat) {
  if (ahat == 0) return PscVerdict::AdmitsUPSC_by_surgery;
  if (decision.kind == VerdictKind::Undetermined || decision.low_confidence) {
    return PscVerdict::Undetermined;
  }
  if (!DemandFamily::parse(decision.demand).is_point_set()) {
    throw ConfigError("scalar-curvature verdict needs a point-set demand (0/1 coefficients), got '" +
                          decision.demand + "'",
                      "demand");
  }
  return decision.kind == VerdictKind::Vanishes ? PscVerdict::AdmitsUPSC
                                                : PscVerdict::NoNonnegativeScalarCurvature;
}

std::string to_string(VerdictKind kind) {
  switch (kind) {
    case VerdictKind::Vanishes: return "Vanishes";
    case VerdictKind::Obstructed: return "Obstructed";
    case VerdictKind::Undetermined: return "Undetermined";
  }
  return "Undetermined";
}

std::string to_string(PscVerdict verdict) {
  switch (verdict) {
    case PscVerdict::AdmitsUPSC: return "AdmitsUPSC";
    case PscVerdict::NoNonnegativeScalarCurvature: return "NoNonnegativeScalarCurvature";
    case PscVerdict::AdmitsUPSC_by_surgery: return "AdmitsUPSC_by_surgery";
    case PscVerdict::Undetermined: return "Undetermined";
  }
  return "Undetermined";
}

}  // namespace coarsehom
