#include "coarsehom/amenability.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "coarsehom/errors.hpp"
#include "coarsehom/parallel.hpp"

namespace coarsehom {

namespace {

// Window radius that holds a region of depth `extent` plus everything the
// r-collar looks at.
int padded_radius(int extent, int r) { return extent + 2 * r + 1; }

std::string label_text(const Label& label) {
  std::string s = "(";
  for (std::size_t i = 0; i < label.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(label[i]);
  }
  return s + ")";
}

// Collar bookkeeping for a region that only shrinks. For every vertex x it
// keeps the number of region and non-region vertices within distance r, so
// removing v touches ball(v, r) only.
class CollarTracker {
 public:
  CollarTracker(const Window& w, const Region& region, int r)
      : w_(w), r_(r), in_(w.size(), 0), near_in_(w.size(), 0), near_out_(w.size(), 0) {
    for (VertexId v : region) {
      in_[v] = 1;
      vol_region_ += w.volume(v);
    }
    size_ = region.size();
    for (std::size_t x = 0; x < w.size(); ++x) {
      for (VertexId y : w.within(static_cast<VertexId>(x), r)) {
        (in_[y] ? near_in_[x] : near_out_[x]) += 1;
      }
      if (in_collar(static_cast<VertexId>(x))) vol_collar_ += w.volume(static_cast<VertexId>(x));
    }
  }

  double ratio() const { return vol_collar_ / vol_region_; }
  double vol_region() const { return vol_region_; }
  double vol_collar() const { return vol_collar_; }
  std::size_t size() const { return size_; }
  bool contains(VertexId v) const { return in_[v] != 0; }
  bool in_collar(VertexId x) const { return near_in_[x] > 0 && near_out_[x] > 0; }

  /// Ratio after removing v, without changing the state.
  double ratio_without(VertexId v) const {
    double collar = vol_collar_;
    for (VertexId x : w_.within(v, r_)) {
      const bool before = in_collar(x);
      const bool after = near_in_[x] - 1 > 0;  // near_out_ becomes positive
      if (before != after) collar += after ? w_.volume(x) : -w_.volume(x);
    }
    return collar / (vol_region_ - w_.volume(v));
  }

  void remove(VertexId v) {
    for (VertexId x : w_.within(v, r_)) {
      const bool before = in_collar(x);
      near_in_[x] -= 1;
      near_out_[x] += 1;
      const bool after = in_collar(x);
      if (before != after) vol_collar_ += after ? w_.volume(x) : -w_.volume(x);
    }
    in_[v] = 0;
    vol_region_ -= w_.volume(v);
    --size_;
  }

  Region region() const {
    std::vector<VertexId> ids;
    for (std::size_t v = 0; v < in_.size(); ++v) {
      if (in_[v]) ids.push_back(static_cast<VertexId>(v));
    }
    return Region(std::move(ids));
  }

 private:
  const Window& w_;
  int r_;
  std::vector<char> in_;
  std::vector<int> near_in_;
  std::vector<int> near_out_;
  double vol_region_ = 0.0;
  double vol_collar_ = 0.0;
  std::size_t size_ = 0;
};

Region lattice_box(const Window& w, int radius) {
  std::vector<VertexId> ids;
  for (std::size_t v = 0; v < w.size(); ++v) {
    const Label& x = w.label(static_cast<VertexId>(v));
    if (std::all_of(x.begin(), x.end(), [&](int c) { return std::abs(c) <= radius; })) {
      ids.push_back(static_cast<VertexId>(v));
    }
  }
  return Region(std::move(ids));
}

}  // namespace

RegionFamily parse_region_family(const std::string& text) {
  if (text == "balls") return RegionFamily::Balls;
  if (text == "boxes") return RegionFamily::Boxes;
  if (text == "custom") return RegionFamily::Custom;
  throw ConfigError("unknown region family '" + text + "' (expected balls, boxes or custom)",
                    "family");
}

std::string to_string(RegionFamily family) {
  switch (family) {
    case RegionFamily::Balls: return "balls";
    case RegionFamily::Boxes: return "boxes";
    case RegionFamily::Custom: return "custom";
  }
  return "balls";
}

std::string to_string(FoelnerKind kind) {
  return kind == FoelnerKind::RegularSequenceFound ? "RegularSequenceFound" : "NoSequenceBelow";
}

ProfileSample evaluate_region(const Window& w, const Region& region, int r,
                              std::string region_id) {
  ProfileSample s;
  s.region_id = std::move(region_id);
  const Region collar = r_boundary(w, region, r);
  s.vertices = region.size();
  s.vol_region = w.volume(region);
  s.vol_collar = w.volume(collar);
  if (!(s.vol_region > 0.0)) throw ConfigError("region has zero volume", "region");
  s.ratio = s.vol_collar / s.vol_region;
  return s;
}

IsoperimetricProfile isoperimetric_profile(const SpaceSpec& spec, int r, RegionFamily family,
                                           const ProfileOptions& options) {
  spec.validate();
  if (r < 1) throw ConfigError("collar radius must be >= 1", "r");
  if (family == RegionFamily::Boxes && !spec.is_lattice()) {
    throw ConfigError("box regions are only defined on lattices", "family");
  }
  const std::size_t count =
      family == RegionFamily::Custom ? options.regions.size() : options.radii.size();
  if (count == 0) throw ConfigError("region family is empty", "family");
  for (int radius : options.radii) {
    if (family != RegionFamily::Custom && radius < 0) {
      throw ConfigError("region radii must be nonnegative", "radii");
    }
  }

  IsoperimetricProfile profile;
  profile.space = spec.describe();
  profile.family = family;
  profile.r = r;
  const int dimension =
      spec.is_lattice() ? std::get<LatticeFamily>(spec.family).dimension : 1;

  profile.samples = parallel_map(count, [&](std::size_t i) {
    std::string id;
    try {
      if (family == RegionFamily::Custom) {
        id = "custom[" + std::to_string(i) + "]";
        const auto& labels = options.regions[i];
        if (labels.empty()) throw ConfigError("custom region is empty", "regions");
        int extent = 0;
        for (const Label& l : labels) extent = std::max(extent, label_depth(spec, l));
        const Window w = build_window(spec, spec.is_custom() ? 0 : padded_radius(extent, r),
                                      options.window);
        std::vector<VertexId> ids;
        for (const Label& l : labels) {
          auto v = w.find(l);
          if (!v) throw ConfigError("label " + label_text(l) + " is not in the space", "regions");
          ids.push_back(*v);
        }
        return evaluate_region(w, Region(std::move(ids)), r, id);
      }
      const int radius = options.radii[i];
      if (family == RegionFamily::Boxes) {
        id = "box(" + std::to_string(radius) + ")";
        const Window w = build_window(spec, padded_radius(dimension * radius, r), options.window);
        return evaluate_region(w, lattice_box(w, radius), r, id);
      }
      id = "ball(" + std::to_string(radius) + ")";
      const Window w =
          build_window(spec, spec.is_custom() ? 0 : padded_radius(radius, r), options.window);
      return evaluate_region(w, ball(w, w.basepoint(), radius), r, id);
    } catch (const ConfigError& e) {
      ProfileSample s;
      s.region_id = id;
      s.error = e.what();
      return s;
    }
  });
  return profile;
}

FoelnerReport foelner_search(const SpaceSpec& spec, int r, double epsilon, long budget,
                             const FoelnerOptions& options) {
  spec.validate();
  if (r < 1) throw ConfigError("collar radius must be >= 1", "r");
  if (!(epsilon > 0.0 && epsilon < 1.0)) {
    throw ConfigError("epsilon must lie strictly between 0 and 1", "epsilon");
  }
  if (budget < 1) throw ConfigError("budget must be positive", "budget");

  FoelnerReport report;
  report.space = spec.describe();
  report.r = r;
  report.epsilon = epsilon;
  report.budget = budget;
  report.method = "balls";
  report.floor = std::numeric_limits<double>::infinity();

  auto record = [&](FoelnerRegion region) {
    report.floor = std::min(report.floor, region.ratio);
    if (report.regions.empty() || region.ratio < report.regions.back().ratio) {
      report.regions.push_back(std::move(region));
    }
  };
  auto done = [&] {
    return !report.regions.empty() && report.regions.back().ratio < epsilon;
  };

  // Phase 1: balls about the basepoint on doubling windows.
  std::optional<Window> window;
  int best_radius = -1;
  double best_ratio = std::numeric_limits<double>::infinity();
  int window_radius = padded_radius(4, r);
  int radius = 1;
  while (report.regions_tested < budget && !done()) {
    const bool whole = spec.is_custom();
    if (!window || (!whole && padded_radius(radius, r) > window_radius)) {
      if (window) window_radius *= 2;
      try {
        window = build_window(spec, whole ? 0 : window_radius, options.window);
      } catch (const ConfigError&) {
        break;  // vertex budget reached; continue with the last window
      }
    }
    const Region region = ball(*window, window->basepoint(), radius);
    if (region.size() == window->size()) break;  // a finite graph has been exhausted
    const ProfileSample s = evaluate_region(*window, region, r, "ball(" + std::to_string(radius) + ")");
    ++report.regions_tested;
    if (s.ratio < best_ratio) {
      best_ratio = s.ratio;
      best_radius = radius;
    }
    record({s.region_id, s.vertices, s.vol_region, s.vol_collar, s.ratio, region});
    ++radius;
  }
  if (!window) throw ConfigError("no ball fits the window vertex budget", "budget");
  report.search_window = window->id();

  // Phase 2: greedy peeling from the best ball.
  if (!done() && report.regions_tested < budget && best_radius >= 0) {
    report.method = "balls+peeling";
    CollarTracker tracker(*window, ball(*window, window->basepoint(), best_radius), r);
    int step = 0;
    while (!done() && report.regions_tested < budget && tracker.size() > 1) {
      VertexId choice = -1;
      double choice_ratio = tracker.ratio();
      for (VertexId v = 0; v < static_cast<VertexId>(window->size()); ++v) {
        if (!tracker.contains(v) || !tracker.in_collar(v)) continue;
        if (report.regions_tested >= budget) break;
        ++report.regions_tested;
        const double q = tracker.ratio_without(v);
        if (q < choice_ratio) {
          choice_ratio = q;
          choice = v;
        }
      }
      if (choice < 0) break;  // no single removal lowers the ratio
      tracker.remove(choice);
      ++step;
      record({"peel(" + std::to_string(best_radius) + "," + std::to_string(step) + ")",
              tracker.size(), tracker.vol_region(), tracker.vol_collar(), tracker.ratio(),
              tracker.region()});
    }
  }

  report.kind = done() ? FoelnerKind::RegularSequenceFound : FoelnerKind::NoSequenceBelow;
  return report;
}

EquivalenceReport cross_check_equivalence(const SpaceSpec& spec, int r, std::vector<int> sizes,
                                          double epsilon, long budget,
                                          const DecideOptions& decide_options,
                                          const FoelnerOptions& foelner_options) {
  EquivalenceReport out;
  out.foelner = foelner_search(spec, r, epsilon, budget, foelner_options);
  out.decision = decide(spec, DemandFamily{DemandRule::AllOnes, 1}, r, std::move(sizes),
                        decide_options);
  const Verdict& d = out.decision;
  if (out.foelner.kind == FoelnerKind::RegularSequenceFound) {
    out.agreement = d.kind == VerdictKind::Obstructed || d.kind == VerdictKind::Undetermined ||
                    d.low_confidence;
    out.note = out.agreement ? "amenable evidence with a non-vanishing class"
                             : "discrepancy: regular sequence found but the class vanishes";
  } else {
    out.agreement = d.kind == VerdictKind::Vanishes && !d.low_confidence;
    out.note = out.agreement ? "non-amenable evidence with a vanishing class"
                             : "discrepancy: no regular sequence below epsilon but the class "
                               "does not clearly vanish";
  }
  return out;
}

}  // namespace coarsehom
