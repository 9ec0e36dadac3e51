#pragma once

#include <string>
#include <vector>

#include "coarsehom/decider.hpp"
#include "coarsehom/space.hpp"

namespace coarsehom {

enum class RegionFamily { Balls, Boxes, Custom };

RegionFamily parse_region_family(const std::string& text);
std::string to_string(RegionFamily family);

/// One region of a profile. `error` is set (and the numbers left at 0) when
/// the region could not be evaluated, e.g. because its window was too big.
struct ProfileSample {
  std::string region_id;
  std::size_t vertices = 0;
  double vol_region = 0.0;
  double vol_collar = 0.0;
  double ratio = 0.0;
  std::string error;

  bool ok() const { return error.empty(); }
};

struct IsoperimetricProfile {
  std::string space;
  RegionFamily family = RegionFamily::Balls;
  int r = 1;
  std::vector<ProfileSample> samples;
};

struct ProfileOptions {
  /// Ball or box radii about the basepoint (Balls, Boxes).
  std::vector<int> radii;
  /// Explicit regions as lists of labels (Custom).
  std::vector<std::vector<Label>> regions;
  WindowOptions window;
};

/// Exact collar-to-volume ratios for a family of regions. Each region is
/// evaluated on a window that contains it together with its r-collar and
/// the complement points that define the collar.
IsoperimetricProfile isoperimetric_profile(const SpaceSpec& spec, int r, RegionFamily family,
                                           const ProfileOptions& options);

/// Collar volume and ratio of an explicit region of a window.
ProfileSample evaluate_region(const Window& w, const Region& region, int r,
                              std::string region_id);

struct FoelnerRegion {
  std::string region_id;
  std::size_t vertices = 0;
  double vol_region = 0.0;
  double vol_collar = 0.0;
  double ratio = 0.0;
  Region region;  // ids in the search window (empty for cleared reports)
};

enum class FoelnerKind { RegularSequenceFound, NoSequenceBelow };

/// Outcome of a finite search. NoSequenceBelow is evidence of
/// non-amenability only, never a proof.
struct FoelnerReport {
  FoelnerKind kind = FoelnerKind::NoSequenceBelow;
  std::string space;
  int r = 1;
  double epsilon = 0.0;
  long budget = 0;
  std::string method;
  /// Running-minimum sequence: ratios strictly decrease.
  std::vector<FoelnerRegion> regions;
  double floor = 0.0;  // smallest ratio reached
  long regions_tested = 0;
  std::string search_window;  // id of the window used for the final phase
};

struct FoelnerOptions {
  WindowOptions window;
};

/// Metric balls about the basepoint first (windows doubled as needed), then
/// greedy peeling from the best ball: repeatedly remove the region vertex in
/// the collar whose removal lowers the ratio most (ties by smallest id).
/// Every region evaluation counts against `budget`.
FoelnerReport foelner_search(const SpaceSpec& spec, int r, double epsilon, long budget,
                             const FoelnerOptions& options = {});

struct EquivalenceReport {
  FoelnerReport foelner;
  Verdict decision;
  bool agreement = false;
  std::string note;
};

/// Runs foelner_search and decide(all-ones, reach = r) and checks that the
/// two agree: an amenable witness goes with an obstructed (or undecided)
/// class, a floor above epsilon with a vanishing one.
EquivalenceReport cross_check_equivalence(const SpaceSpec& spec, int r, std::vector<int> sizes,
                                          double epsilon, long budget,
                                          const DecideOptions& decide_options = {},
                                          const FoelnerOptions& foelner_options = {});

std::string to_string(FoelnerKind kind);

}  // namespace coarsehom
