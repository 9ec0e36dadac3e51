#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "coarsehom/chains.hpp"
#include "coarsehom/space.hpp"
#include "coarsehom/stats.hpp"

namespace coarsehom {

// Flow convention used throughout: a flow b routes the demand c away when
// boundary(b) = -c on the interior, i.e. out - in = c(x) at every interior
// vertex. Sinks absorb or emit any amount.

/// Demand c, reach r (longest simplex of the 1-chain) and either a fixed
/// uniform capacity C per reach pair or nullopt to minimise C.
struct FlowProblem {
  std::shared_ptr<const Window> window;
  Chain0 demand;
  int reach = 1;
  std::optional<double> capacity;

  /// Throws ConfigError if the demand leaves the interior or reach < 1.
  void validate() const;
};

struct Tail {
  std::vector<VertexId> path;  // consecutive vertices at distance <= reach
  double weight = 0.0;
};

/// Primal certificate: weighted paths carrying the demand out of the window.
struct TailSet {
  std::vector<Tail> tails;
  /// Set when circulations (or sink-to-sink transits) were dropped during
  /// decomposition; they do not change the interior boundary.
  bool residual_discarded = false;
};

/// Dual certificate: a region whose demand excess cannot pass its cut, and
/// the bounded potential (+-1 on the region, 0 elsewhere) witnessing it.
struct Obstruction {
  Region region;
  std::map<VertexId, double> potential;
  double region_sum = 0.0;  // sum of the demand over the region
  long cut = 0;             // reach pairs leaving the region
  double capacity = 0.0;
  double violation = 0.0;   // |region_sum| - capacity * cut  (> 0)
};

struct CapacityResult {
  double c_star = 0.0;
  Chain1 flow;      // feasible at c_star
  Region argmax;    // region with |sum| / cut == c_star
  double argmax_sum = 0.0;
  long argmax_cut = 0;
  int iterations = 0;
};

struct FeasibilityResult {
  std::variant<TailSet, Obstruction> certificate;
  Chain1 flow;                // populated when feasible
  bool boundary_case = false; // capacity equals the optimum within 1e-9

  bool feasible() const { return std::holds_alternative<TailSet>(certificate); }
};

/// Least uniform capacity routing the demand to the sinks, found by
/// parametric max-flow (Newton / Dinkelbach iteration on the cut ratio).
CapacityResult min_capacity(const FlowProblem& problem);

/// Feasibility at a fixed capacity; returns tails or an obstruction.
FeasibilityResult solve_feasibility(const FlowProblem& problem, double capacity);

/// Path/cycle decomposition of a flow whose boundary is -demand on the
/// interior. Throws NumericalError when the boundary does not match.
TailSet extract_tails(const Chain1& flow, const Chain0& demand, const Window& w,
                      double tolerance = 1e-9);

/// Number of reach pairs (x, y) with x in R, y outside R.
long cut_size(const Window& w, const Region& region, int reach);

struct Check {
  bool ok = true;
  std::string reason;
  explicit operator bool() const { return ok; }
};

/// Re-verifies a certificate from raw window data, independent of the
/// solver that produced it.
Check verify_tails(const TailSet& tails, const FlowProblem& problem, double capacity);
Check verify_obstruction(const Obstruction& obstruction, const FlowProblem& problem);

// ------------------------------------------------------------ demand rules

enum class DemandRule { AllOnes, Alternating, Sublattice, Origin };

struct DemandFamily {
  DemandRule rule = DemandRule::AllOnes;
  int stride = 1;  // sublattice index

  /// "all-ones", "alternating", "sublattice:K", "origin".
  static DemandFamily parse(const std::string& text);
  std::string name() const;
  /// True when every coefficient is 0 or 1, i.e. the chain of a point set.
  bool is_point_set() const { return rule != DemandRule::Alternating; }
};

/// Deterministic Chain0 on the interior of `w`. With `lattice_coordinates`
/// the sublattice rule tests every coordinate of the label; otherwise it
/// tests the distance from the basepoint.
Chain0 make_demand(const DemandFamily& family, const Window& w,
                   bool lattice_coordinates = false);

// ------------------------------------------------------------ verdicts

struct GrowthThresholds {
  double min_slope = 0.5;
  double min_r_squared = 0.9;
  double sup_stability = 0.10;
};

struct SizeResult {
  int size = 0;
  double c_star = 0.0;
  std::size_t vertices = 0;
  std::size_t interior = 0;
  std::size_t reach_pairs = 0;
  std::size_t argmax_size = 0;
  double argmax_sum = 0.0;
  long argmax_cut = 0;
  int iterations = 0;
  int cut_to_collar_factor = 0;  // see reach_degree()
};

enum class VerdictKind { Vanishes, Obstructed, Undetermined };

struct Verdict {
  VerdictKind kind = VerdictKind::Undetermined;
  bool low_confidence = false;
  std::string space;
  std::string demand;
  int reach = 1;
  std::vector<SizeResult> per_size;
  double c_sup = 0.0;
  bool monotone = true;
  std::optional<LinearFit> growth_fit;  // log C* vs log size, >= 4 sizes
  std::optional<Obstruction> witness;   // Obstructed only, on the largest window
  int witness_size = 0;
  GrowthThresholds thresholds;
};

struct DecideOptions {
  GrowthThresholds thresholds;
  WindowOptions window;
};

Verdict decide(const SpaceSpec& spec, const DemandFamily& family, int reach,
               std::vector<int> sizes, const DecideOptions& options = {});

enum class PscVerdict {
  AdmitsUPSC,
  NoNonnegativeScalarCurvature,
  AdmitsUPSC_by_surgery,
  Undetermined
};

/// Scalar-curvature verdict for the infinite connected sum M #_S N, given
/// the decision on [S] and the integer A-hat genus of N.
PscVerdict psc_verdict(const Verdict& decision, int ahat);

std::string to_string(VerdictKind kind);
std::string to_string(PscVerdict verdict);

}  // namespace coarsehom
