#pragma once

#include "coarsehom/chains.hpp"
#include "coarsehom/space.hpp"

namespace coarsehom {

struct OracleResult {
  double c_star = 0.0;
  Region argmax;
};

/// Exhaustive reference for the least routing capacity: the maximum of
/// |sum_R c| / cut_r(R) over all nonempty interior subsets R. Distances come
/// from Floyd-Warshall on the edge list, so nothing is shared with the flow
/// solver. Limited to 20 interior vertices.
OracleResult brute_force_capacity(const Window& w, const Chain0& demand, int reach);

}  // namespace coarsehom
