#pragma once

#include <vector>

#include "coalsim/coalescent.hpp"
#include "coalsim/measure.hpp"
#include "coalsim/rng.hpp"

namespace coalsim {

struct CoupledAtom {
  double time;
  double x;                // atom location in (0,1]
  bool applied_to_second;  // survived thinning with probability f2(x)/f1(x)
  int lost1, lost2;        // blocks lost in each trajectory (0 = no-op)
};

// Two coalescents driven by one Poisson stream of effective atoms.
struct CoupledTrajectory {
  BlockCountPath path1, path2;
  std::vector<CoupledAtom> atoms;
  std::vector<MergeEvent> merges1, merges2;
  bool counts_ordered;          // N1 <= N2 held at every atom
  double first_thinned_time;    // first atom applied to trajectory 1 only (NaN if none)
};

// Poisson-construction coupling: atoms (t, x, marks) are drawn with the
// intensity of Lambda1-atoms producing at least two marks among the first n
// coordinates; every atom drives trajectory 1 and survives to trajectory 2
// with probability density2(x)/density1(x). Marks are shared, blocks are
// ordered by least label, and marked blocks merge when at least two are
// marked, so density2 <= density1 pointwise forces N1(t) <= N2(t) pathwise.
//
// Requires density2 <= density1 on a validation mesh; Kingman measures are
// rejected (the construction assumes Lambda({0}) = 0).
CoupledTrajectory simulate_coupled_pair(const MeasureSpec& measure1,
                                        const MeasureSpec& measure2, int n,
                                        double horizon, RngStream& rng);

}  // namespace coalsim
