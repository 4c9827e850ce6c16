#pragma once

#include "gwd/grid.hpp"
#include "gwd/lp.hpp"
#include "gwd/wasserstein.hpp"

namespace gwd {

/// Mass exchanged with the two boundary reservoirs (first and last cell).
struct BoundaryMasses {
  double from_left = 0.0;   ///< created at the left boundary and shipped inside
  double from_right = 0.0;  ///< created at the right boundary and shipped inside
  double to_left = 0.0;     ///< shipped from inside into the left boundary
  double to_right = 0.0;    ///< shipped from inside into the right boundary

  double imported() const { return from_left + from_right; }
  double exported() const { return to_left + to_right; }
};

struct FgSolution {
  double value = 0.0;
  TransportPlan plan;
  BoundaryMasses boundary;
};

/// Unit prices for creating mass at (from_*) or destroying it into (to_*)
/// each boundary, charged on top of the transport cost.
struct CreationCosts {
  double from_left = 0.0;
  double from_right = 0.0;
  double to_left = 0.0;
  double to_right = 0.0;
};

/// Boundary-reservoir distance. Both measures must have empty first and last
/// cells; those cells act as unlimited sources and sinks. The reported value
/// is (optimal cost)^(1/p).
FgSolution fg_distance(const DiscreteMeasure& ms, const DiscreteMeasure& md, double p = 1.0,
                       const LpOptions& lp = {});

/// Same distance written as a balanced transport problem with explicit
/// boundary creation/destruction unknowns. Boundary-to-boundary shipments are
/// priced at 1e6 x the largest finite cost; an optimum that uses one is
/// reported as a NumericalError.
FgSolution fg_distance_extended(const DiscreteMeasure& ms, const DiscreteMeasure& md, double p,
                                const CreationCosts& creation, const LpOptions& lp = {});

/// sum of interior supply minus interior demand.
double interior_unbalance(const DiscreteMeasure& ms, const DiscreteMeasure& md);

}  // namespace gwd
