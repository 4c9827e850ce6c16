#pragma once

#include <vector>

#include "gwd/grid.hpp"
#include "gwd/lp.hpp"
#include "gwd/wasserstein.hpp"

namespace gwd {

struct PrParams {
  double a = 1.0;  ///< price per unit of created or destroyed mass
  double b = 1.0;  ///< weight of the transport cost
  double p = 1.0;
};

struct PrSolution {
  double value = 0.0;
  TransportPlan plan;
  std::vector<double> remaining_supply;  ///< row sums of the plan
  std::vector<double> remaining_demand;  ///< column sums of the plan
};

/// Transport with creation/destruction. Solves
///   min sum (b c_jk - 2a) gamma_jk  s.t. row sums <= ms, column sums <= md,
/// and returns (optimum + a (|ms| + |md|))^(1/p). Pairs with b c_jk >= 2a are
/// never used at an optimum and are left out of the LP.
PrSolution pr_distance(const DiscreteMeasure& ms, const DiscreteMeasure& md, const PrParams& params = {},
                       const LpOptions& lp = {});

}  // namespace gwd
