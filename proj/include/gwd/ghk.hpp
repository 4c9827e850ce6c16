#pragma once

#include <cstddef>
#include <vector>

#include "gwd/grid.hpp"

namespace gwd {

struct GhkParams {
  double a = 1.0;  ///< entropy weight
  double b = 1.0;  ///< transport weight
};

/// One potential per cell; feasible when phi_j + psi_k <= |x_j - x_k|^2 for all j, k.
struct DualPotentials {
  std::vector<double> phi;
  std::vector<double> psi;
};

struct GhkOptions {
  /// Target for the certified gap between the dual value and a primal bound,
  /// relative to max(1, a (|ms| + |md|)).
  double tol = 1e-8;
  /// Newton iterations over all barrier stages.
  std::size_t budget = 5000;
};

struct GhkResult {
  /// Dual maximum a sum ms (1 - e^{-b phi/a}) + a sum md (1 - e^{-b psi/a}).
  double value = 0.0;
  DualPotentials potentials;
  /// Upper bound on (true maximum - value), from a primal plan.
  double gap = 0.0;
  bool converged = false;
  std::size_t iterations = 0;
  /// Dual objective after each barrier stage, then after the final polish.
  std::vector<double> history;

  /// Square root of the value, the form that satisfies the metric axioms.
  double metric() const;
};

/// Dual objective for arbitrary potentials (no feasibility check).
double ghk_objective(const DiscreteMeasure& ms, const DiscreteMeasure& md, const GhkParams& params,
                     const DualPotentials& z);

/// Largest violation max(phi_j + psi_k - c_jk, 0) over all cell pairs.
double ghk_infeasibility(const Grid1D& grid, const DualPotentials& z);

GhkResult ghk_value(const DiscreteMeasure& ms, const DiscreteMeasure& md, const GhkParams& params = {},
                    const GhkOptions& options = {});

DualPotentials ghk_solve_dual(const DiscreteMeasure& ms, const DiscreteMeasure& md, const GhkParams& params = {},
                              const GhkOptions& options = {});

}  // namespace gwd
