#include "gwd/pr.hpp"

#include <cmath>
#include <string>

#include "gwd/error.hpp"
#include "transport_lp.hpp"

namespace gwd {

PrSolution pr_distance(const DiscreteMeasure& ms, const DiscreteMeasure& md, const PrParams& params,
                       const LpOptions& lp) {
  require_same_grid(ms, md, "pr_distance");
  if (!(params.a > 0.0) || !(params.b > 0.0) || !std::isfinite(params.a) || !std::isfinite(params.b)) {
    throw InputError("pr_distance: a and b must be positive");
  }
  const std::size_t n = ms.size();
  CostMatrix cost(ms.grid(), params.p);

  detail::TransportLpBuilder builder(n);
  std::vector<bool> row_used(n, false), col_used(n, false);
  for (std::size_t j = 0; j < n; ++j) {
    if (ms[j] <= 0.0) continue;
    for (std::size_t k = 0; k < n; ++k) {
      if (md[k] <= 0.0) continue;
      double c = params.b * cost(j, k) - 2.0 * params.a;
      if (c >= 0.0) continue;
      builder.add_pair(j, k, c);
      row_used[j] = col_used[k] = true;
    }
  }
  for (std::size_t j = 0; j < n; ++j)
    if (row_used[j]) builder.add_row_constraint(j, ms[j]);
  for (std::size_t k = 0; k < n; ++k)
    if (col_used[k]) builder.add_column_constraint(k, md[k]);

  PrSolution out;
  double objective = 0.0;
  if (builder.variables() > 0) {
    LpSolution sol = solve_lp(builder.problem(ConstraintSense::less_equal), lp);
    if (sol.status != LpStatus::optimal) {
      throw NumericalError(std::string("pr_distance: LP returned ") + to_string(sol.status));
    }
    objective = sol.value;
    out.plan = builder.plan(sol.x);
  } else {
    out.plan = TransportPlan(n);
  }
  out.remaining_supply = out.plan.row_sums();
  out.remaining_demand = out.plan.column_sums();
  double total = objective + params.a * (total_mass(ms) + total_mass(md));
  // Round-off can leave a tiny negative total on identical inputs.
  total = std::max(total, 0.0);
  out.value = params.p == 1.0 ? total : std::pow(total, 1.0 / params.p);
  return out;
}

}  // namespace gwd
