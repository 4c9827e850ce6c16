#include "gwd/fg.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "gwd/error.hpp"
#include "transport_lp.hpp"

namespace gwd {
namespace {

struct Supports {
  std::vector<std::size_t> rows;  // boundary cells plus interior supply support
  std::vector<std::size_t> cols;  // boundary cells plus interior demand support
  std::vector<std::size_t> interior_rows;
  std::vector<std::size_t> interior_cols;
};

Supports supports_of(const DiscreteMeasure& ms, const DiscreteMeasure& md) {
  const std::size_t n = ms.size();
  Supports s;
  s.rows.push_back(0);
  s.cols.push_back(0);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (ms[i] > 0.0) {
      s.rows.push_back(i);
      s.interior_rows.push_back(i);
    }
    if (md[i] > 0.0) {
      s.cols.push_back(i);
      s.interior_cols.push_back(i);
    }
  }
  s.rows.push_back(n - 1);
  s.cols.push_back(n - 1);
  return s;
}

void check_inputs(const DiscreteMeasure& ms, const DiscreteMeasure& md, const char* who) {
  require_same_grid(ms, md, who);
  ms.require_empty_boundary(who);
  md.require_empty_boundary(who);
}

BoundaryMasses boundary_masses(const TransportPlan& plan) {
  const std::size_t n = plan.size();
  BoundaryMasses b;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    b.from_left += plan(0, i);
    b.from_right += plan(n - 1, i);
    b.to_left += plan(i, 0);
    b.to_right += plan(i, n - 1);
  }
  return b;
}

double root(double value, double p) { return p == 1.0 ? value : std::pow(std::max(value, 0.0), 1.0 / p); }

}  // namespace

double interior_unbalance(const DiscreteMeasure& ms, const DiscreteMeasure& md) {
  double d = 0.0;
  for (std::size_t i = 1; i + 1 < ms.size(); ++i) d += ms[i] - md[i];
  return d;
}

FgSolution fg_distance(const DiscreteMeasure& ms, const DiscreteMeasure& md, double p, const LpOptions& lp) {
  check_inputs(ms, md, "fg_distance");
  const std::size_t n = ms.size();
  const std::size_t last = n - 1;
  CostMatrix cost(ms.grid(), p);
  Supports s = supports_of(ms, md);

  detail::TransportLpBuilder builder(n);
  for (std::size_t j : s.rows) {
    for (std::size_t k : s.cols) {
      bool j_boundary = j == 0 || j == last;
      bool k_boundary = k == 0 || k == last;
      // Boundary-to-boundary columns cancel in every constraint.
      if (j_boundary && k_boundary) continue;
      builder.add_pair(j, k, cost(j, k));
    }
  }
  for (std::size_t j : s.interior_rows) builder.add_row_constraint(j, ms[j]);
  for (std::size_t k : s.interior_cols) builder.add_column_constraint(k, md[k]);

  // Mass drawn from the reservoirs minus mass sent to them covers the
  // interior demand surplus.
  std::size_t balance = builder.new_row(-interior_unbalance(ms, md));
  const auto& pairs = builder.pairs();
  for (std::size_t v = 0; v < pairs.size(); ++v) {
    auto [j, k] = pairs[v];
    double coef = 0.0;
    if (j == 0 || j == last) coef += 1.0;
    if (k == 0 || k == last) coef -= 1.0;
    if (coef != 0.0) builder.add_term(balance, v, coef);
  }

  LpSolution sol = solve_lp(builder.problem(ConstraintSense::equal), lp);
  if (sol.status != LpStatus::optimal) {
    throw NumericalError(std::string("fg_distance: LP returned ") + to_string(sol.status));
  }
  FgSolution out;
  out.plan = builder.plan(sol.x);
  out.boundary = boundary_masses(out.plan);
  out.value = root(sol.value, p);
  return out;
}

FgSolution fg_distance_extended(const DiscreteMeasure& ms, const DiscreteMeasure& md, double p,
                                const CreationCosts& creation, const LpOptions& lp) {
  check_inputs(ms, md, "fg_distance_extended");
  for (double c : {creation.from_left, creation.from_right, creation.to_left, creation.to_right}) {
    if (!(c >= 0.0) || !std::isfinite(c)) throw InputError("fg_distance_extended: creation costs must be finite and >= 0");
  }
  const std::size_t n = ms.size();
  const std::size_t last = n - 1;
  CostMatrix cost(ms.grid(), p);
  const double big = 1e6 * cost.max_entry();
  Supports s = supports_of(ms, md);

  detail::TransportLpBuilder builder(n);
  std::vector<std::size_t> corner_vars;
  for (std::size_t j : s.rows) {
    for (std::size_t k : s.cols) {
      bool corner = (j == 0 || j == last) && (k == 0 || k == last);
      std::size_t v = builder.add_pair(j, k, corner ? big : cost(j, k));
      if (corner) corner_vars.push_back(v);
    }
  }
  const std::size_t m_from_left = builder.add_variable(creation.from_left);
  const std::size_t m_from_right = builder.add_variable(creation.from_right);
  const std::size_t m_to_left = builder.add_variable(creation.to_left);
  const std::size_t m_to_right = builder.add_variable(creation.to_right);

  // Rows in the order of the balanced problem: supply rows, then demand columns.
  for (std::size_t j : s.rows) {
    std::size_t row = builder.add_row_constraint(j, j == 0 || j == last ? 0.0 : ms[j]);
    if (j == 0) builder.add_term(row, m_from_left, -1.0);
    if (j == last) builder.add_term(row, m_from_right, -1.0);
  }
  for (std::size_t k : s.cols) {
    std::size_t row = builder.add_column_constraint(k, k == 0 || k == last ? 0.0 : md[k]);
    if (k == 0) builder.add_term(row, m_to_left, -1.0);
    if (k == last) builder.add_term(row, m_to_right, -1.0);
  }

  LpSolution sol = solve_lp(builder.problem(ConstraintSense::equal), lp);
  if (sol.status != LpStatus::optimal) {
    throw NumericalError(std::string("fg_distance_extended: LP returned ") + to_string(sol.status));
  }
  for (std::size_t v : corner_vars) {
    if (sol.x[v] > lp.feas_tol) {
      throw NumericalError("fg_distance_extended: optimum ships mass between boundaries; BIG cost encoding failed");
    }
  }

  FgSolution out;
  out.plan = builder.plan(sol.x);
  out.boundary = {sol.x[m_from_left], sol.x[m_from_right], sol.x[m_to_left], sol.x[m_to_right]};
  out.value = root(sol.value, p);
  return out;
}

}  // namespace gwd
