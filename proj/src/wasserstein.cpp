#include "gwd/wasserstein.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <string>

#include "gwd/error.hpp"
#include "gwd/simd/kernels.hpp"
#include "transport_lp.hpp"

namespace gwd {

std::vector<double> TransportPlan::row_sums() const {
  std::vector<double> s(n_, 0.0);
  for (std::size_t j = 0; j < n_; ++j) {
    for (std::size_t k = 0; k < n_; ++k) s[j] += gamma_[j * n_ + k];
  }
  return s;
}

std::vector<double> TransportPlan::column_sums() const {
  std::vector<double> s(n_, 0.0);
  for (std::size_t j = 0; j < n_; ++j) {
    for (std::size_t k = 0; k < n_; ++k) s[k] += gamma_[j * n_ + k];
  }
  return s;
}

double TransportPlan::total() const {
  double t = 0.0;
  for (double g : gamma_) t += g;
  return t;
}

double TransportPlan::cost(const CostMatrix& c) const {
  if (c.size() != n_) throw InputError("TransportPlan::cost: size mismatch");
  double total = 0.0;
  for (std::size_t j = 0; j < n_; ++j) {
    for (std::size_t k = 0; k < n_; ++k) {
      double g = gamma_[j * n_ + k];
      if (g != 0.0) total += g * c(j, k);
    }
  }
  return total;
}

void write_plan_csv(std::ostream& out, const TransportPlan& plan, const Grid1D& grid, double threshold) {
  out << "from_x,to_x,mass\n" << std::setprecision(17);
  for (std::size_t j = 0; j < plan.size(); ++j) {
    for (std::size_t k = 0; k < plan.size(); ++k) {
      if (plan(j, k) > threshold) out << grid.center(j) << ',' << grid.center(k) << ',' << plan(j, k) << '\n';
    }
  }
}

double default_balance_tol(const DiscreteMeasure& a, const DiscreteMeasure& b) {
  return 1e-9 * std::max({total_mass(a), total_mass(b), 1e-300});
}

namespace {

void require_balanced(const DiscreteMeasure& ms, const DiscreteMeasure& md, std::optional<double> tol,
                      const char* who) {
  require_same_grid(ms, md, who);
  double t = tol ? *tol : default_balance_tol(ms, md);
  if (std::abs(total_mass(ms) - total_mass(md)) > t) {
    throw InputError(std::string(who) + ": total masses differ; the classical distance is undefined");
  }
}

}  // namespace

double w1_cdf(const DiscreteMeasure& ms, const DiscreteMeasure& md, std::optional<double> balance_tol) {
  require_balanced(ms, md, balance_tol, "w1_cdf");
  auto a = ms.masses();
  auto b = md.masses();
  return ms.grid().dx() * simd::kernels().abs_cumulative_difference(a.data(), b.data(), a.size());
}

W1Result w1_lp(const DiscreteMeasure& ms, const DiscreteMeasure& md, double p, const LpOptions& lp,
               std::optional<double> balance_tol) {
  require_balanced(ms, md, balance_tol, "w1_lp");
  CostMatrix cost(ms.grid(), p);
  const std::size_t n = ms.size();

  detail::TransportLpBuilder builder(n);
  std::vector<std::size_t> rows, cols;
  for (std::size_t i = 0; i < n; ++i) {
    if (ms[i] > 0.0) rows.push_back(i);
    if (md[i] > 0.0) cols.push_back(i);
  }
  W1Result out{0.0, TransportPlan(n)};
  if (rows.empty() || cols.empty()) return out;

  // Zero-mass rows and columns force zero flow, so only supports enter the LP.
  for (std::size_t j : rows) {
    for (std::size_t k : cols) builder.add_pair(j, k, cost(j, k));
  }
  for (std::size_t j : rows) builder.add_row_constraint(j, ms[j]);
  for (std::size_t k : cols) builder.add_column_constraint(k, md[k]);

  LpSolution sol = solve_lp(builder.problem(ConstraintSense::equal), lp);
  if (sol.status != LpStatus::optimal) {
    throw NumericalError(std::string("w1_lp: transport LP returned ") + to_string(sol.status));
  }
  out.plan = builder.plan(sol.x);
  out.distance = p == 1.0 ? sol.value : std::pow(std::max(sol.value, 0.0), 1.0 / p);
  return out;
}

TransportPlan monotone_plan(const DiscreteMeasure& ms, const DiscreteMeasure& md, std::optional<double> balance_tol) {
  require_balanced(ms, md, balance_tol, "monotone_plan");
  const std::size_t n = ms.size();
  TransportPlan plan(n);
  std::vector<double> supply(ms.masses().begin(), ms.masses().end());
  std::vector<double> demand(md.masses().begin(), md.masses().end());
  std::size_t j = 0, k = 0;
  while (j < n && k < n) {
    if (supply[j] <= 0.0) {
      ++j;
      continue;
    }
    if (demand[k] <= 0.0) {
      ++k;
      continue;
    }
    double moved = std::min(supply[j], demand[k]);
    plan(j, k) += moved;
    supply[j] -= moved;
    demand[k] -= moved;
    // Whichever side is exhausted (within rounding) advances.
    if (supply[j] <= demand[k]) {
      supply[j] = 0.0;
      ++j;
    } else {
      demand[k] = 0.0;
      ++k;
    }
  }
  return plan;
}

}  // namespace gwd
