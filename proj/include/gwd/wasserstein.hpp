#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <vector>

#include "gwd/grid.hpp"
#include "gwd/lp.hpp"

namespace gwd {

/// Dense N x N matrix of shipped masses, gamma(j, k) = mass from cell j to cell k.
class TransportPlan {
 public:
  TransportPlan() = default;
  explicit TransportPlan(std::size_t n) : n_(n), gamma_(n * n, 0.0) {}

  std::size_t size() const { return n_; }
  double& operator()(std::size_t j, std::size_t k) { return gamma_[j * n_ + k]; }
  double operator()(std::size_t j, std::size_t k) const { return gamma_[j * n_ + k]; }

  std::vector<double> row_sums() const;
  std::vector<double> column_sums() const;
  double total() const;
  double cost(const CostMatrix& c) const;

 private:
  std::size_t n_ = 0;
  std::vector<double> gamma_;
};

/// Sparse CSV dump `from_x,to_x,mass` of the nonzero entries.
void write_plan_csv(std::ostream& out, const TransportPlan& plan, const Grid1D& grid, double threshold = 0.0);

/// Default balance tolerance: 1e-9 * max(total masses).
double default_balance_tol(const DiscreteMeasure& a, const DiscreteMeasure& b);

/// W1 by mid-point quadrature of the CDF difference.
double w1_cdf(const DiscreteMeasure& ms, const DiscreteMeasure& md, std::optional<double> balance_tol = std::nullopt);

struct W1Result {
  double distance = 0.0;
  TransportPlan plan;
};

/// Balanced transport (Hitchcock) problem solved as an LP; distance is the
/// optimal cost raised to 1/p.
W1Result w1_lp(const DiscreteMeasure& ms, const DiscreteMeasure& md, double p = 1.0, const LpOptions& lp = {},
               std::optional<double> balance_tol = std::nullopt);

/// Greedy left-to-right matching of cumulative masses.
TransportPlan monotone_plan(const DiscreteMeasure& ms, const DiscreteMeasure& md,
                            std::optional<double> balance_tol = std::nullopt);

}  // namespace gwd
