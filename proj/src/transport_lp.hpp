#pragma once

// Internal helper assembling transport-type LPs whose variables are a subset
// of the cell pairs (j, k), optionally followed by free-standing variables.

#include <cstddef>
#include <utility>
#include <vector>

#include "gwd/lp.hpp"
#include "gwd/wasserstein.hpp"

namespace gwd::detail {

class TransportLpBuilder {
 public:
  explicit TransportLpBuilder(std::size_t n_cells) : n_(n_cells) {}

  std::size_t add_pair(std::size_t j, std::size_t k, double cost) {
    pairs_.push_back({j, k});
    cost_.push_back(cost);
    return cost_.size() - 1;
  }

  /// Variable that is not a cell pair (e.g. a boundary creation term).
  std::size_t add_variable(double cost) {
    pairs_.push_back({kNone, kNone});
    cost_.push_back(cost);
    return cost_.size() - 1;
  }

  /// sum over pairs leaving cell j == rhs; returns the row index.
  std::size_t add_row_constraint(std::size_t j, double rhs) {
    std::size_t row = new_row(rhs);
    for (std::size_t v = 0; v < pairs_.size(); ++v) {
      if (pairs_[v].first == j) add_term(row, v, 1.0);
    }
    return row;
  }

  /// sum over pairs entering cell k == rhs; returns the row index.
  std::size_t add_column_constraint(std::size_t k, double rhs) {
    std::size_t row = new_row(rhs);
    for (std::size_t v = 0; v < pairs_.size(); ++v) {
      if (pairs_[v].second == k) add_term(row, v, 1.0);
    }
    return row;
  }

  std::size_t new_row(double rhs) {
    rhs_.push_back(rhs);
    return rhs_.size() - 1;
  }

  void add_term(std::size_t row, std::size_t var, double coef) { triplets_.push_back({row, var, coef}); }

  std::size_t variables() const { return cost_.size(); }
  const std::vector<std::pair<std::size_t, std::size_t>>& pairs() const { return pairs_; }
  std::vector<double>& costs() { return cost_; }

  LpProblem problem(ConstraintSense sense) const {
    LpProblem p;
    p.objective = cost_;
    p.rhs = rhs_;
    p.constraints = SparseMatrix(rhs_.size(), cost_.size(), triplets_);
    p.sense = sense;
    return p;
  }

  TransportPlan plan(const std::vector<double>& x) const {
    TransportPlan plan(n_);
    for (std::size_t v = 0; v < pairs_.size(); ++v) {
      if (pairs_[v].first != kNone && x[v] > 0.0) plan(pairs_[v].first, pairs_[v].second) += x[v];
    }
    return plan;
  }

  static constexpr std::size_t kNone = static_cast<std::size_t>(-1);

 private:
  std::size_t n_;
  std::vector<std::pair<std::size_t, std::size_t>> pairs_;
  std::vector<double> cost_;
  std::vector<double> rhs_;
  std::vector<SparseMatrix::Triplet> triplets_;
};

}  // namespace gwd::detail
