#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <vector>

namespace gwd {

/// Column-compressed sparse matrix. Transport-type constraint matrices have
/// two nonzeros per column, so dense storage would dominate memory.
class SparseMatrix {
 public:
  struct Entry {
    std::size_t row;
    double value;
  };
  struct Triplet {
    std::size_t row;
    std::size_t col;
    double value;
  };

  SparseMatrix() = default;
  SparseMatrix(std::size_t rows, std::size_t cols, std::vector<Triplet> triplets);
  static SparseMatrix from_dense(std::size_t rows, std::size_t cols, std::span<const double> row_major);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t nonzeros() const { return entries_.size(); }
  std::span<const Entry> column(std::size_t j) const {
    return {entries_.data() + start_[j], start_[j + 1] - start_[j]};
  }
  double at(std::size_t i, std::size_t j) const;
  /// y = A x
  std::vector<double> multiply(std::span<const double> x) const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<std::size_t> start_{0};
  std::vector<Entry> entries_;
};

enum class ConstraintSense { equal, less_equal };

/// minimize c^T x  subject to  A x (= or <=) b,  x >= 0.
struct LpProblem {
  std::vector<double> objective;
  SparseMatrix constraints;
  std::vector<double> rhs;
  ConstraintSense sense = ConstraintSense::equal;

  std::size_t variables() const { return objective.size(); }
  std::size_t rows() const { return rhs.size(); }
  /// Throws InputError on inconsistent dimensions or non-finite data.
  void validate() const;
};

enum class LpStatus { optimal, infeasible, unbounded, iteration_limit };

const char* to_string(LpStatus status);

struct LpSolution {
  LpStatus status = LpStatus::infeasible;
  std::vector<double> x;
  double value = 0.0;
  /// Row multipliers y of the final basis; for an optimal solution
  /// c - A^T y >= -opt_tol and b^T y equals value.
  std::vector<double> duals;
  std::size_t iterations = 0;
};

struct LpOptions {
  double feas_tol = 1e-9;
  double opt_tol = 1e-9;
  /// 0 selects a size-dependent default.
  std::size_t max_iterations = 0;
  std::size_t refactor_every = 100;
  /// Consecutive degenerate pivots before switching to Bland's rule.
  std::size_t degenerate_before_bland = 500;
};

/// Two-phase revised simplex with a dense explicit basis inverse.
LpSolution solve_lp(const LpProblem& problem, const LpOptions& options = {});

/// Writes <prefix>_c.csv, <prefix>_A.csv (row,col,value triplets) and
/// <prefix>_b.csv for cross-checking with external solvers.
void write_lp_csv(const LpProblem& problem, const std::filesystem::path& prefix);

}  // namespace gwd
