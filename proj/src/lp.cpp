#include "gwd/lp.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numeric>

#include "gwd/error.hpp"
#include "gwd/simd/kernels.hpp"

namespace gwd {

SparseMatrix::SparseMatrix(std::size_t rows, std::size_t cols, std::vector<Triplet> triplets)
    : rows_(rows), cols_(cols), start_(cols + 1, 0) {
  for (const auto& t : triplets) {
    if (t.row >= rows || t.col >= cols) throw InputError("SparseMatrix: triplet index out of range");
    ++start_[t.col + 1];
  }
  std::partial_sum(start_.begin(), start_.end(), start_.begin());
  entries_.resize(triplets.size());
  std::vector<std::size_t> fill(start_.begin(), start_.end() - 1);
  for (const auto& t : triplets) entries_[fill[t.col]++] = {t.row, t.value};
  for (std::size_t j = 0; j < cols; ++j) {
    std::sort(entries_.begin() + static_cast<std::ptrdiff_t>(start_[j]),
              entries_.begin() + static_cast<std::ptrdiff_t>(start_[j + 1]),
              [](const Entry& a, const Entry& b) { return a.row < b.row; });
  }
}

SparseMatrix SparseMatrix::from_dense(std::size_t rows, std::size_t cols, std::span<const double> row_major) {
  if (row_major.size() != rows * cols) throw InputError("SparseMatrix::from_dense: size mismatch");
  std::vector<Triplet> t;
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) {
      double v = row_major[i * cols + j];
      if (v != 0.0) t.push_back({i, j, v});
    }
  }
  return {rows, cols, std::move(t)};
}

double SparseMatrix::at(std::size_t i, std::size_t j) const {
  double v = 0.0;
  for (const auto& e : column(j)) {
    if (e.row == i) v += e.value;
  }
  return v;
}

std::vector<double> SparseMatrix::multiply(std::span<const double> x) const {
  if (x.size() != cols_) throw InputError("SparseMatrix::multiply: size mismatch");
  std::vector<double> y(rows_, 0.0);
  for (std::size_t j = 0; j < cols_; ++j) {
    if (x[j] == 0.0) continue;
    for (const auto& e : column(j)) y[e.row] += e.value * x[j];
  }
  return y;
}

void LpProblem::validate() const {
  if (constraints.rows() != rhs.size() || constraints.cols() != objective.size()) {
    throw InputError("LpProblem: dimensions of c, A, b are inconsistent");
  }
  auto finite = [](double v) { return std::isfinite(v); };
  if (!std::all_of(objective.begin(), objective.end(), finite) || !std::all_of(rhs.begin(), rhs.end(), finite)) {
    throw InputError("LpProblem: non-finite entries");
  }
  for (std::size_t j = 0; j < constraints.cols(); ++j) {
    for (const auto& e : constraints.column(j)) {
      if (!std::isfinite(e.value)) throw InputError("LpProblem: non-finite entries");
    }
  }
}

const char* to_string(LpStatus status) {
  switch (status) {
    case LpStatus::optimal:
      return "optimal";
    case LpStatus::infeasible:
      return "infeasible";
    case LpStatus::unbounded:
      return "unbounded";
    case LpStatus::iteration_limit:
      return "iteration_limit";
  }
  return "unknown";
}

namespace {

constexpr double kPivotTol = 1e-9;

enum class ColumnKind { structural, slack, artificial };

// Revised simplex over the internal column set
//   [structural | slacks (<= rows) | artificials],
// with every row sign-normalised so that the internal right-hand side is >= 0.
class RevisedSimplex {
 public:
  RevisedSimplex(const LpProblem& p, const LpOptions& o) : p_(p), opt_(o), m_(p.rows()), n_(p.variables()) {
    sign_.assign(m_, 1.0);
    rhs_.resize(m_);
    for (std::size_t i = 0; i < m_; ++i) {
      if (p.rhs[i] < 0.0) sign_[i] = -1.0;
      rhs_[i] = sign_[i] * p.rhs[i];
    }
    slack_begin_ = n_;
    std::size_t slacks = p.sense == ConstraintSense::less_equal ? m_ : 0;
    art_begin_ = slack_begin_ + slacks;
    basis_.resize(m_);
    art_row_.clear();
    for (std::size_t i = 0; i < m_; ++i) {
      bool slack_usable = p.sense == ConstraintSense::less_equal && sign_[i] > 0.0;
      if (slack_usable) {
        basis_[i] = slack_begin_ + i;
      } else {
        basis_[i] = art_begin_ + art_row_.size();
        art_row_.push_back(i);
      }
    }
    total_ = art_begin_ + art_row_.size();
    is_basic_.assign(total_, -1);
    for (std::size_t i = 0; i < m_; ++i) is_basic_[basis_[i]] = static_cast<long>(i);
    binv_.assign(m_ * m_, 0.0);
    for (std::size_t i = 0; i < m_; ++i) binv_[i * m_ + i] = 1.0;
    xb_ = rhs_;
    max_iter_ = opt_.max_iterations ? opt_.max_iterations : 50 * (m_ + n_) + 1000;
  }

  LpSolution run() {
    LpSolution out;
    if (!art_row_.empty()) {
      cost_.assign(total_, 0.0);
      for (std::size_t a = art_begin_; a < total_; ++a) cost_[a] = 1.0;
      LpStatus s = iterate();
      out.iterations = iterations_;
      if (s == LpStatus::iteration_limit) return finish(out, s);
      double infeasibility = 0.0;
      for (std::size_t i = 0; i < m_; ++i) {
        if (kind(basis_[i]) == ColumnKind::artificial) infeasibility += xb_[i];
      }
      double scale = 1.0 + std::accumulate(rhs_.begin(), rhs_.end(), 0.0);
      if (infeasibility > opt_.feas_tol * scale) return finish(out, LpStatus::infeasible);
      drive_out_artificials();
    }
    cost_.assign(total_, 0.0);
    std::copy(p_.objective.begin(), p_.objective.end(), cost_.begin());
    LpStatus s = iterate();
    out.iterations = iterations_;
    return finish(out, s);
  }

 private:
  ColumnKind kind(std::size_t j) const {
    if (j < slack_begin_) return ColumnKind::structural;
    if (j < art_begin_) return ColumnKind::slack;
    return ColumnKind::artificial;
  }

  template <typename F>
  void for_column(std::size_t j, F&& f) const {
    switch (kind(j)) {
      case ColumnKind::structural:
        for (const auto& e : p_.constraints.column(j)) f(e.row, sign_[e.row] * e.value);
        break;
      case ColumnKind::slack:
        f(j - slack_begin_, sign_[j - slack_begin_]);
        break;
      case ColumnKind::artificial:
        f(art_row_[j - art_begin_], 1.0);
        break;
    }
  }

  // alpha = B^{-1} a_j
  void ftran(std::size_t j, std::vector<double>& alpha) const {
    alpha.assign(m_, 0.0);
    for_column(j, [&](std::size_t r, double v) {
      for (std::size_t i = 0; i < m_; ++i) alpha[i] += binv_[i * m_ + r] * v;
    });
  }

  void compute_duals(std::vector<double>& y) const {
    y.assign(m_, 0.0);
    for (std::size_t i = 0; i < m_; ++i) {
      double cb = cost_[basis_[i]];
      if (cb != 0.0) simd::axpy(cb, {binv_.data() + i * m_, m_}, y);
    }
  }

  double reduced_cost(std::size_t j, const std::vector<double>& y) const {
    double d = cost_[j];
    for_column(j, [&](std::size_t r, double v) { d -= y[r] * v; });
    return d;
  }

  // Dantzig pricing, or the first improving column under Bland's rule.
  std::size_t price(const std::vector<double>& y, bool bland) const {
    std::size_t best = total_;
    double best_d = -opt_.opt_tol;
    for (std::size_t j = 0; j < art_begin_; ++j) {
      if (is_basic_[j] >= 0) continue;
      double d = reduced_cost(j, y);
      if (d < best_d) {
        best = j;
        best_d = d;
        if (bland) break;
      }
    }
    return best;
  }

  // Minimum-ratio row; ties go to the lowest basic column index.
  std::size_t ratio_test(const std::vector<double>& alpha) const {
    std::size_t leave = m_;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < m_; ++i) {
      double ratio;
      if (kind(basis_[i]) == ColumnKind::artificial && xb_[i] <= opt_.feas_tol && std::abs(alpha[i]) > kPivotTol) {
        ratio = 0.0;  // zero-level artificial (redundant row) must not move
      } else if (alpha[i] > kPivotTol) {
        ratio = std::max(xb_[i], 0.0) / alpha[i];
      } else {
        continue;
      }
      if (ratio < best - 1e-12 || (ratio <= best + 1e-12 && leave < m_ && basis_[i] < basis_[leave])) {
        if (ratio < best) best = ratio;
        leave = i;
      }
    }
    return leave;
  }

  void pivot(std::size_t r, std::size_t q, const std::vector<double>& alpha) {
    double theta = std::max(xb_[r], 0.0) / alpha[r];
    for (std::size_t i = 0; i < m_; ++i) {
      if (i != r && alpha[i] != 0.0) {
        xb_[i] -= theta * alpha[i];
        if (xb_[i] < 0.0 && xb_[i] > -opt_.feas_tol) xb_[i] = 0.0;
      }
    }
    xb_[r] = theta;

    double* row_r = binv_.data() + r * m_;
    double inv_pivot = 1.0 / alpha[r];
    for (std::size_t k = 0; k < m_; ++k) row_r[k] *= inv_pivot;
    for (std::size_t i = 0; i < m_; ++i) {
      if (i != r && alpha[i] != 0.0) simd::axpy(-alpha[i], {row_r, m_}, {binv_.data() + i * m_, m_});
    }
    is_basic_[basis_[r]] = -1;
    basis_[r] = q;
    is_basic_[q] = static_cast<long>(r);
    degenerate_run_ = theta <= 1e-12 ? degenerate_run_ + 1 : 0;
  }

  void refactor() {
    Eigen::MatrixXd B = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(m_), static_cast<Eigen::Index>(m_));
    for (std::size_t i = 0; i < m_; ++i) {
      for_column(basis_[i], [&](std::size_t r, double v) {
        B(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(i)) += v;
      });
    }
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(B);
    Eigen::MatrixXd inv = lu.inverse();
    if (!inv.allFinite()) throw NumericalError("solve_lp: basis became singular");
    for (std::size_t i = 0; i < m_; ++i) {
      for (std::size_t k = 0; k < m_; ++k) {
        binv_[i * m_ + k] = inv(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k));
      }
    }
    for (std::size_t i = 0; i < m_; ++i) {
      double v = simd::dot({binv_.data() + i * m_, m_}, rhs_);
      xb_[i] = (v < 0.0 && v > -opt_.feas_tol) ? 0.0 : v;
    }
    since_refactor_ = 0;
  }

  LpStatus iterate() {
    std::vector<double> y, alpha;
    while (true) {
      if (iterations_ >= max_iter_) return LpStatus::iteration_limit;
      if (since_refactor_ >= opt_.refactor_every) refactor();
      compute_duals(y);
      bool bland = degenerate_run_ >= opt_.degenerate_before_bland;
      std::size_t q = price(y, bland);
      if (q == total_) return LpStatus::optimal;
      ftran(q, alpha);
      std::size_t r = ratio_test(alpha);
      if (r == m_) return LpStatus::unbounded;
      pivot(r, q, alpha);
      ++iterations_;
      ++since_refactor_;
    }
  }

  void drive_out_artificials() {
    std::vector<double> alpha;
    for (std::size_t r = 0; r < m_; ++r) {
      if (kind(basis_[r]) != ColumnKind::artificial) continue;
      xb_[r] = 0.0;
      const double* row = binv_.data() + r * m_;
      std::size_t best = total_;
      double best_abs = 1e-7;
      for (std::size_t j = 0; j < art_begin_; ++j) {
        if (is_basic_[j] >= 0) continue;
        double v = 0.0;
        for_column(j, [&](std::size_t k, double a) { v += row[k] * a; });
        if (std::abs(v) > best_abs) {
          best_abs = std::abs(v);
          best = j;
        }
      }
      if (best == total_) continue;  // redundant row: artificial stays basic at zero
      ftran(best, alpha);
      pivot(r, best, alpha);
      ++since_refactor_;
    }
  }

  LpSolution& finish(LpSolution& out, LpStatus s) {
    out.status = s;
    out.x.assign(n_, 0.0);
    for (std::size_t i = 0; i < m_; ++i) {
      if (basis_[i] < n_) out.x[basis_[i]] = std::max(xb_[i], 0.0);
    }
    out.value = std::inner_product(p_.objective.begin(), p_.objective.end(), out.x.begin(), 0.0);
    if (s == LpStatus::optimal) {
      std::vector<double> y;
      compute_duals(y);
      out.duals.resize(m_);
      for (std::size_t i = 0; i < m_; ++i) out.duals[i] = sign_[i] * y[i];
    }
    return out;
  }

  const LpProblem& p_;
  LpOptions opt_;
  std::size_t m_, n_;
  std::size_t slack_begin_ = 0, art_begin_ = 0, total_ = 0;
  std::vector<double> sign_, rhs_, cost_, binv_, xb_;
  std::vector<std::size_t> basis_, art_row_;
  std::vector<long> is_basic_;
  std::size_t iterations_ = 0, since_refactor_ = 0, degenerate_run_ = 0, max_iter_ = 0;
};

}  // namespace

LpSolution solve_lp(const LpProblem& problem, const LpOptions& options) {
  problem.validate();
  if (!(options.feas_tol > 0.0) || !(options.opt_tol > 0.0)) throw InputError("solve_lp: tolerances must be positive");
  if (problem.rows() == 0) {
    LpSolution s;
    s.x.assign(problem.variables(), 0.0);
    bool bounded = std::all_of(problem.objective.begin(), problem.objective.end(), [](double c) { return c >= 0.0; });
    s.status = bounded ? LpStatus::optimal : LpStatus::unbounded;
    return s;
  }
  return RevisedSimplex(problem, options).run();
}

void write_lp_csv(const LpProblem& problem, const std::filesystem::path& prefix) {
  auto open = [&](const char* suffix) {
    std::ofstream f(prefix.string() + suffix);
    if (!f) throw InputError("write_lp_csv: cannot open output for " + prefix.string());
    f << std::setprecision(17);
    return f;
  };
  {
    auto f = open("_c.csv");
    f << "index,c\n";
    for (std::size_t j = 0; j < problem.variables(); ++j) f << j << ',' << problem.objective[j] << '\n';
  }
  {
    auto f = open("_A.csv");
    f << "row,col,value\n";
    for (std::size_t j = 0; j < problem.constraints.cols(); ++j) {
      for (const auto& e : problem.constraints.column(j)) f << e.row << ',' << j << ',' << e.value << '\n';
    }
  }
  {
    auto f = open("_b.csv");
    f << "index,b,sense\n";
    const char* sense = problem.sense == ConstraintSense::equal ? "eq" : "le";
    for (std::size_t i = 0; i < problem.rows(); ++i) f << i << ',' << problem.rhs[i] << ',' << sense << '\n';
  }
}

}  // namespace gwd
