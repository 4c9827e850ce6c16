#include "gwd/ghk.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>

#include "gwd/error.hpp"
#include "gwd/simd/kernels.hpp"

namespace gwd {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kMaxExponent = 700.0;

// U(sigma) = sigma ln sigma - sigma + 1, the entropy of a marginal ratio.
double entropy_u(double sigma) { return sigma > 0.0 ? sigma * std::log(sigma) - sigma + 1.0 : 1.0; }

// Interior-point solver for the dual restricted to cells carrying mass:
// maximise t f(phi, psi) + sum log(c_jk - phi_j - psi_k) for increasing t.
class BarrierSolver {
 public:
  BarrierSolver(std::vector<double> ms, std::vector<double> md, std::vector<double> cost, const GhkParams& p,
                const GhkOptions& o, double scale)
      : ms_(std::move(ms)), md_(std::move(md)), c_(std::move(cost)), a_(p.a), b_(p.b), opt_(o), scale_(scale),
        ns_(ms_.size()), nd_(md_.size()), n_(ns_ + nd_) {
    z_.assign(n_, -1.0);
    slack_.resize(ns_ * nd_);
    inv_.resize(ns_ * nd_);
  }

  void run(GhkResult& out) {
    if (!update_slacks(z_)) throw NumericalError("ghk_value: starting point is not strictly feasible");
    double t = 1.0;
    const double target = opt_.tol * scale_;
    const double pairs = static_cast<double>(ns_ * nd_);
    while (true) {
      if (!center(t, out.iterations)) break;
      out.history.push_back(objective(z_));
      gap_ = primal_bound(t) - out.history.back();
      if (gap_ <= target || pairs / t <= 1e-3 * target) {
        out.converged = gap_ <= target;
        break;
      }
      t *= 10.0;
    }
  }

  std::vector<double>& point() { return z_; }
  double gap() const { return gap_; }

  double objective(const std::vector<double>& z) const {
    double f = 0.0;
    for (std::size_t i = 0; i < n_; ++i) f += a_ * mass(i) * -std::expm1(-b_ * z[i] / a_);
    return f;
  }

  /// f at the primal plan gamma_jk = 1/(t s_jk) read off the current slacks.
  double primal_bound(double t) const {
    std::vector<double> row(ns_, 0.0), col(nd_, 0.0);
    double transport = 0.0;
    for (std::size_t j = 0; j < ns_; ++j) {
      for (std::size_t k = 0; k < nd_; ++k) {
        double gamma = inv_[j * nd_ + k] / t;
        row[j] += gamma;
        col[k] += gamma;
        transport += c_[j * nd_ + k] * gamma;
      }
    }
    double p = transport;
    for (std::size_t j = 0; j < ns_; ++j) p += a_ * ms_[j] * entropy_u(row[j] / (b_ * ms_[j]));
    for (std::size_t k = 0; k < nd_; ++k) p += a_ * md_[k] * entropy_u(col[k] / (b_ * md_[k]));
    return p;
  }

 private:
  double mass(std::size_t i) const { return i < ns_ ? ms_[i] : md_[i - ns_]; }

  bool update_slacks(const std::vector<double>& z) {
    const auto& kern = simd::kernels();
    const double* psi = z.data() + ns_;
    for (std::size_t j = 0; j < ns_; ++j) {
      double lowest = kern.barrier_row(&c_[j * nd_], z[j], psi, &inv_[j * nd_], nd_);
      if (!(lowest > 0.0)) return false;
    }
    for (std::size_t i = 0; i < inv_.size(); ++i) slack_[i] = 1.0 / inv_[i];
    return true;
  }

  // Newton's method on the barrier function for fixed t. Returns false when
  // the iteration budget runs out.
  bool center(double t, std::size_t& iterations) {
    const auto N = static_cast<Eigen::Index>(n_);
    Eigen::VectorXd g(N), step(N);
    Eigen::MatrixXd H(N, N);
    std::vector<double> trial(n_);
    for (int newton = 0; newton < 100; ++newton) {
      if (iterations >= opt_.budget) return false;
      ++iterations;
      H.setZero();
      for (std::size_t i = 0; i < n_; ++i) {
        double e = std::exp(-b_ * z_[i] / a_);
        g(static_cast<Eigen::Index>(i)) = t * b_ * mass(i) * e;
        H(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = t * (b_ * b_ / a_) * mass(i) * e;
      }
      for (std::size_t j = 0; j < ns_; ++j) {
        const auto J = static_cast<Eigen::Index>(j);
        for (std::size_t k = 0; k < nd_; ++k) {
          const auto K = static_cast<Eigen::Index>(ns_ + k);
          double w = inv_[j * nd_ + k];
          double w2 = w * w;
          g(J) -= w;
          g(K) -= w;
          H(J, J) += w2;
          H(K, K) += w2;
          H(J, K) += w2;
          H(K, J) += w2;
        }
      }
      Eigen::LLT<Eigen::MatrixXd> llt(H);
      if (llt.info() == Eigen::Success) {
        step = llt.solve(g);
      } else {
        step = H.ldlt().solve(g);
      }
      double decrement = g.dot(step);
      if (!std::isfinite(decrement)) throw NumericalError("ghk_value: Newton system is singular");
      if (decrement <= 1e-10) return true;

      // largest step keeping every slack positive
      double alpha = 1.0;
      for (std::size_t j = 0; j < ns_; ++j) {
        for (std::size_t k = 0; k < nd_; ++k) {
          double d = step(static_cast<Eigen::Index>(j)) + step(static_cast<Eigen::Index>(ns_ + k));
          if (d > 0.0) alpha = std::min(alpha, 0.99 * slack_[j * nd_ + k] / d);
        }
      }
      bool accepted = false;
      for (int ls = 0; ls < 60 && !accepted; ++ls, alpha *= 0.5) {
        if (barrier_gain(t, step, alpha) >= 0.25 * alpha * decrement) accepted = true;
        if (accepted) {
          for (std::size_t i = 0; i < n_; ++i) trial[i] = z_[i] + alpha * step(static_cast<Eigen::Index>(i));
          if (!update_slacks(trial)) {
            update_slacks(z_);
            accepted = false;
          } else {
            z_.swap(trial);
          }
        }
      }
      if (!accepted) return true;  // no further progress possible at this t
    }
    return true;
  }

  // Change of the barrier function along the step, computed without
  // cancellation against its (possibly huge) absolute value.
  double barrier_gain(double t, const Eigen::VectorXd& step, double alpha) const {
    double df = 0.0;
    for (std::size_t i = 0; i < n_; ++i) {
      double expo = -b_ * (z_[i] + alpha * step(static_cast<Eigen::Index>(i))) / a_;
      if (expo > kMaxExponent) return -kInf;
      df += a_ * mass(i) * std::exp(-b_ * z_[i] / a_) * -std::expm1(-b_ * alpha * step(static_cast<Eigen::Index>(i)) / a_);
    }
    double logs = 0.0;
    for (std::size_t j = 0; j < ns_; ++j) {
      for (std::size_t k = 0; k < nd_; ++k) {
        double d = alpha * (step(static_cast<Eigen::Index>(j)) + step(static_cast<Eigen::Index>(ns_ + k)));
        double r = -d / slack_[j * nd_ + k];
        if (!(r > -1.0)) return -kInf;
        logs += std::log1p(r);
      }
    }
    return t * df + logs;
  }

  std::vector<double> ms_, md_, c_;
  double a_, b_;
  GhkOptions opt_;
  double scale_;
  std::size_t ns_, nd_, n_;
  std::vector<double> z_, slack_, inv_;
  double gap_ = kInf;
};

std::vector<std::size_t> support(const DiscreteMeasure& m) {
  std::vector<std::size_t> s;
  for (std::size_t i = 0; i < m.size(); ++i)
    if (m[i] > 0.0) s.push_back(i);
  return s;
}

// Fills potentials of cells without mass so that every pair constraint holds:
// psi on empty demand cells against the supply support, then phi on empty
// supply cells against all demand cells.
void extend_potentials(const CostMatrix& c, const std::vector<std::size_t>& S, const std::vector<std::size_t>& D,
                       DualPotentials& z) {
  const std::size_t n = c.size();
  std::vector<bool> in_s(n, false), in_d(n, false);
  for (std::size_t j : S) in_s[j] = true;
  for (std::size_t k : D) in_d[k] = true;
  for (std::size_t k = 0; k < n; ++k) {
    if (in_d[k]) continue;
    double v = kInf;
    for (std::size_t j : S) v = std::min(v, c(j, k) - z.phi[j]);
    z.psi[k] = v;
  }
  for (std::size_t j = 0; j < n; ++j) {
    if (in_s[j]) continue;
    double v = kInf;
    for (std::size_t k = 0; k < n; ++k) v = std::min(v, c(j, k) - z.psi[k]);
    z.phi[j] = v;
  }
}

void check_params(const GhkParams& p, const GhkOptions& o) {
  if (!(p.a > 0.0) || !(p.b > 0.0) || !std::isfinite(p.a) || !std::isfinite(p.b)) {
    throw InputError("ghk_value: a and b must be positive");
  }
  if (!(o.tol > 0.0)) throw InputError("ghk_value: tol must be positive");
}

}  // namespace

double GhkResult::metric() const { return std::sqrt(std::max(value, 0.0)); }

double ghk_objective(const DiscreteMeasure& ms, const DiscreteMeasure& md, const GhkParams& params,
                     const DualPotentials& z) {
  double f = 0.0;
  for (std::size_t i = 0; i < ms.size(); ++i) {
    if (ms[i] > 0.0) f += params.a * ms[i] * -std::expm1(-params.b * z.phi[i] / params.a);
    if (md[i] > 0.0) f += params.a * md[i] * -std::expm1(-params.b * z.psi[i] / params.a);
  }
  return f;
}

double ghk_infeasibility(const Grid1D& grid, const DualPotentials& z) {
  CostMatrix c(grid, 2.0);
  double worst = 0.0;
  for (std::size_t j = 0; j < grid.size(); ++j)
    for (std::size_t k = 0; k < grid.size(); ++k) worst = std::max(worst, z.phi[j] + z.psi[k] - c(j, k));
  return worst;
}

GhkResult ghk_value(const DiscreteMeasure& ms, const DiscreteMeasure& md, const GhkParams& params,
                    const GhkOptions& options) {
  require_same_grid(ms, md, "ghk_value");
  check_params(params, options);
  const std::size_t n = ms.size();
  CostMatrix c(ms.grid(), 2.0);
  const std::vector<std::size_t> S = support(ms), D = support(md);
  const double total = total_mass(ms) + total_mass(md);
  const double scale = std::max(1.0, params.a * total);

  GhkResult out;
  out.potentials.phi.assign(n, 0.0);
  out.potentials.psi.assign(n, 0.0);
  if (S.empty() && D.empty()) {
    out.converged = true;
    out.history.push_back(0.0);
    return out;
  }

  if (S.empty() || D.empty()) {
    // Nothing to pair with: the supremum a * total is approached by raising
    // the potentials of the massive side; return a witness within tol.
    double level = (params.a / params.b) * std::log(std::max(1.0, params.a * total / (options.tol * scale))) + 1.0;
    DualPotentials& z = out.potentials;
    bool supply_side = D.empty();
    auto& lead = supply_side ? z.phi : z.psi;
    auto& other = supply_side ? z.psi : z.phi;
    const std::vector<std::size_t>& massive = supply_side ? S : D;
    for (std::size_t i : massive) lead[i] = level;
    // c is symmetric, so the same extension serves both orientations.
    for (std::size_t k = 0; k < n; ++k) {
      double v = kInf;
      for (std::size_t j : massive) v = std::min(v, c(j, k) - lead[j]);
      other[k] = v;
    }
    std::vector<bool> in(n, false);
    for (std::size_t i : massive) in[i] = true;
    for (std::size_t j = 0; j < n; ++j) {
      if (in[j]) continue;
      double v = kInf;
      for (std::size_t k = 0; k < n; ++k) v = std::min(v, c(j, k) - other[k]);
      lead[j] = v;
    }
    out.value = params.a * total;
    out.gap = out.value - ghk_objective(ms, md, params, z);
    out.converged = true;
    out.history.push_back(ghk_objective(ms, md, params, z));
    return out;
  }

  std::vector<double> ms_s, md_d, cost;
  for (std::size_t j : S) ms_s.push_back(ms[j]);
  for (std::size_t k : D) md_d.push_back(md[k]);
  for (std::size_t j : S)
    for (std::size_t k : D) cost.push_back(c(j, k));

  BarrierSolver solver(ms_s, md_d, cost, params, options, scale);
  solver.run(out);
  const std::vector<double>& z = solver.point();

  // c-transform polish: lift each potential onto its tightest constraint.
  DualPotentials& pot = out.potentials;
  for (std::size_t a = 0; a < S.size(); ++a) pot.phi[S[a]] = z[a];
  for (std::size_t b = 0; b < D.size(); ++b) pot.psi[D[b]] = z[S.size() + b];
  for (std::size_t j : S) {
    double v = kInf;
    for (std::size_t k : D) v = std::min(v, c(j, k) - pot.psi[k]);
    pot.phi[j] = v;
  }
  for (std::size_t k : D) {
    double v = kInf;
    for (std::size_t j : S) v = std::min(v, c(j, k) - pot.phi[j]);
    pot.psi[k] = v;
  }
  extend_potentials(c, S, D, pot);

  out.value = ghk_objective(ms, md, params, pot);
  if (out.value < 0.0) {
    // zero potentials are feasible and score exactly 0
    std::fill(pot.phi.begin(), pot.phi.end(), 0.0);
    std::fill(pot.psi.begin(), pot.psi.end(), 0.0);
    out.value = 0.0;
  }
  out.history.push_back(out.value);
  double before = out.history.size() >= 2 ? out.history[out.history.size() - 2] : out.value;
  out.gap = std::max(0.0, solver.gap() - (out.value - before));
  out.converged = out.converged || out.gap <= options.tol * scale;
  return out;
}

DualPotentials ghk_solve_dual(const DiscreteMeasure& ms, const DiscreteMeasure& md, const GhkParams& params,
                              const GhkOptions& options) {
  return ghk_value(ms, md, params, options).potentials;
}

}  // namespace gwd
