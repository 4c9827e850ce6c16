#include "gwd/ss.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <string>

#include "gwd/error.hpp"
#include "gwd/simd/kernels.hpp"

namespace gwd {
namespace {

constexpr std::size_t kMaxExhaustiveDimension = 16;
constexpr double kInf = std::numeric_limits<double>::infinity();

void check_atoms(const std::vector<Atom>& atoms) {
  for (const Atom& a : atoms) {
    if (!(a.mass >= 0.0) || !std::isfinite(a.mass) || !std::isfinite(a.x)) {
      throw InputError("ConeProblem: atom masses must be finite and >= 0");
    }
    if ((a.subdivisions == 0) != (a.mass == 0.0)) {
      throw InputError("ConeProblem: an atom has zero subdivisions exactly when its mass is zero");
    }
  }
}

// Radii of one side: per atom, solve for the radii of its slots.
bool side_radii(const std::vector<Atom>& atoms, const std::vector<std::size_t>& owner, const std::vector<double>& w,
                RadiusSystem system, std::vector<double>& r) {
  r.assign(owner.size(), 0.0);
  std::size_t slot = 0;
  for (const Atom& atom : atoms) {
    const std::size_t n = atom.subdivisions;
    if (n == 0) continue;
    if (system == RadiusSystem::homogeneous) {
      double n2 = 0.0;
      for (std::size_t h = 0; h < n; ++h) n2 += w[slot + h] * w[slot + h];
      if (!(n2 > 0.0)) return false;
      for (std::size_t h = 0; h < n; ++h) r[slot + h] = atom.mass * w[slot + h] / n2;
    } else {
      Eigen::MatrixXd A(2, static_cast<Eigen::Index>(n));
      for (std::size_t h = 0; h < n; ++h) {
        A(0, static_cast<Eigen::Index>(h)) = w[slot + h];
        A(1, static_cast<Eigen::Index>(h)) = 1.0;
      }
      Eigen::Vector2d rhs(atom.mass, atom.mass);
      Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod;
      cod.setThreshold(1e-10);
      cod.compute(A);
      Eigen::VectorXd sol = cod.solve(rhs);
      if ((A * sol - rhs).norm() > 1e-9 * std::max(1.0, atom.mass)) return false;
      for (std::size_t h = 0; h < n; ++h) {
        double v = sol(static_cast<Eigen::Index>(h));
        if (v < -1e-12) return false;
        r[slot + h] = std::max(v, 0.0);
      }
    }
    slot += n;
  }
  return true;
}

// Objective evaluation with reusable buffers.
class Evaluator {
 public:
  Evaluator(const ConeProblem& p, RadiusSystem system) : p_(p), system_(system), row_(p.demand_slots()) {
    g_.resize(p.dimension());
    for (std::size_t a = 0; a < p.supply_slots(); ++a)
      for (std::size_t b = 0; b < p.demand_slots(); ++b) g_[a * p.demand_slots() + b] = p.kernel(a, b);
  }

  /// Objective, or +inf when the radii system is infeasible.
  double operator()(std::span<const double> gamma, ConeRadii* radii_out = nullptr) {
    auto r = min_norm_radii(p_, gamma, system_);
    if (!r) return kInf;
    double v = cost(gamma, *r);
    if (radii_out) *radii_out = std::move(*r);
    return v;
  }

  double cost(std::span<const double> gamma, const ConeRadii& r) {
    const std::size_t B = p_.demand_slots();
    const auto& kern = simd::kernels();
    double total = 0.0;
    for (std::size_t a = 0; a < p_.supply_slots(); ++a) {
      std::fill(row_.begin(), row_.end(), r.supply[a]);
      total += kern.cone_cost(gamma.data() + a * B, row_.data(), r.demand.data(), g_.data() + a * B, B);
    }
    return total;
  }

 private:
  const ConeProblem& p_;
  RadiusSystem system_;
  std::vector<double> row_, g_;
};

void check_config(const SsConfig& cfg) {
  if (cfg.Q < 2) throw InputError("ss: Q must be at least 2");
  if (!(cfg.epsilon > 0.0)) throw InputError("ss: epsilon must be positive");
}

void check_nonempty(const ConeProblem& p) {
  if (p.dimension() == 0) throw InputError("ss: both sides need at least one atom with positive mass");
}

}  // namespace

ConeProblem::ConeProblem(std::vector<Atom> supply, std::vector<Atom> demand)
    : supply_(std::move(supply)), demand_(std::move(demand)) {
  check_atoms(supply_);
  check_atoms(demand_);
  for (std::size_t j = 0; j < supply_.size(); ++j) owner_s_.insert(owner_s_.end(), supply_[j].subdivisions, j);
  for (std::size_t k = 0; k < demand_.size(); ++k) owner_d_.insert(owner_d_.end(), demand_[k].subdivisions, k);
  g_.resize(dimension());
  for (std::size_t a = 0; a < owner_s_.size(); ++a) {
    for (std::size_t b = 0; b < owner_d_.size(); ++b) {
      double d = supply_[owner_s_[a]].x - demand_[owner_d_[b]].x;
      g_[a * owner_d_.size() + b] = std::exp(-0.5 * d * d);
    }
  }
}

ConeProblem ConeProblem::from_measures(const DiscreteMeasure& ms, const DiscreteMeasure& md, std::size_t subdivisions) {
  require_same_grid(ms, md, "ConeProblem::from_measures");
  if (subdivisions == 0) throw InputError("ConeProblem::from_measures: subdivisions must be >= 1");
  std::vector<Atom> s, d;
  for (std::size_t i = 0; i < ms.size(); ++i) {
    if (ms[i] > 0.0) s.push_back({ms.grid().center(i), ms[i], subdivisions});
    if (md[i] > 0.0) d.push_back({md.grid().center(i), md[i], subdivisions});
  }
  return {std::move(s), std::move(d)};
}

std::optional<ConeRadii> min_norm_radii(const ConeProblem& problem, std::span<const double> gamma,
                                        RadiusSystem system) {
  if (gamma.size() != problem.dimension()) throw InputError("min_norm_radii: weight vector has the wrong size");
  const std::size_t A = problem.supply_slots(), B = problem.demand_slots();
  std::vector<double> ws(A, 0.0), wd(B, 0.0);
  for (std::size_t a = 0; a < A; ++a) {
    for (std::size_t b = 0; b < B; ++b) {
      ws[a] += gamma[a * B + b];
      wd[b] += gamma[a * B + b];
    }
  }
  std::vector<std::size_t> owner_s(A), owner_d(B);
  for (std::size_t a = 0; a < A; ++a) owner_s[a] = problem.supply_owner(a);
  for (std::size_t b = 0; b < B; ++b) owner_d[b] = problem.demand_owner(b);
  ConeRadii r;
  if (!side_radii(problem.supply(), owner_s, ws, system, r.supply)) return std::nullopt;
  if (!side_radii(problem.demand(), owner_d, wd, system, r.demand)) return std::nullopt;
  return r;
}

double ss_objective(const ConeProblem& problem, std::span<const double> gamma, const ConeRadii& radii) {
  if (gamma.size() != problem.dimension() || radii.supply.size() != problem.supply_slots() ||
      radii.demand.size() != problem.demand_slots()) {
    throw InputError("ss_objective: size mismatch");
  }
  return Evaluator(problem, RadiusSystem::homogeneous).cost(gamma, radii);
}

std::uint64_t simplex_grid_size(std::size_t Q, std::size_t d) {
  if (d == 0) return 0;
  constexpr std::uint64_t kMax = std::numeric_limits<std::uint64_t>::max();
  // C(Q + i, i) = C(Q + i - 1, i - 1) * (Q + i) / i, reduced by the gcd so the
  // division stays exact.
  std::uint64_t c = 1;
  for (std::uint64_t i = 1; i < d; ++i) {
    std::uint64_t g = std::gcd(c, i);
    std::uint64_t factor = (Q + i) / (i / g);
    if (c / g > kMax / factor) return kMax;
    c = (c / g) * factor;
  }
  return c;
}

SsResult ss_exhaustive(const ConeProblem& problem, const SsConfig& cfg) {
  check_config(cfg);
  check_nonempty(problem);
  const std::size_t d = problem.dimension();
  if (d > kMaxExhaustiveDimension) {
    throw InputError("ss_exhaustive: dimension " + std::to_string(d) + " exceeds the limit of " +
                     std::to_string(kMaxExhaustiveDimension));
  }
  const std::uint64_t count = simplex_grid_size(cfg.Q, d);
  if (count > cfg.budget) {
    throw InputError("ss_exhaustive: " + std::to_string(count) + " weight vectors needed, budget is " +
                     std::to_string(cfg.budget));
  }

  Evaluator eval(problem, cfg.radii);
  SsResult best;
  best.value = kInf;
  std::vector<std::size_t> counts(d, 0);
  std::vector<double> gamma(d, 0.0);
  const double q = static_cast<double>(cfg.Q);

  // Visit compositions of Q into d parts in lexicographic order.
  auto visit = [&](auto&& self, std::size_t pos, std::size_t left) -> void {
    if (pos + 1 == d) {
      counts[pos] = left;
      for (std::size_t i = 0; i < d; ++i) gamma[i] = static_cast<double>(counts[i]) / q;
      ++best.evaluated;
      ConeRadii r;
      double v = eval(gamma, &r);
      if (v == kInf) {
        ++best.infeasible;
      } else if (v < best.value) {
        best.value = v;
        best.gamma = gamma;
        best.radii = std::move(r);
      }
      return;
    }
    for (std::size_t c = left + 1; c-- > 0;) {
      counts[pos] = c;
      self(self, pos + 1, left - c);
    }
  };
  visit(visit, 0, cfg.Q);
  if (best.value == kInf) throw NumericalError("ss_exhaustive: every weight vector gave an infeasible radii system");
  best.random_phase_value = best.value;
  return best;
}

SsResult ss_random_descent(const ConeProblem& problem, const SsConfig& cfg) {
  check_config(cfg);
  check_nonempty(problem);
  const std::size_t d = problem.dimension();
  Evaluator eval(problem, cfg.radii);
  std::mt19937_64 rng(cfg.rng_seed);
  std::uniform_int_distribution<std::size_t> level(1, cfg.Q);

  SsResult best;
  best.value = kInf;
  std::vector<double> gamma(d);
  for (std::size_t it = 0; it < cfg.n_random; ++it) {
    double total = 0.0;
    for (double& g : gamma) total += g = static_cast<double>(level(rng));
    for (double& g : gamma) g /= total;
    ++best.evaluated;
    double v = eval(gamma);
    if (v == kInf) {
      ++best.infeasible;
    } else if (v < best.value) {
      best.value = v;
      best.gamma = gamma;
    }
  }
  if (best.value == kInf) {
    // fall back to the barycenter of the simplex
    best.gamma.assign(d, 1.0 / static_cast<double>(d));
    best.value = eval(best.gamma);
    if (best.value == kInf) throw NumericalError("ss_random_descent: no feasible starting point");
  }
  best.random_phase_value = best.value;

  if (d >= 2) {
    std::uniform_int_distribution<std::size_t> first(0, d - 1), second(0, d - 2);
    const std::size_t quarter = std::max<std::size_t>(1, cfg.n_descent / 4);
    double eps = cfg.epsilon;
    std::vector<double> trial;
    for (std::size_t it = 0; it < cfg.n_descent; ++it) {
      if (it > 0 && it % quarter == 0) eps *= 0.5;
      std::size_t i = first(rng);
      std::size_t j = second(rng);
      if (j >= i) ++j;
      trial = best.gamma;
      double delta = std::min(eps, trial[i]);
      trial[i] -= delta;
      trial[j] += delta;
      ++best.evaluated;
      double v = eval(trial);
      if (v == kInf) {
        ++best.infeasible;
      } else if (v < best.value) {
        best.value = v;
        best.gamma.swap(trial);
      }
    }
  }
  best.improved_by_descent = best.value < best.random_phase_value;
  auto r = min_norm_radii(problem, best.gamma, cfg.radii);
  best.radii = std::move(*r);
  return best;
}

}  // namespace gwd
