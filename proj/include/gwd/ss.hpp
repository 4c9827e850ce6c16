#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "gwd/grid.hpp"

namespace gwd {

/// A mass at a position, split into `subdivisions` radii on the cone.
struct Atom {
  double x = 0.0;
  double mass = 0.0;
  std::size_t subdivisions = 1;
};

/// Atoms of both sides. Subdivisions are flattened atom by atom; cone weight
/// gamma(a, b) between supply subdivision a and demand subdivision b is stored
/// at index a * demand_slots() + b.
class ConeProblem {
 public:
  ConeProblem(std::vector<Atom> supply, std::vector<Atom> demand);
  /// One atom per cell with positive mass, each with the same subdivision count.
  static ConeProblem from_measures(const DiscreteMeasure& ms, const DiscreteMeasure& md, std::size_t subdivisions);

  const std::vector<Atom>& supply() const { return supply_; }
  const std::vector<Atom>& demand() const { return demand_; }
  std::size_t supply_slots() const { return owner_s_.size(); }
  std::size_t demand_slots() const { return owner_d_.size(); }
  /// Number of cone weights d.
  std::size_t dimension() const { return supply_slots() * demand_slots(); }
  std::size_t supply_owner(std::size_t a) const { return owner_s_[a]; }
  std::size_t demand_owner(std::size_t b) const { return owner_d_[b]; }
  /// e^{-|x_j - x_k|^2 / 2} for the atoms owning slots a and b.
  double kernel(std::size_t a, std::size_t b) const { return g_[a * demand_slots() + b]; }

 private:
  std::vector<Atom> supply_, demand_;
  std::vector<std::size_t> owner_s_, owner_d_;
  std::vector<double> g_;
};

struct ConeRadii {
  std::vector<double> supply;  ///< one radius per supply slot
  std::vector<double> demand;  ///< one radius per demand slot
};

enum class RadiusSystem {
  /// sum_h r_jh w_jh = m_j per atom, where w is the marginal of gamma.
  homogeneous,
  /// the homogeneous equation together with sum_h r_jh = m_j.
  joint,
};

/// Least-norm radii for fixed weights, or nullopt when the system has no
/// (non-negative) solution.
std::optional<ConeRadii> min_norm_radii(const ConeProblem& problem, std::span<const double> gamma,
                                        RadiusSystem system = RadiusSystem::homogeneous);

/// sum gamma_ab (r_a + s_b - 2 sqrt(r_a s_b) e^{-|x_a - x_b|^2/2}).
double ss_objective(const ConeProblem& problem, std::span<const double> gamma, const ConeRadii& radii);

struct SsConfig {
  std::size_t Q = 6;
  double epsilon = 0.02;
  std::size_t n_random = 1000;
  std::size_t n_descent = 1000;
  std::uint64_t rng_seed = 1;
  /// Largest number of weight vectors the exhaustive search may visit.
  std::uint64_t budget = 100'000'000;
  RadiusSystem radii = RadiusSystem::homogeneous;
};

struct SsResult {
  double value = 0.0;
  std::vector<double> gamma;
  ConeRadii radii;
  std::uint64_t evaluated = 0;
  std::uint64_t infeasible = 0;
  /// Best value after the random phase (random descent only).
  double random_phase_value = 0.0;
  bool improved_by_descent = false;
};

/// Number of weight vectors with entries i/Q summing to 1: C(Q+d-1, d-1),
/// saturating at UINT64_MAX.
std::uint64_t simplex_grid_size(std::size_t Q, std::size_t d);

/// Minimum over every weight vector on the Q-grid of the simplex (d <= 16).
SsResult ss_exhaustive(const ConeProblem& problem, const SsConfig& cfg = {});

/// Random guesses followed by pairwise mass moves of size epsilon, halved
/// every n_descent/4 iterations. Deterministic for a fixed rng_seed.
SsResult ss_random_descent(const ConeProblem& problem, const SsConfig& cfg = {});

}  // namespace gwd
