#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <vector>

#include "gwd/grid.hpp"

namespace gwd::traffic {

// Fundamental diagram f(rho) = rho (1 - rho) with rho_max = 1.
double flux(double rho);
double v_eq(double rho);
/// Largest flux a cell can send downstream, f(min(rho, 1/2)).
double demand(double rho);
/// Largest flux a cell can receive from upstream, f(max(rho, 1/2)).
double supply(double rho);
/// Godunov flux of f between left and right states; throws outside [0, 1].
double godunov_flux(double rho_left, double rho_right);

struct TrafficState {
  double t = 0.0;
  std::vector<double> rho;
  std::vector<double> v;  ///< empty for first-order states
};

enum class BoundaryKind { dirichlet_density, prescribed_flux };

/// Per-step boundary data. A series of length one is constant in time.
struct BoundarySpec {
  BoundaryKind kind = BoundaryKind::dirichlet_density;
  std::vector<double> left{0.0};
  std::vector<double> right{0.0};

  static BoundarySpec dirichlet(double rho_in, double rho_out);
  static BoundarySpec fluxes(std::vector<double> flux_in, std::vector<double> flux_out);
  double left_at(std::size_t step) const;
  double right_at(std::size_t step) const;
  void validate() const;
};

struct ArzParams {
  double tau = 0.05;
  double gamma = 2.0;
  double v_ref = 1.0;

  double pressure(double rho) const;
  void validate() const;
};

/// Light on the interface between cells interface-1 and interface (1 <= interface <= N-1).
/// Each cycle starts with `green` green steps followed by `red` red steps.
struct TrafficLight {
  std::size_t interface = 1;
  std::size_t green = 1;
  std::size_t red = 1;
  std::size_t offset = 0;

  bool is_red(std::size_t step) const;
};

/// Interface fluxes F_0..F_N, where F_i separates cells i-1 and i. With
/// Dirichlet data the first and last cells are held fixed and only F_1..F_{N-1}
/// are used.
std::vector<double> lwr_fluxes(const TrafficState& state, const BoundarySpec& boundary, std::size_t step);

/// Zeroes the flux at the light's interface during red steps.
void apply_traffic_light(std::vector<double>& fluxes, const TrafficLight& light, std::size_t step);

/// Godunov step rho_i -= dt/dx (F_{i+1} - F_i). Requires dt <= dx.
TrafficState lwr_step(const Grid1D& grid, const TrafficState& state, const BoundarySpec& boundary, double dt,
                      std::size_t step, const std::optional<TrafficLight>& light = std::nullopt);

/// Lax-Friedrichs interface fluxes of (rho, rho w) for a second-order state,
/// with the light applied.
struct ArzFluxes {
  std::vector<double> rho;
  std::vector<double> y;
};
ArzFluxes arz_fluxes(const Grid1D& grid, const TrafficState& state, const ArzParams& params, double dt,
                     std::size_t step, const std::optional<TrafficLight>& light = std::nullopt);

/// Lax-Friedrichs step on (rho, rho w) followed by explicit relaxation of v
/// towards v_eq. Dirichlet boundaries only. Requires dt max(1, v_ref) <= dx
/// and dt <= tau.
TrafficState arz_step(const Grid1D& grid, const TrafficState& state, const ArzParams& params,
                      const BoundarySpec& boundary, double dt, std::size_t step,
                      const std::optional<TrafficLight>& light = std::nullopt);

enum class Model { lwr, arz };

struct SimulationConfig {
  Model model = Model::lwr;
  double x_min = 0.0;
  double x_max = 1.0;
  std::size_t n_cells = 100;
  double dt = 0.01;
  double t0 = 0.0;
  double T = 1.0;
  BoundarySpec boundary;
  ArzParams arz;
  std::optional<TrafficLight> light;
  std::function<double(double)> rho0 = [](double) { return 0.0; };
  /// Initial velocity; v_eq(rho0) when empty.
  std::function<double(double)> v0;
  /// Keep every k-th state (the final state is always kept).
  std::size_t sample_every = 1;

  std::size_t steps() const;
  Grid1D grid() const;
  /// Throws InputError on invalid values, including CFL violations.
  void validate() const;
};

struct Simulation {
  Grid1D grid;
  std::vector<TrafficState> states;
  std::vector<std::size_t> step_of_state;
};

Simulation run_simulation(const SimulationConfig& config);

/// Boundary flux series drawn uniformly from [0, max] once per step.
std::vector<double> random_fluxes(std::size_t steps, double max_flux, std::uint64_t seed);

/// Flat `key = value` file; '#' starts a comment. Keys: model, x_min, x_max,
/// n_cells, dt, t0, T, bc_kind (dirichlet|flux), rho_in, rho_out, flux_in,
/// flux_out, flux_in_max, flux_out_max, seed, tau, gamma, v_ref, rho0,
/// rho0_bump, rho0_bump_lo, rho0_bump_hi, sample_every, light_interface,
/// light_green, light_red, light_offset.
SimulationConfig parse_simulation_config(std::istream& in);
SimulationConfig parse_simulation_config(const std::filesystem::path& path);

/// CSV `t,x,rho[,v]`, one row per cell and stored state.
void write_time_series_csv(std::ostream& out, const Simulation& sim);

}  // namespace gwd::traffic
