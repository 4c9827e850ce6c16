#include "gwd/traffic.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <random>
#include <string>

#include "gwd/error.hpp"
#include "gwd/simd/kernels.hpp"

namespace gwd::traffic {
namespace {

constexpr double kVacuum = 1e-12;
constexpr double kCflSlack = 1e-12;

void check_density(double rho, const char* who) {
  if (!(rho >= 0.0 && rho <= 1.0)) throw InputError(std::string(who) + ": density outside [0, 1]");
}

std::size_t cells_of(const TrafficState& s) {
  if (s.rho.size() < 3) throw InputError("traffic: a state needs at least 3 cells");
  return s.rho.size();
}

void check_cfl(const Grid1D& grid, double dt, double speed, const char* who) {
  if (!(dt > 0.0)) throw InputError(std::string(who) + ": dt must be positive");
  if (dt * speed > grid.dx() * (1.0 + kCflSlack)) {
    throw InputError(std::string(who) + ": CFL condition violated (dt * max speed > dx)");
  }
}

}  // namespace

double flux(double rho) { return rho * (1.0 - rho); }
double v_eq(double rho) { return 1.0 - rho; }
double demand(double rho) { return flux(std::min(rho, 0.5)); }
double supply(double rho) { return flux(std::max(rho, 0.5)); }

double godunov_flux(double rho_left, double rho_right) {
  check_density(rho_left, "godunov_flux");
  check_density(rho_right, "godunov_flux");
  return std::min(demand(rho_left), supply(rho_right));
}

BoundarySpec BoundarySpec::dirichlet(double rho_in, double rho_out) {
  BoundarySpec b{BoundaryKind::dirichlet_density, {rho_in}, {rho_out}};
  b.validate();
  return b;
}

BoundarySpec BoundarySpec::fluxes(std::vector<double> flux_in, std::vector<double> flux_out) {
  BoundarySpec b{BoundaryKind::prescribed_flux, std::move(flux_in), std::move(flux_out)};
  b.validate();
  return b;
}

double BoundarySpec::left_at(std::size_t step) const { return left[std::min(step, left.size() - 1)]; }
double BoundarySpec::right_at(std::size_t step) const { return right[std::min(step, right.size() - 1)]; }

void BoundarySpec::validate() const {
  if (left.empty() || right.empty()) throw InputError("BoundarySpec: empty boundary series");
  const double hi = kind == BoundaryKind::dirichlet_density ? 1.0 : 0.25;
  for (const auto* series : {&left, &right}) {
    for (double v : *series) {
      if (!(v >= 0.0 && v <= hi)) {
        throw InputError(kind == BoundaryKind::dirichlet_density ? "BoundarySpec: densities must lie in [0, 1]"
                                                                 : "BoundarySpec: fluxes must lie in [0, 1/4]");
      }
    }
  }
}

double ArzParams::pressure(double rho) const { return v_ref / gamma * std::pow(rho, gamma); }

void ArzParams::validate() const {
  if (!(tau > 0.0) || !(gamma > 0.0) || !(v_ref > 0.0)) throw InputError("ArzParams: tau, gamma, v_ref must be positive");
}

bool TrafficLight::is_red(std::size_t step) const { return (step + offset) % (green + red) >= green; }

std::vector<double> lwr_fluxes(const TrafficState& state, const BoundarySpec& boundary, std::size_t step) {
  const std::size_t n = cells_of(state);
  std::vector<double> rho = state.rho;
  for (double r : rho) check_density(r, "lwr_fluxes");
  std::vector<double> f(n + 1, 0.0);
  simd::kernels().godunov_flux(rho.data(), rho.data() + 1, f.data() + 1, n - 1);
  if (boundary.kind == BoundaryKind::prescribed_flux) {
    // Injected fluxes are capped so that cells never leave [0, 1].
    f[0] = std::min(boundary.left_at(step), supply(rho[0]));
    f[n] = std::min(boundary.right_at(step), demand(rho[n - 1]));
  } else {
    f[0] = godunov_flux(boundary.left_at(step), rho[0]);
    f[n] = godunov_flux(rho[n - 1], boundary.right_at(step));
  }
  return f;
}

void apply_traffic_light(std::vector<double>& fluxes, const TrafficLight& light, std::size_t step) {
  if (light.interface == 0 || light.interface + 1 >= fluxes.size()) {
    throw InputError("apply_traffic_light: the light must sit on an interior interface");
  }
  if (light.is_red(step)) fluxes[light.interface] = 0.0;
}

TrafficState lwr_step(const Grid1D& grid, const TrafficState& state, const BoundarySpec& boundary, double dt,
                      std::size_t step, const std::optional<TrafficLight>& light) {
  const std::size_t n = cells_of(state);
  if (n != grid.size()) throw InputError("lwr_step: state does not match the grid");
  check_cfl(grid, dt, 1.0, "lwr_step");
  std::vector<double> f = lwr_fluxes(state, boundary, step);
  if (light) apply_traffic_light(f, *light, step);

  TrafficState next{state.t + dt, state.rho, {}};
  const double ratio = dt / grid.dx();
  const bool dirichlet = boundary.kind == BoundaryKind::dirichlet_density;
  const std::size_t first = dirichlet ? 1 : 0;
  const std::size_t last = dirichlet ? n - 1 : n;
  for (std::size_t i = first; i < last; ++i) {
    double r = state.rho[i] - ratio * (f[i + 1] - f[i]);
    // Round-off may step a hair outside the invariant interval.
    next.rho[i] = std::clamp(r, 0.0, 1.0);
  }
  if (dirichlet) {
    next.rho[0] = boundary.left_at(step + 1);
    next.rho[n - 1] = boundary.right_at(step + 1);
  }
  return next;
}

ArzFluxes arz_fluxes(const Grid1D& grid, const TrafficState& state, const ArzParams& params, double dt,
                     std::size_t step, const std::optional<TrafficLight>& light) {
  const std::size_t n = cells_of(state);
  if (state.v.size() != n) throw InputError("arz_fluxes: state has no velocity field");
  std::vector<double> y(n), frho(n), fy(n);
  for (std::size_t i = 0; i < n; ++i) {
    y[i] = state.rho[i] * (state.v[i] + params.pressure(state.rho[i]));
    frho[i] = state.rho[i] * state.v[i];
    fy[i] = y[i] * state.v[i];
  }
  const double visc = grid.dx() / (2.0 * dt);
  ArzFluxes out{std::vector<double>(n + 1, 0.0), std::vector<double>(n + 1, 0.0)};
  for (std::size_t i = 1; i < n; ++i) {
    out.rho[i] = 0.5 * (frho[i - 1] + frho[i]) - visc * (state.rho[i] - state.rho[i - 1]);
    out.y[i] = 0.5 * (fy[i - 1] + fy[i]) - visc * (y[i] - y[i - 1]);
  }
  if (light && light->is_red(step)) {
    if (light->interface == 0 || light->interface >= n) throw InputError("arz_fluxes: light must sit on an interior interface");
    out.rho[light->interface] = 0.0;
    out.y[light->interface] = 0.0;
  }
  return out;
}

TrafficState arz_step(const Grid1D& grid, const TrafficState& state, const ArzParams& params,
                      const BoundarySpec& boundary, double dt, std::size_t step,
                      const std::optional<TrafficLight>& light) {
  params.validate();
  const std::size_t n = cells_of(state);
  if (n != grid.size()) throw InputError("arz_step: state does not match the grid");
  if (boundary.kind != BoundaryKind::dirichlet_density) throw InputError("arz_step: only Dirichlet boundaries are supported");
  check_cfl(grid, dt, std::max(1.0, params.v_ref), "arz_step");
  if (dt > params.tau) throw InputError("arz_step: dt must not exceed the relaxation time tau");

  ArzFluxes f = arz_fluxes(grid, state, params, dt, step, light);
  const double ratio = dt / grid.dx();
  TrafficState next{state.t + dt, state.rho, state.v};
  for (std::size_t i = 1; i + 1 < n; ++i) {
    double rho = state.rho[i] - ratio * (f.rho[i + 1] - f.rho[i]);
    double y = state.rho[i] * (state.v[i] + params.pressure(state.rho[i])) - ratio * (f.y[i + 1] - f.y[i]);
    if (rho < 0.0) {
      if (rho > -kVacuum) {
        rho = 0.0;
      } else {
        throw NumericalError("arz_step: negative density; reduce dt or increase tau");
      }
    }
    double v = rho < kVacuum ? v_eq(rho) : y / rho - params.pressure(rho);
    v += dt / params.tau * (v_eq(rho) - v);
    next.rho[i] = rho;
    next.v[i] = v;
  }
  double rin = boundary.left_at(step + 1), rout = boundary.right_at(step + 1);
  next.rho[0] = rin;
  next.v[0] = v_eq(rin);
  next.rho[n - 1] = rout;
  next.v[n - 1] = v_eq(rout);
  return next;
}

std::size_t SimulationConfig::steps() const {
  return static_cast<std::size_t>(std::llround((T - t0) / dt));
}

Grid1D SimulationConfig::grid() const { return Grid1D(x_min, x_max, n_cells); }

void SimulationConfig::validate() const {
  Grid1D g = grid();
  if (!(T > t0)) throw InputError("SimulationConfig: T must exceed t0");
  if (!(dt > 0.0)) throw InputError("SimulationConfig: dt must be positive");
  if (std::abs(static_cast<double>(steps()) * dt - (T - t0)) > 1e-9 * (T - t0)) {
    throw InputError("SimulationConfig: (T - t0) must be a whole number of steps");
  }
  if (sample_every == 0) throw InputError("SimulationConfig: sample_every must be >= 1");
  boundary.validate();
  if (!rho0) throw InputError("SimulationConfig: missing initial density");
  if (light) {
    if (light->interface == 0 || light->interface >= n_cells) throw InputError("SimulationConfig: light interface out of range");
    if (light->green == 0 || light->red == 0) throw InputError("SimulationConfig: light phases must be >= 1 step");
  }
  if (model == Model::lwr) {
    check_cfl(g, dt, 1.0, "SimulationConfig");
  } else {
    arz.validate();
    if (boundary.kind != BoundaryKind::dirichlet_density) throw InputError("SimulationConfig: ARZ needs Dirichlet boundaries");
    check_cfl(g, dt, std::max(1.0, arz.v_ref), "SimulationConfig");
    if (dt > arz.tau) throw InputError("SimulationConfig: dt must not exceed tau");
  }
}

Simulation run_simulation(const SimulationConfig& config) {
  config.validate();
  Simulation sim{config.grid(), {}, {}};
  const std::size_t n = config.n_cells;
  TrafficState s;
  s.t = config.t0;
  s.rho.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    s.rho[i] = config.rho0(sim.grid.center(i));
    check_density(s.rho[i], "run_simulation (initial data)");
  }
  if (config.boundary.kind == BoundaryKind::dirichlet_density) {
    s.rho[0] = config.boundary.left_at(0);
    s.rho[n - 1] = config.boundary.right_at(0);
  }
  if (config.model == Model::arz) {
    s.v.resize(n);
    for (std::size_t i = 0; i < n; ++i) s.v[i] = config.v0 ? config.v0(sim.grid.center(i)) : v_eq(s.rho[i]);
    s.v[0] = v_eq(s.rho[0]);
    s.v[n - 1] = v_eq(s.rho[n - 1]);
  }

  const std::size_t steps = config.steps();
  sim.states.push_back(s);
  sim.step_of_state.push_back(0);
  for (std::size_t k = 0; k < steps; ++k) {
    s = config.model == Model::lwr ? lwr_step(sim.grid, s, config.boundary, config.dt, k, config.light)
                                   : arz_step(sim.grid, s, config.arz, config.boundary, config.dt, k, config.light);
    // keep t exact rather than accumulated
    s.t = config.t0 + static_cast<double>(k + 1) * config.dt;
    if ((k + 1) % config.sample_every == 0 || k + 1 == steps) {
      sim.states.push_back(s);
      sim.step_of_state.push_back(k + 1);
    }
  }
  return sim;
}

std::vector<double> random_fluxes(std::size_t steps, double max_flux, std::uint64_t seed) {
  if (!(max_flux >= 0.0 && max_flux <= 0.25)) throw InputError("random_fluxes: max flux must lie in [0, 1/4]");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, max_flux);
  std::vector<double> f(std::max<std::size_t>(steps, 1));
  for (double& v : f) v = max_flux > 0.0 ? u(rng) : 0.0;
  return f;
}

namespace {

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    double d = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw InputError("config: key '" + key + "' expects a number, got '" + v + "'");
  }
}

std::size_t to_count(const std::string& key, const std::string& v) {
  double d = to_double(key, v);
  if (d < 0.0 || d != std::floor(d)) throw InputError("config: key '" + key + "' expects a non-negative integer");
  return static_cast<std::size_t>(d);
}

}  // namespace

SimulationConfig parse_simulation_config(std::istream& in) {
  std::map<std::string, std::string> kv;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) throw InputError("config: line " + std::to_string(lineno) + " is not key = value");
    kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  static const char* known[] = {"model", "x_min", "x_max", "n_cells", "dt", "t0", "T", "bc_kind", "rho_in",
                                "rho_out", "flux_in", "flux_out", "flux_in_max", "flux_out_max", "seed", "tau",
                                "gamma", "v_ref", "rho0", "rho0_bump", "rho0_bump_lo", "rho0_bump_hi",
                                "sample_every", "light_interface", "light_green", "light_red", "light_offset"};
  for (const auto& [k, v] : kv) {
    if (std::find_if(std::begin(known), std::end(known), [&](const char* s) { return k == s; }) == std::end(known)) {
      throw InputError("config: unknown key '" + k + "'");
    }
  }
  auto num = [&](const char* k, double dflt) { return kv.count(k) ? to_double(k, kv[k]) : dflt; };
  auto cnt = [&](const char* k, std::size_t dflt) { return kv.count(k) ? to_count(k, kv[k]) : dflt; };

  SimulationConfig c;
  std::string model = kv.count("model") ? kv["model"] : "lwr";
  if (model == "lwr") {
    c.model = Model::lwr;
  } else if (model == "arz") {
    c.model = Model::arz;
  } else {
    throw InputError("config: model must be lwr or arz");
  }
  c.x_min = num("x_min", c.x_min);
  c.x_max = num("x_max", c.x_max);
  c.n_cells = cnt("n_cells", c.n_cells);
  c.dt = num("dt", c.dt);
  c.t0 = num("t0", c.t0);
  c.T = num("T", c.T);
  c.sample_every = cnt("sample_every", 1);
  c.arz = {num("tau", c.arz.tau), num("gamma", c.arz.gamma), num("v_ref", c.arz.v_ref)};

  std::string bc = kv.count("bc_kind") ? kv["bc_kind"] : "dirichlet";
  if (bc == "dirichlet") {
    c.boundary = BoundarySpec::dirichlet(num("rho_in", 0.0), num("rho_out", 0.0));
  } else if (bc == "flux") {
    const std::size_t steps = c.dt > 0.0 && c.T > c.t0 ? c.steps() : 1;
    const auto seed = static_cast<std::uint64_t>(cnt("seed", 1));
    auto series = [&](const char* fixed, const char* max, std::uint64_t s) {
      if (kv.count(max)) return random_fluxes(steps, num(max, 0.0), s);
      return std::vector<double>{num(fixed, 0.0)};
    };
    c.boundary = BoundarySpec::fluxes(series("flux_in", "flux_in_max", seed), series("flux_out", "flux_out_max", seed + 1));
  } else {
    throw InputError("config: bc_kind must be dirichlet or flux");
  }

  double base = num("rho0", 0.0);
  if (kv.count("rho0_bump")) {
    double bump = num("rho0_bump", 0.0), lo = num("rho0_bump_lo", 0.0), hi = num("rho0_bump_hi", 0.0);
    c.rho0 = [=](double x) { return x >= lo && x <= hi ? bump : base; };
  } else {
    c.rho0 = [=](double) { return base; };
  }
  if (kv.count("light_interface")) {
    c.light = TrafficLight{cnt("light_interface", 1), cnt("light_green", 1), cnt("light_red", 1), cnt("light_offset", 0)};
  }
  c.validate();
  return c;
}

SimulationConfig parse_simulation_config(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw InputError("config: cannot open " + path.string());
  return parse_simulation_config(f);
}

void write_time_series_csv(std::ostream& out, const Simulation& sim) {
  const bool with_v = !sim.states.empty() && !sim.states.front().v.empty();
  out << (with_v ? "t,x,rho,v\n" : "t,x,rho\n") << std::setprecision(12);
  for (const TrafficState& s : sim.states) {
    for (std::size_t i = 0; i < s.rho.size(); ++i) {
      out << s.t << ',' << sim.grid.center(i) << ',' << s.rho[i];
      if (with_v) out << ',' << s.v[i];
      out << '\n';
    }
  }
}

}  // namespace gwd::traffic
