#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include "gwd/error.hpp"
#include "gwd/traffic.hpp"

using namespace gwd;
using namespace gwd::traffic;

namespace {

double sum(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0); }

double l1(const std::vector<double>& a, const std::vector<double>& b, double dx) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]);
  return s * dx;
}

// Brute-force Godunov flux: min/max of f over the interval between the states.
double godunov_brute(double l, double r) {
  double lo = std::min(l, r), hi = std::max(l, r), best = l <= r ? 1e300 : -1e300;
  for (int k = 0; k <= 20000; ++k) {
    double u = lo + (hi - lo) * k / 20000.0;
    best = l <= r ? std::min(best, flux(u)) : std::max(best, flux(u));
  }
  if (l > r && 0.5 > lo && 0.5 < hi) best = std::max(best, 0.25);
  return best;
}

SimulationConfig arz_bump(double tau) {
  SimulationConfig c;
  c.model = Model::arz;
  c.x_min = 0.0;
  c.x_max = 4.0;
  c.n_cells = 200;
  c.dt = 0.01;
  c.T = 1.0;
  c.arz = {tau, 2.0, 1.0};
  c.boundary = BoundarySpec::dirichlet(0.0, 0.0);
  c.rho0 = [](double x) { return x >= 1.6 && x <= 2.4 ? 0.7 : 0.1; };
  return c;
}

}  // namespace

TEST_CASE("godunov flux closed values") {
  CHECK(godunov_flux(0.2, 0.2) == doctest::Approx(0.16).epsilon(1e-15));
  CHECK(godunov_flux(0.0, 1.0) == 0.0);
  CHECK(godunov_flux(1.0, 0.0) == doctest::Approx(0.25));
  CHECK(godunov_flux(0.3, 0.8) == doctest::Approx(0.16));
  CHECK_THROWS_AS(godunov_flux(-0.1, 0.2), InputError);
  CHECK_THROWS_AS(godunov_flux(0.2, 1.1), InputError);
}

TEST_CASE("godunov flux matches the min/max definition") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < 200; ++k) {
    double l = u(rng), r = u(rng);
    CHECK(godunov_flux(l, r) == doctest::Approx(godunov_brute(l, r)).epsilon(1e-7));
  }
}

TEST_CASE("constant state is stationary") {
  Grid1D g(0.0, 1.0, 50);
  TrafficState s{0.0, std::vector<double>(50, 0.3), {}};
  auto b = BoundarySpec::dirichlet(0.3, 0.3);
  TrafficState n = lwr_step(g, s, b, 0.01, 0);
  for (double r : n.rho) CHECK(r == doctest::Approx(0.3).epsilon(1e-15));
}

TEST_CASE("lwr mass balance telescopes") {
  Grid1D g(0.0, 2.0, 80);
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  TrafficState s{0.0, std::vector<double>(80), {}};
  for (double& r : s.rho) r = u(rng);
  auto b = BoundarySpec::fluxes(random_fluxes(50, 0.25, 1), random_fluxes(50, 0.2, 2));
  const double dt = 0.02;
  for (std::size_t k = 0; k < 50; ++k) {
    auto f = lwr_fluxes(s, b, k);
    TrafficState n = lwr_step(g, s, b, dt, k);
    double expected = sum(s.rho) * g.dx() + dt * (f.front() - f.back());
    CHECK(sum(n.rho) * g.dx() == doctest::Approx(expected).epsilon(1e-12));
    for (double r : n.rho) {
      CHECK(r >= 0.0);
      CHECK(r <= 1.0);
    }
    s = n;
  }
}

TEST_CASE("riemann problem: jam behind empty road stays put at zero flux") {
  Grid1D g(0.0, 1.0, 20);
  TrafficState s{0.0, std::vector<double>(20, 0.0), {}};
  for (std::size_t i = 10; i < 20; ++i) s.rho[i] = 1.0;
  auto b = BoundarySpec::dirichlet(0.0, 1.0);
  TrafficState n = lwr_step(g, s, b, 0.05, 0);
  CHECK(n.rho == s.rho);

  // the opposite jump opens a rarefaction
  std::reverse(s.rho.begin(), s.rho.end());
  n = lwr_step(g, s, BoundarySpec::dirichlet(1.0, 0.0), 0.05, 0);
  CHECK(n.rho[9] < 1.0);
  CHECK(n.rho[10] > 0.0);
}

TEST_CASE("maximum principle under dirichlet data") {
  SimulationConfig c;
  c.x_max = 4.0;
  c.n_cells = 100;
  c.dt = 0.025;
  c.T = 5.0;
  c.boundary = BoundarySpec::dirichlet(0.4, 0.0);
  c.rho0 = [](double x) { return x < 2.0 ? 0.2 : 0.7; };
  Simulation sim = run_simulation(c);
  for (const auto& st : sim.states)
    for (double r : st.rho) {
      CHECK(r >= 0.0);
      CHECK(r <= 0.7 + 1e-14);
    }
}

TEST_CASE("traffic light blocks the interface on red") {
  TrafficLight light{5, 3, 2, 0};
  CHECK_FALSE(light.is_red(0));
  CHECK_FALSE(light.is_red(2));
  CHECK(light.is_red(3));
  CHECK(light.is_red(4));
  CHECK_FALSE(light.is_red(5));
  TrafficLight shifted{5, 3, 2, 3};
  CHECK(shifted.is_red(0));

  Grid1D g(0.0, 1.0, 10);
  TrafficState s{0.0, std::vector<double>(10, 0.3), {}};
  auto b = BoundarySpec::dirichlet(0.3, 0.3);
  auto f = lwr_fluxes(s, b, 3);
  apply_traffic_light(f, light, 3);
  CHECK(f[5] == 0.0);
  TrafficState n = lwr_step(g, s, b, 0.05, 3, light);
  CHECK(n.rho[4] > 0.3);
  CHECK(n.rho[5] < 0.3);
  n = lwr_step(g, s, b, 0.05, 0, light);
  CHECK(n.rho[4] == doctest::Approx(0.3));
}

TEST_CASE("permanent red light accumulates mass upstream") {
  SimulationConfig c;
  c.x_max = 4.0;
  c.n_cells = 100;
  c.dt = 0.025;
  c.T = 10.0;
  c.boundary = BoundarySpec::dirichlet(0.4, 0.0);
  c.light = TrafficLight{50, 1, 1000000, 1};
  Simulation sim = run_simulation(c);
  const auto& last = sim.states.back().rho;
  double downstream = 0.0;
  for (std::size_t i = 50; i < 100; ++i) downstream += last[i];
  CHECK(downstream == 0.0);
  CHECK(last[49] == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("arz equilibrium constant state is preserved") {
  Grid1D g(0.0, 1.0, 40);
  ArzParams p;
  TrafficState s{0.0, std::vector<double>(40, 0.35), std::vector<double>(40, v_eq(0.35))};
  TrafficState n = arz_step(g, s, p, BoundarySpec::dirichlet(0.35, 0.35), 0.01, 0);
  for (std::size_t i = 0; i < 40; ++i) {
    CHECK(n.rho[i] == doctest::Approx(0.35).epsilon(1e-13));
    CHECK(n.v[i] == doctest::Approx(v_eq(0.35)).epsilon(1e-13));
  }
}

TEST_CASE("arz interior mass changes only through the boundary fluxes") {
  SimulationConfig c = arz_bump(0.05);
  Grid1D g = c.grid();
  Simulation sim = run_simulation(c);
  for (std::size_t k = 0; k + 1 < sim.states.size(); ++k) {
    const auto& s = sim.states[k];
    auto f = arz_fluxes(g, s, c.arz, c.dt, k);
    double before = 0.0, after = 0.0;
    for (std::size_t i = 1; i + 1 < s.rho.size(); ++i) {
      before += s.rho[i];
      after += sim.states[k + 1].rho[i];
    }
    double n = static_cast<double>(s.rho.size());
    CHECK(after * g.dx() ==
          doctest::Approx(before * g.dx() + c.dt * (f.rho[1] - f.rho[static_cast<std::size_t>(n) - 1])).epsilon(1e-12));
  }
}

TEST_CASE("arz approaches the first-order model as tau shrinks") {
  // Reference: Lax-Friedrichs on rho alone with f = rho (1 - rho).
  SimulationConfig base = arz_bump(0.05);
  Grid1D g = base.grid();
  std::vector<double> rho(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) rho[i] = base.rho0(g.center(i));
  rho.front() = rho.back() = 0.0;
  const double visc = g.dx() / (2.0 * base.dt), ratio = base.dt / g.dx();
  for (std::size_t k = 0; k < base.steps(); ++k) {
    std::vector<double> f(g.size() + 1, 0.0), next = rho;
    for (std::size_t i = 1; i < g.size(); ++i)
      f[i] = 0.5 * (flux(rho[i - 1]) + flux(rho[i])) - visc * (rho[i] - rho[i - 1]);
    for (std::size_t i = 1; i + 1 < g.size(); ++i) next[i] = rho[i] - ratio * (f[i + 1] - f[i]);
    rho = next;
  }
  double prev = 1e300;
  for (double tau : {0.4, 0.2, 0.1, 0.05}) {
    Simulation sim = run_simulation(arz_bump(tau));
    double gap = l1(sim.states.back().rho, rho, g.dx());
    CHECK(gap < prev);
    prev = gap;
  }
  CHECK(prev < 0.05);
}

TEST_CASE("arz rejects unstable or unsupported setups") {
  SimulationConfig c = arz_bump(0.05);
  c.dt = 0.06;
  CHECK_THROWS_AS(c.validate(), InputError);
  c = arz_bump(0.005);
  CHECK_THROWS_AS(c.validate(), InputError);
  c = arz_bump(0.05);
  c.boundary = BoundarySpec::fluxes({0.1}, {0.1});
  CHECK_THROWS_AS(c.validate(), InputError);
  Grid1D g(0.0, 1.0, 10);
  TrafficState s{0.0, std::vector<double>(10, 0.3), std::vector<double>(10, 0.7)};
  CHECK_THROWS_AS(arz_step(g, s, ArzParams{}, BoundarySpec::fluxes({0.1}, {0.1}), 0.01, 0), InputError);
}

TEST_CASE("lwr rejects CFL violations and bad boundary data") {
  SimulationConfig c;
  c.n_cells = 10;
  c.dt = 0.2;
  CHECK_THROWS_AS(c.validate(), InputError);
  CHECK_THROWS_AS(BoundarySpec::dirichlet(1.2, 0.0), InputError);
  CHECK_THROWS_AS(BoundarySpec::fluxes({0.3}, {0.0}), InputError);
  CHECK_THROWS_AS(BoundarySpec::fluxes({}, {0.0}), InputError);
  c.dt = 0.05;
  c.T = 1.01;
  CHECK_THROWS_AS(c.validate(), InputError);
}

TEST_CASE("simulation sampling and determinism") {
  SimulationConfig c;
  c.x_max = 40.0;
  c.n_cells = 100;
  c.t0 = -10.0;
  c.T = 30.0;
  c.dt = 0.25;
  c.sample_every = 10;
  c.rho0 = [](double) { return 0.2; };
  c.boundary = BoundarySpec::fluxes(random_fluxes(160, 0.25, 7), random_fluxes(160, 0.16, 8));
  Simulation a = run_simulation(c), b = run_simulation(c);
  REQUIRE(a.states.size() == 17);
  CHECK(a.states.front().t == -10.0);
  CHECK(a.states.back().t == doctest::Approx(30.0));
  CHECK(a.step_of_state[4] == 40);
  for (std::size_t k = 0; k < a.states.size(); ++k) CHECK(a.states[k].rho == b.states[k].rho);
  CHECK(random_fluxes(5, 0.1, 3) == random_fluxes(5, 0.1, 3));
  CHECK(random_fluxes(5, 0.1, 3) != random_fluxes(5, 0.1, 4));
}

TEST_CASE("config parsing") {
  std::istringstream in(R"(# bump test
model = arz
x_min = 0
x_max = 4
n_cells = 200
dt = 0.01   # step
T = 0.5
tau = 0.05
rho0 = 0.1
rho0_bump = 0.7
rho0_bump_lo = 1.6
rho0_bump_hi = 2.4
sample_every = 5
)");
  SimulationConfig c = parse_simulation_config(in);
  CHECK(c.model == Model::arz);
  CHECK(c.n_cells == 200);
  CHECK(c.steps() == 50);
  CHECK(c.rho0(2.0) == 0.7);
  CHECK(c.rho0(0.5) == 0.1);
  Simulation sim = run_simulation(c);
  CHECK(sim.states.size() == 11);

  std::istringstream flux_cfg("bc_kind = flux\nflux_in_max = 0.25\nflux_out = 0.1\nn_cells = 10\ndt = 0.05\n"
                              "light_interface = 5\nlight_green = 2\nlight_red = 3\n");
  c = parse_simulation_config(flux_cfg);
  CHECK(c.boundary.kind == BoundaryKind::prescribed_flux);
  CHECK(c.boundary.left.size() == 20);
  CHECK(c.boundary.right_at(7) == 0.1);
  REQUIRE(c.light);
  CHECK(c.light->red == 3);

  std::istringstream unknown("speed = 3\n");
  CHECK_THROWS_AS(parse_simulation_config(unknown), InputError);
  std::istringstream garbage("dt = fast\n");
  CHECK_THROWS_AS(parse_simulation_config(garbage), InputError);
  std::istringstream noeq("dt 0.1\n");
  CHECK_THROWS_AS(parse_simulation_config(noeq), InputError);
}

TEST_CASE("time series csv") {
  SimulationConfig c;
  c.n_cells = 4;
  c.dt = 0.1;
  c.T = 0.2;
  c.boundary = BoundarySpec::dirichlet(0.5, 0.0);
  Simulation sim = run_simulation(c);
  std::ostringstream out;
  write_time_series_csv(out, sim);
  std::istringstream lines(out.str());
  std::string line;
  std::getline(lines, line);
  CHECK(line == "t,x,rho");
  int rows = 0;
  while (std::getline(lines, line)) ++rows;
  CHECK(rows == 12);
}
