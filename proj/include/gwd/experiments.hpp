#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "gwd/ghk.hpp"
#include "gwd/grid.hpp"
#include "gwd/pr.hpp"
#include "gwd/ss.hpp"
#include "gwd/traffic.hpp"

namespace gwd::experiments {

enum class Method { w1, fg, pr, ghk, ss };

std::string_view method_name(Method m);
/// Throws InputError for unknown names.
Method parse_method(std::string_view name);
std::vector<Method> parse_methods(std::string_view comma_list);

struct MethodParams {
  PrParams pr;
  GhkParams ghk;
  double p = 1.0;
  /// SS atoms: the support of each measure is cut into this many pieces, each
  /// an atom with `ss_subdivisions` slots. Values are averaged over `ss_runs` seeds.
  std::size_t ss_atoms = 4;
  std::size_t ss_subdivisions = 4;
  std::size_t ss_runs = 10;
  SsConfig ss{1000, 0.001, 5000, 40000, 1, 100'000'000, RadiusSystem::homogeneous};
};

/// Lumps the measure into `atoms` atoms, one per equal-width slice of the
/// cells carrying mass, placed at the slice's center of mass.
std::vector<Atom> lump_atoms(const DiscreteMeasure& m, std::size_t atoms, std::size_t subdivisions);

/// One distance between two measures on the same grid. FG is evaluated on
/// copies with emptied boundary cells; W1 requires equal masses.
double distance(Method method, const DiscreteMeasure& ms, const DiscreteMeasure& md, const MethodParams& params);

/// Runs f(i) for i in [0, n) on up to `threads` workers (0 = hardware).
/// The first exception thrown by any task is rethrown.
void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& f);

struct CurveRow {
  double t = 0.0;
  Method method = Method::w1;
  double value = 0.0;
};

struct ComparisonConfig {
  double alpha = 1.0;
  double beta = 2.0;
  double eta = 1.0;
  double T = 4.0;
  std::size_t n_cells = 100;
  std::size_t samples = 41;
  std::vector<Method> methods{Method::fg, Method::pr, Method::ghk};
  MethodParams params{{2.5, 1.0, 1.0}, {1.0, 1.0}};
  std::uint64_t seed = 1;
  unsigned threads = 0;

  Grid1D grid() const;
  double time(std::size_t k) const;
  void validate() const;
};

/// Two indicator densities of heights alpha and beta and half-width eta,
/// centred at -t and +t.
std::pair<DiscreteMeasure, DiscreteMeasure> moving_indicators(const ComparisonConfig& cfg, double t);

/// Rows ordered by (t, method order in the config).
std::vector<CurveRow> run_comparison(const ComparisonConfig& cfg);
void write_comparison_csv(std::ostream& out, const ComparisonConfig& cfg, const std::vector<CurveRow>& rows);

enum class TrafficTest { traffic1, traffic2, traffic3 };

std::string_view traffic_test_name(TrafficTest t);
TrafficTest parse_traffic_test(std::string_view name);

struct ScenarioPair {
  traffic::SimulationConfig supply;
  traffic::SimulationConfig demand;
};

/// Hard-coded scenario pair for each traffic test. `seed` drives the random
/// boundary fluxes of traffic1 and is ignored otherwise.
ScenarioPair traffic_scenarios(TrafficTest test, std::uint64_t seed);

/// Default distance parameters per test (PR a = 0.5 for traffic3).
MethodParams traffic_params(TrafficTest test);

struct TrafficRow {
  double t = 0.0;
  double mass_s = 0.0;
  double mass_d = 0.0;
  Method method = Method::fg;
  double value = 0.0;
};

struct TrafficRun {
  traffic::Simulation supply;
  traffic::Simulation demand;
  std::vector<TrafficRow> rows;
};

/// Density state as a measure, masses rho_i dx.
DiscreteMeasure to_measure(const Grid1D& grid, const traffic::TrafficState& s);

/// Simulates both scenarios and evaluates the distances at every stored
/// state. Methods must be a subset of {fg, pr, ghk}.
TrafficRun run_traffic(TrafficTest test, const std::vector<Method>& methods, std::uint64_t seed,
                       const MethodParams& params, unsigned threads = 0);
void write_traffic_csv(std::ostream& out, TrafficTest test, std::uint64_t seed, const MethodParams& params,
                       const std::vector<TrafficRow>& rows);

/// Single-method checks with known values.
enum class MethodTest { fg_test1, fg_test2, pr_test1, pr_test2, ghk_test1, ss_test2 };

std::string_view method_test_name(MethodTest t);
MethodTest parse_method_test(std::string_view name);

struct MethodTestRow {
  std::string label;
  double parameter = 0.0;
  Method method = Method::fg;
  double value = 0.0;
  double reference = 0.0;  ///< NaN when no reference value is known
};

std::vector<MethodTestRow> run_method_test(MethodTest test, std::uint64_t seed);
void write_method_test_csv(std::ostream& out, MethodTest test, std::uint64_t seed,
                           const std::vector<MethodTestRow>& rows);

}  // namespace gwd::experiments
