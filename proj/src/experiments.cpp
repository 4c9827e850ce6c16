#include "gwd/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <iomanip>
#include <limits>
#include <mutex>
#include <numeric>
#include <ostream>
#include <thread>

#include "gwd/error.hpp"
#include "gwd/fg.hpp"
#include "gwd/wasserstein.hpp"

namespace gwd::experiments {
namespace {

constexpr std::pair<Method, std::string_view> kMethodNames[] = {
    {Method::w1, "w1"}, {Method::fg, "fg"}, {Method::pr, "pr"}, {Method::ghk, "ghk"}, {Method::ss, "ss"}};

constexpr std::pair<TrafficTest, std::string_view> kTrafficNames[] = {
    {TrafficTest::traffic1, "traffic1"}, {TrafficTest::traffic2, "traffic2"}, {TrafficTest::traffic3, "traffic3"}};

constexpr std::pair<MethodTest, std::string_view> kMethodTestNames[] = {
    {MethodTest::fg_test1, "fg_test1"}, {MethodTest::fg_test2, "fg_test2"}, {MethodTest::pr_test1, "pr_test1"},
    {MethodTest::pr_test2, "pr_test2"}, {MethodTest::ghk_test1, "ghk_test1"}, {MethodTest::ss_test2, "ss_test2"}};

template <class E, std::size_t N>
std::string_view name_of(const std::pair<E, std::string_view> (&table)[N], E e) {
  for (const auto& [k, v] : table)
    if (k == e) return v;
  return "?";
}

template <class E, std::size_t N>
E parse_name(const std::pair<E, std::string_view> (&table)[N], std::string_view s, const char* what) {
  for (const auto& [k, v] : table)
    if (v == s) return k;
  std::string known;
  for (const auto& [k, v] : table) known += (known.empty() ? "" : ", ") + std::string(v);
  throw InputError(std::string("unknown ") + what + " '" + std::string(s) + "' (expected one of " + known + ")");
}

void set_precision(std::ostream& out) { out << std::setprecision(12); }

double ss_average(const DiscreteMeasure& ms, const DiscreteMeasure& md, const MethodParams& params) {
  ConeProblem problem(lump_atoms(ms, params.ss_atoms, params.ss_subdivisions),
                      lump_atoms(md, params.ss_atoms, params.ss_subdivisions));
  const std::size_t runs = std::max<std::size_t>(params.ss_runs, 1);
  double sum = 0.0;
  for (std::size_t r = 0; r < runs; ++r) {
    SsConfig cfg = params.ss;
    cfg.rng_seed = params.ss.rng_seed + r;
    sum += ss_random_descent(problem, cfg).value;
  }
  return sum / static_cast<double>(runs);
}

DiscreteMeasure atoms_on(const Grid1D& g, std::initializer_list<std::pair<double, double>> list) {
  std::vector<double> m(g.size(), 0.0);
  for (auto [x, mass] : list) m[g.cell_of(x)] += mass;
  return DiscreteMeasure(g, m);
}

DiscreteMeasure indicator(const Grid1D& g, double lo, double hi, double height) {
  return discretize([=](double x) { return x >= lo && x <= hi ? height : 0.0; }, g);
}

double hg(double ms, double md, double dist) {
  return ms + md - 2.0 * std::sqrt(ms * md) * std::exp(-dist * dist / 2.0);
}

}  // namespace

std::string_view method_name(Method m) { return name_of(kMethodNames, m); }
Method parse_method(std::string_view name) { return parse_name(kMethodNames, name, "method"); }

std::vector<Method> parse_methods(std::string_view list) {
  std::vector<Method> out;
  std::size_t start = 0;
  while (start <= list.size()) {
    std::size_t comma = list.find(',', start);
    if (comma == std::string_view::npos) comma = list.size();
    std::string_view item = list.substr(start, comma - start);
    if (!item.empty()) {
      Method m = parse_method(item);
      if (std::find(out.begin(), out.end(), m) == out.end()) out.push_back(m);
    }
    start = comma + 1;
  }
  if (out.empty()) throw InputError("empty method list");
  return out;
}

std::string_view traffic_test_name(TrafficTest t) { return name_of(kTrafficNames, t); }
TrafficTest parse_traffic_test(std::string_view name) { return parse_name(kTrafficNames, name, "traffic test"); }
std::string_view method_test_name(MethodTest t) { return name_of(kMethodTestNames, t); }
MethodTest parse_method_test(std::string_view name) { return parse_name(kMethodTestNames, name, "experiment"); }

std::vector<Atom> lump_atoms(const DiscreteMeasure& m, std::size_t atoms, std::size_t subdivisions) {
  if (atoms == 0 || subdivisions == 0) throw InputError("lump_atoms: atoms and subdivisions must be >= 1");
  std::size_t first = m.size(), last = 0;
  for (std::size_t i = 0; i < m.size(); ++i) {
    if (m[i] > 0.0) {
      first = std::min(first, i);
      last = i;
    }
  }
  std::vector<Atom> out;
  if (first == m.size()) return out;
  const std::size_t cells = last - first + 1;
  const std::size_t pieces = std::min(atoms, cells);
  for (std::size_t p = 0; p < pieces; ++p) {
    std::size_t lo = first + p * cells / pieces, hi = first + (p + 1) * cells / pieces;
    double mass = 0.0, moment = 0.0;
    for (std::size_t i = lo; i < hi; ++i) {
      mass += m[i];
      moment += m[i] * m.grid().center(i);
    }
    if (mass > 0.0) out.push_back({moment / mass, mass, subdivisions});
  }
  return out;
}

double distance(Method method, const DiscreteMeasure& ms, const DiscreteMeasure& md, const MethodParams& params) {
  switch (method) {
    case Method::w1:
      return params.p == 1.0 ? w1_cdf(ms, md) : w1_lp(ms, md, params.p).distance;
    case Method::fg:
      return fg_distance(ms.with_empty_boundary(), md.with_empty_boundary(), params.p).value;
    case Method::pr: {
      PrParams pr = params.pr;
      pr.p = params.p;
      return pr_distance(ms, md, pr).value;
    }
    case Method::ghk: {
      GhkResult r = ghk_value(ms, md, params.ghk);
      if (!r.converged) throw NumericalError("ghk: Newton budget exhausted before the gap target");
      return r.value;
    }
    case Method::ss:
      return ss_average(ms, md, params);
  }
  throw InputError("distance: unknown method");
}

void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& f) {
  unsigned workers = threads ? threads : std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, n));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) f(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto work = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        f(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        next = n;
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

Grid1D ComparisonConfig::grid() const { return Grid1D(-T - eta, T + eta, n_cells); }

double ComparisonConfig::time(std::size_t k) const {
  return samples <= 1 ? 0.0 : T * static_cast<double>(k) / static_cast<double>(samples - 1);
}

void ComparisonConfig::validate() const {
  if (!(alpha > 0.0) || !(beta > 0.0) || !(eta > 0.0) || !(T > 0.0)) {
    throw InputError("comparison: alpha, beta, eta and T must be positive");
  }
  if (samples == 0) throw InputError("comparison: need at least one sample");
  if (methods.empty()) throw InputError("comparison: no methods");
  grid();
}

std::pair<DiscreteMeasure, DiscreteMeasure> moving_indicators(const ComparisonConfig& cfg, double t) {
  Grid1D g = cfg.grid();
  return {indicator(g, -t - cfg.eta, -t + cfg.eta, cfg.alpha), indicator(g, t - cfg.eta, t + cfg.eta, cfg.beta)};
}

std::vector<CurveRow> run_comparison(const ComparisonConfig& cfg) {
  cfg.validate();
  const std::size_t m = cfg.methods.size();
  std::vector<CurveRow> rows(cfg.samples * m);
  parallel_for(rows.size(), cfg.threads, [&](std::size_t idx) {
    const std::size_t k = idx / m;
    const double t = cfg.time(k);
    auto [s, d] = moving_indicators(cfg, t);
    MethodParams params = cfg.params;
    params.ss.rng_seed = cfg.seed;
    rows[idx] = {t, cfg.methods[idx % m], distance(cfg.methods[idx % m], s, d, params)};
  });
  return rows;
}

void write_comparison_csv(std::ostream& out, const ComparisonConfig& cfg, const std::vector<CurveRow>& rows) {
  set_precision(out);
  out << "# experiment=comparison alpha=" << cfg.alpha << " beta=" << cfg.beta << " eta=" << cfg.eta
      << " T=" << cfg.T << " n_cells=" << cfg.n_cells << " samples=" << cfg.samples << "\n";
  out << "# pr_a=" << cfg.params.pr.a << " pr_b=" << cfg.params.pr.b << " ghk_a=" << cfg.params.ghk.a
      << " ghk_b=" << cfg.params.ghk.b << " p=" << cfg.params.p << " seed=" << cfg.seed << "\n";
  out << "t,method,value\n";
  for (const CurveRow& r : rows) out << r.t << ',' << method_name(r.method) << ',' << r.value << '\n';
}

ScenarioPair traffic_scenarios(TrafficTest test, std::uint64_t seed) {
  using namespace traffic;
  ScenarioPair p;
  SimulationConfig c;
  c.sample_every = 10;
  switch (test) {
    case TrafficTest::traffic1: {
      c.x_min = 0.0;
      c.x_max = 40.0;
      c.n_cells = 100;
      c.t0 = -10.0;
      c.T = 30.0;
      c.dt = 0.25;
      c.rho0 = [](double) { return 0.2; };
      const std::size_t steps = c.steps();
      std::vector<double> fin = random_fluxes(steps, 0.25, 2 * seed);
      std::vector<double> fout = random_fluxes(steps, godunov_flux(0.2, 0.2), 2 * seed + 1);
      p.supply = c;
      p.supply.boundary = BoundarySpec::fluxes(fin, fout);
      // Steps starting at t >= 0 use the mean of the measured series over (0, T].
      const auto now = static_cast<std::size_t>(std::llround(-c.t0 / c.dt));
      auto forecast = [&](std::vector<double> f) {
        double mean = std::accumulate(f.begin() + static_cast<std::ptrdiff_t>(now), f.end(), 0.0) /
                      static_cast<double>(f.size() - now);
        std::fill(f.begin() + static_cast<std::ptrdiff_t>(now), f.end(), mean);
        return f;
      };
      p.demand = c;
      p.demand.boundary = BoundarySpec::fluxes(forecast(fin), forecast(fout));
      break;
    }
    case TrafficTest::traffic2: {
      c.x_min = 0.0;
      c.x_max = 4.0;
      c.n_cells = 100;
      c.t0 = 0.0;
      c.T = 20.0;
      c.dt = 0.025;
      c.boundary = BoundarySpec::dirichlet(0.4, 0.0);
      c.rho0 = [](double) { return 0.0; };
      p.supply = c;
      p.supply.light = TrafficLight{50, 50, 50, 0};
      p.demand = c;
      p.demand.light = TrafficLight{50, 40, 40, 0};
      break;
    }
    case TrafficTest::traffic3: {
      c.x_min = 0.0;
      c.x_max = 4.0;
      c.n_cells = 200;
      c.t0 = 0.0;
      c.T = 3.0;
      c.dt = 0.01;
      c.boundary = BoundarySpec::dirichlet(0.0, 0.0);
      c.rho0 = [](double x) { return x >= 1.6 && x <= 2.4 ? 0.7 : 0.1; };
      c.arz = {0.05, 2.0, 1.0};
      p.supply = c;
      p.supply.model = Model::lwr;
      p.demand = c;
      p.demand.model = Model::arz;
      break;
    }
  }
  return p;
}

MethodParams traffic_params(TrafficTest test) {
  MethodParams p;
  p.pr = {test == TrafficTest::traffic3 ? 0.5 : 1.0, 1.0, 1.0};
  return p;
}

DiscreteMeasure to_measure(const Grid1D& grid, const traffic::TrafficState& s) {
  std::vector<double> m(s.rho.size());
  for (std::size_t i = 0; i < m.size(); ++i) m[i] = s.rho[i] * grid.dx();
  return DiscreteMeasure(grid, std::move(m));
}

TrafficRun run_traffic(TrafficTest test, const std::vector<Method>& methods, std::uint64_t seed,
                       const MethodParams& params, unsigned threads) {
  if (methods.empty()) throw InputError("traffic: no methods");
  for (Method m : methods) {
    if (m != Method::fg && m != Method::pr && m != Method::ghk) {
      throw InputError("traffic: only fg, pr and ghk are available (got " + std::string(method_name(m)) + ")");
    }
  }
  ScenarioPair sc = traffic_scenarios(test, seed);
  TrafficRun run{traffic::run_simulation(sc.supply), traffic::run_simulation(sc.demand), {}};
  if (run.supply.states.size() != run.demand.states.size()) throw NumericalError("traffic: scenario lengths differ");
  const std::size_t m = methods.size();
  run.rows.resize(run.supply.states.size() * m);
  parallel_for(run.rows.size(), threads, [&](std::size_t idx) {
    const std::size_t k = idx / m;
    DiscreteMeasure s = to_measure(run.supply.grid, run.supply.states[k]);
    DiscreteMeasure d = to_measure(run.demand.grid, run.demand.states[k]);
    run.rows[idx] = {run.supply.states[k].t, total_mass(s), total_mass(d), methods[idx % m],
                     distance(methods[idx % m], s, d, params)};
  });
  return run;
}

void write_traffic_csv(std::ostream& out, TrafficTest test, std::uint64_t seed, const MethodParams& params,
                       const std::vector<TrafficRow>& rows) {
  ScenarioPair sc = traffic_scenarios(test, seed);
  set_precision(out);
  const auto& c = sc.supply;
  out << "# experiment=" << traffic_test_name(test) << " x=[" << c.x_min << ',' << c.x_max << "] n_cells=" << c.n_cells
      << " t0=" << c.t0 << " T=" << c.T << " dt=" << c.dt << " sample_every=" << c.sample_every << " seed=" << seed
      << "\n";
  switch (test) {
    case TrafficTest::traffic1:
      out << "# supply: measured boundary fluxes throughout; demand: measured until t=0 then their mean\n";
      break;
    case TrafficTest::traffic2:
      out << "# rho_in=0.4 rho_out=0 light_interface=50 supply_phase=50 demand_phase=40 (steps)\n";
      break;
    case TrafficTest::traffic3:
      out << "# supply: lwr; demand: arz tau=" << c.arz.tau << " gamma=" << c.arz.gamma << " v_ref=" << c.arz.v_ref
          << "\n";
      break;
  }
  out << "# pr_a=" << params.pr.a << " pr_b=" << params.pr.b << " ghk_a=" << params.ghk.a << " ghk_b=" << params.ghk.b
      << " fg_boundary=emptied\n";
  out << "t,mass_s,mass_d,method,value\n";
  for (const TrafficRow& r : rows) {
    out << r.t << ',' << r.mass_s << ',' << r.mass_d << ',' << method_name(r.method) << ',' << r.value << '\n';
  }
}

std::vector<MethodTestRow> run_method_test(MethodTest test, std::uint64_t seed) {
  const double none = std::numeric_limits<double>::quiet_NaN();
  std::vector<MethodTestRow> rows;
  switch (test) {
    case MethodTest::fg_test1: {
      // barycenters at 0, 0.1, ..., 5
      Grid1D g(-0.05, 5.05, 51);
      DiscreteMeasure d1 = atoms_on(g, {{3.0, 0.2}}), d2 = atoms_on(g, {{4.0, 0.2}});
      rows.push_back({"case1.1", 0.0, Method::fg, fg_distance(atoms_on(g, {{1.0, 0.1}, {2.5, 0.1}}), d1).value, 0.25});
      rows.push_back({"case1.2", 0.0, Method::fg, fg_distance(atoms_on(g, {{0.5, 0.1}, {2.5, 0.1}}), d2).value, 0.3});
      break;
    }
    case MethodTest::fg_test2: {
      Grid1D g(-5.0, 5.0, 50);
      DiscreteMeasure s = discretize([](double x) { return std::exp(-x * x); }, g).with_empty_boundary();
      DiscreteMeasure d =
          discretize([](double x) { return std::exp(-(x - 3.0) * (x - 3.0)) / 4.0; }, g).with_empty_boundary();
      rows.push_back({"gaussians", 0.0, Method::fg, fg_distance(s, d).value, 6.84});
      break;
    }
    case MethodTest::pr_test1: {
      Grid1D g(-2.0, 5.0, 200);
      DiscreteMeasure s = indicator(g, -1.0, 0.0, 1.0);
      for (int k = 0; k <= 12; ++k) {
        double xi = 0.25 * k;
        double exact = xi <= 2.0 ? 1.0 + xi - xi * xi / 4.0 : 2.0;
        rows.push_back({"xi", xi, Method::pr, pr_distance(s, indicator(g, xi, 1.0 + xi, 1.0)).value, exact});
      }
      break;
    }
    case MethodTest::pr_test2: {
      Grid1D g(-4.0, 4.0, 100);
      DiscreteMeasure s =
          discretize([](double x) { return x >= -2.0 && x <= 0.0 ? std::exp(-x + 1.0) / 5.0 : 0.0; }, g);
      DiscreteMeasure d = discretize([](double x) { return std::exp(-(x - 1.0) * (x - 1.0)); }, g);
      rows.push_back({"exp_gauss", 0.0, Method::pr, pr_distance(s, d).value, 4.36});
      break;
    }
    case MethodTest::ghk_test1: {
      // barycenters at 0, 0.1, ..., 7
      Grid1D g(-0.05, 7.05, 71);
      SsConfig cfg;
      cfg.Q = 1000;
      cfg.rng_seed = seed;
      auto add = [&](const char* label, double param, double ms, double md, double dist) {
        DiscreteMeasure s = atoms_on(g, {{0.5, ms}}), d = atoms_on(g, {{0.5 + dist, md}});
        GhkResult r = ghk_value(s, d);
        rows.push_back({label, param, Method::ghk, r.value, hg(ms, md, dist)});
        ConeProblem cone({{0.5, ms, 2}}, {{0.5 + dist, md, 2}});
        rows.push_back({label, param, Method::ss, ss_random_descent(cone, cfg).value, hg(ms, md, dist)});
      };
      for (int k = 0; k <= 12; ++k) add("distance", 0.5 * k, 1.0, 1.0, 0.5 * k);
      for (int k = 0; k <= 14; ++k) add("mass_difference", 0.5 * k, 1.0, 1.0 + 0.5 * k, 0.0);
      break;
    }
    case MethodTest::ss_test2: {
      ConeProblem cone({{0.0, 2.0, 2}, {1.0, 1.0, 1}}, {{3.0, 4.0, 4}});
      SsConfig a;
      rows.push_back({"exhaustive_Q6", 6.0, Method::ss, ss_exhaustive(cone, a).value, 6.45});
      SsConfig b;
      b.Q = 1000;
      b.rng_seed = seed;
      rows.push_back({"random_descent_Q1000", 1000.0, Method::ss, ss_random_descent(cone, b).value, 6.45});
      Grid1D g(-0.05, 3.05, 31);
      rows.push_back(
          {"dual", 0.0, Method::ghk, ghk_value(atoms_on(g, {{0.0, 2.0}, {1.0, 1.0}}), atoms_on(g, {{3.0, 4.0}})).value,
           none});
      break;
    }
  }
  return rows;
}

void write_method_test_csv(std::ostream& out, MethodTest test, std::uint64_t seed,
                           const std::vector<MethodTestRow>& rows) {
  set_precision(out);
  out << "# experiment=" << method_test_name(test) << " seed=" << seed << "\n";
  out << "case,parameter,method,value,reference\n";
  for (const MethodTestRow& r : rows) {
    out << r.label << ',' << r.parameter << ',' << method_name(r.method) << ',' << r.value << ',';
    if (!std::isnan(r.reference)) out << r.reference;
    out << '\n';
  }
}

}  // namespace gwd::experiments
