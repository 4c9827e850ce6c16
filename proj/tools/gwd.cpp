// Command-line front end: distances between measure files, the traffic
// simulator and the fixed experiments.

#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "gwd/error.hpp"
#include "gwd/experiments.hpp"
#include "gwd/fg.hpp"
#include "gwd/ghk.hpp"
#include "gwd/pr.hpp"
#include "gwd/ss.hpp"
#include "gwd/traffic.hpp"
#include "gwd/wasserstein.hpp"

namespace {

using namespace gwd;
namespace ex = gwd::experiments;

constexpr int kUsage = 1;
constexpr int kNumerical = 2;

// Writes to the file when a path is given, to stdout otherwise.
class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty()) {
      file_ = std::make_unique<std::ofstream>(path);
      if (!*file_) throw InputError("cannot open " + path + " for writing");
    }
  }
  std::ostream& stream() { return file_ ? *file_ : std::cout; }

 private:
  std::unique_ptr<std::ofstream> file_;
};

void write_plan(const std::string& path, const TransportPlan& plan, const Grid1D& grid) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot open " + path + " for writing");
  write_plan_csv(out, plan, grid);
}

struct DistArgs {
  std::string method = "w1";
  std::string supply, demand, plan;
  double a = 1.0, b = 1.0, p = 1.0;
  std::uint64_t seed = 1;
  std::size_t subdivisions = 1;
};

int run_dist(const DistArgs& args) {
  const ex::Method method = ex::parse_method(args.method);
  DiscreteMeasure ms = read_measure_csv(args.supply);
  DiscreteMeasure md = read_measure_csv(args.demand);
  require_same_grid(ms, md, "dist");
  if (!args.plan.empty() && (method == ex::Method::ghk || method == ex::Method::ss)) {
    throw InputError("--plan is only available for w1, fg and pr");
  }
  double value = 0.0;
  switch (method) {
    case ex::Method::w1: {
      if (args.plan.empty() && args.p == 1.0) {
        value = w1_cdf(ms, md);
      } else {
        W1Result r = w1_lp(ms, md, args.p);
        value = r.distance;
        if (!args.plan.empty()) write_plan(args.plan, r.plan, ms.grid());
      }
      break;
    }
    case ex::Method::fg: {
      FgSolution r = fg_distance(ms, md, args.p);
      value = r.value;
      if (!args.plan.empty()) write_plan(args.plan, r.plan, ms.grid());
      break;
    }
    case ex::Method::pr: {
      PrSolution r = pr_distance(ms, md, {args.a, args.b, args.p});
      value = r.value;
      if (!args.plan.empty()) write_plan(args.plan, r.plan, ms.grid());
      break;
    }
    case ex::Method::ghk: {
      GhkResult r = ghk_value(ms, md, {args.a, args.b});
      if (!r.converged) throw NumericalError("ghk: Newton budget exhausted (certified gap " + std::to_string(r.gap) + ")");
      value = r.value;
      break;
    }
    case ex::Method::ss: {
      if (args.a != 1.0 || args.b != 1.0) throw InputError("ss is defined for a = b = 1 only");
      SsConfig cfg;
      cfg.Q = 1000;
      cfg.rng_seed = args.seed;
      value = ss_random_descent(ConeProblem::from_measures(ms, md, args.subdivisions), cfg).value;
      break;
    }
  }
  std::cout << std::setprecision(12) << value << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Generalized Wasserstein distances and traffic simulation"};
  app.require_subcommand(1);

  DistArgs dist;
  auto* cmd_dist = app.add_subcommand("dist", "distance between two measure CSV files (header x,mass)");
  cmd_dist->add_option("supply", dist.supply, "supply measure")->required()->check(CLI::ExistingFile);
  cmd_dist->add_option("demand", dist.demand, "demand measure")->required()->check(CLI::ExistingFile);
  cmd_dist->add_option("--method", dist.method, "w1, fg, pr, ghk or ss")->capture_default_str();
  cmd_dist->add_option("--a", dist.a, "creation price (pr) or entropy weight (ghk)")->capture_default_str();
  cmd_dist->add_option("--b", dist.b, "transport weight")->capture_default_str();
  cmd_dist->add_option("--p", dist.p, "cost exponent for w1, fg, pr")->capture_default_str();
  cmd_dist->add_option("--seed", dist.seed, "random seed (ss)")->capture_default_str();
  cmd_dist->add_option("--subdivisions", dist.subdivisions, "slots per atom (ss)")->capture_default_str();
  cmd_dist->add_option("--plan", dist.plan, "write the optimal plan as CSV from_x,to_x,mass");

  ex::ComparisonConfig cmp;
  std::string cmp_methods = "fg,pr,ghk", cmp_out;
  auto* cmd_cmp = app.add_subcommand("compare", "moving indicator comparison, CSV t,method,value");
  cmd_cmp->add_option("--alpha", cmp.alpha, "supply height")->capture_default_str();
  cmd_cmp->add_option("--beta", cmp.beta, "demand height")->capture_default_str();
  cmd_cmp->add_option("--eta", cmp.eta, "half width")->capture_default_str();
  cmd_cmp->add_option("--T", cmp.T, "final time")->capture_default_str();
  cmd_cmp->add_option("--cells", cmp.n_cells, "grid cells")->capture_default_str();
  cmd_cmp->add_option("--samples", cmp.samples, "time samples in [0, T]")->capture_default_str();
  cmd_cmp->add_option("--method", cmp_methods, "comma separated methods")->capture_default_str();
  cmd_cmp->add_option("--a", cmp.params.pr.a, "pr creation price")->capture_default_str();
  cmd_cmp->add_option("--b", cmp.params.pr.b, "pr transport weight")->capture_default_str();
  cmd_cmp->add_option("--seed", cmp.seed, "random seed (ss)")->capture_default_str();
  cmd_cmp->add_option("--threads", cmp.threads, "worker threads, 0 = all cores")->capture_default_str();
  cmd_cmp->add_option("--out", cmp_out, "output CSV (default stdout)");

  std::string tr_name, tr_methods = "fg,pr,ghk", tr_out;
  std::uint64_t tr_seed = 1;
  std::optional<double> tr_a, tr_b;
  unsigned tr_threads = 0;
  auto* cmd_tr = app.add_subcommand("traffic", "traffic scenario pair, CSV t,mass_s,mass_d,method,value");
  cmd_tr->add_option("test", tr_name, "traffic1, traffic2 or traffic3")->required();
  cmd_tr->add_option("--method", tr_methods, "comma separated subset of fg,pr,ghk")->capture_default_str();
  cmd_tr->add_option("--seed", tr_seed, "boundary flux seed (traffic1)")->capture_default_str();
  cmd_tr->add_option("--a", tr_a, "override pr creation price");
  cmd_tr->add_option("--b", tr_b, "override pr transport weight");
  cmd_tr->add_option("--threads", tr_threads, "worker threads, 0 = all cores")->capture_default_str();
  cmd_tr->add_option("--out", tr_out, "output CSV (default stdout)");

  std::string sim_config, sim_out;
  auto* cmd_sim = app.add_subcommand("simulate", "run one simulation from a key = value file, CSV t,x,rho[,v]");
  cmd_sim->add_option("--config", sim_config, "configuration file")->required()->check(CLI::ExistingFile);
  cmd_sim->add_option("--out", sim_out, "output CSV (default stdout)");

  std::string exp_name, exp_out;
  std::uint64_t exp_seed = 1;
  auto* cmd_exp = app.add_subcommand("experiment", "fixed single-method test, CSV case,parameter,method,value,reference");
  cmd_exp->add_option("name", exp_name, "fg_test1, fg_test2, pr_test1, pr_test2, ghk_test1, ss_test2")->required();
  cmd_exp->add_option("--seed", exp_seed, "random seed")->capture_default_str();
  cmd_exp->add_option("--out", exp_out, "output CSV (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*cmd_dist) return run_dist(dist);
    if (*cmd_cmp) {
      cmp.methods = ex::parse_methods(cmp_methods);
      auto rows = ex::run_comparison(cmp);
      Output out(cmp_out);
      ex::write_comparison_csv(out.stream(), cmp, rows);
    } else if (*cmd_tr) {
      const ex::TrafficTest test = ex::parse_traffic_test(tr_name);
      ex::MethodParams params = ex::traffic_params(test);
      if (tr_a) params.pr.a = *tr_a;
      if (tr_b) params.pr.b = *tr_b;
      auto run = ex::run_traffic(test, ex::parse_methods(tr_methods), tr_seed, params, tr_threads);
      Output out(tr_out);
      ex::write_traffic_csv(out.stream(), test, tr_seed, params, run.rows);
    } else if (*cmd_sim) {
      auto sim = traffic::run_simulation(traffic::parse_simulation_config(std::filesystem::path(sim_config)));
      Output out(sim_out);
      traffic::write_time_series_csv(out.stream(), sim);
    } else if (*cmd_exp) {
      const ex::MethodTest test = ex::parse_method_test(exp_name);
      auto rows = ex::run_method_test(test, exp_seed);
      Output out(exp_out);
      ex::write_method_test_csv(out.stream(), test, exp_seed, rows);
    }
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kNumerical;
  }
  return 0;
}
