#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numeric>
#include <random>

#include "gwd/error.hpp"
#include "gwd/ghk.hpp"
#include "gwd/ss.hpp"

using namespace gwd;

namespace {

double hg(double r, double s, double d) { return r + s - 2.0 * std::sqrt(r * s) * std::exp(-d * d / 2.0); }

ConeProblem paper_instance() { return ConeProblem({{0.0, 2.0, 2}, {1.0, 1.0, 1}}, {{3.0, 4.0, 4}}); }

ConeProblem random_tiny(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> pos(0.0, 3.0), mass(0.2, 2.0);
  std::uniform_int_distribution<std::size_t> sub(1, 2);
  std::vector<Atom> s{{pos(rng), mass(rng), sub(rng)}};
  std::vector<Atom> d{{pos(rng), mass(rng), sub(rng)}};
  if (s[0].subdivisions * d[0].subdivisions < 3) d.push_back({pos(rng), mass(rng), 1});
  return {s, d};
}

}  // namespace

TEST_CASE("objective basics") {
  ConeProblem p({{0.0, 1.0, 1}}, {{2.0, 1.0, 1}});
  std::vector<double> one{1.0};
  CHECK(ss_objective(p, one, {{0.0}, {0.0}}) == 0.0);
  CHECK(ss_objective(p, one, {{1.5}, {1.5}}) == doctest::Approx(hg(1.5, 1.5, 2.0)));
  ConeProblem same({{1.0, 0.7, 1}}, {{1.0, 0.7, 1}});
  CHECK(ss_objective(same, one, {{0.7}, {0.7}}) == doctest::Approx(0.0).scale(1.0));
}

TEST_CASE("single subdivision forces the radius") {
  ConeProblem p({{0.0, 1.3, 1}}, {{1.0, 0.4, 1}});
  std::vector<double> one{1.0};
  for (RadiusSystem sys : {RadiusSystem::homogeneous, RadiusSystem::joint}) {
    auto r = min_norm_radii(p, one, sys);
    REQUIRE(r);
    CHECK(r->supply[0] == doctest::Approx(1.3));
    CHECK(r->demand[0] == doctest::Approx(0.4));
  }
}

TEST_CASE("zero weight against positive mass is infeasible") {
  ConeProblem p = paper_instance();
  std::vector<double> gamma(12, 0.0);
  gamma[0] = 1.0;  // the second supply atom gets no weight
  CHECK_FALSE(min_norm_radii(p, gamma));
  CHECK_FALSE(min_norm_radii(p, gamma, RadiusSystem::joint));
}

TEST_CASE("random weights: radii satisfy the constraint system") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.05, 1.0);
  ConeProblem p = paper_instance();
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> gamma(12);
    for (double& g : gamma) g = u(rng);
    double total = std::accumulate(gamma.begin(), gamma.end(), 0.0);
    for (double& g : gamma) g /= total;
    auto r = min_norm_radii(p, gamma);
    REQUIRE(r);
    std::vector<double> ws(3, 0.0), wd(4, 0.0);
    for (std::size_t a = 0; a < 3; ++a)
      for (std::size_t b = 0; b < 4; ++b) {
        ws[a] += gamma[a * 4 + b];
        wd[b] += gamma[a * 4 + b];
      }
    CHECK(r->supply[0] * ws[0] + r->supply[1] * ws[1] == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(r->supply[2] * ws[2] == doctest::Approx(1.0).epsilon(1e-9));
    double dsum = 0.0;
    for (std::size_t b = 0; b < 4; ++b) dsum += r->demand[b] * wd[b];
    CHECK(dsum == doctest::Approx(4.0).epsilon(1e-9));
    // least norm: radii proportional to the weights within an atom
    CHECK(r->supply[0] * ws[1] == doctest::Approx(r->supply[1] * ws[0]).epsilon(1e-9));
  }
}

TEST_CASE("joint system needs the weight on one slot") {
  ConeProblem p({{0.0, 1.0, 3}}, {{1.0, 2.0, 1}});
  std::vector<double> spread{0.5, 0.3, 0.2};
  // sum r w <= max(w) sum r < m, so only negative radii would solve it
  CHECK_FALSE(min_norm_radii(p, spread, RadiusSystem::joint));
  CHECK(min_norm_radii(p, spread, RadiusSystem::homogeneous));
  std::vector<double> single{1.0, 0.0, 0.0};
  auto r = min_norm_radii(p, single, RadiusSystem::joint);
  REQUIRE(r);
  CHECK(r->supply[0] == doctest::Approx(1.0));
  CHECK(r->supply[1] == doctest::Approx(0.0).scale(1.0));
  CHECK(r->supply[2] == doctest::Approx(0.0).scale(1.0));
}

TEST_CASE("exhaustive search on the three-atom instance") {
  SsResult r = ss_exhaustive(paper_instance(), SsConfig{});
  CHECK(r.value == doctest::Approx(6.45).epsilon(0.01 / 6.45));
  CHECK(r.evaluated == simplex_grid_size(6, 12));
  CHECK(r.infeasible > 0);
  CHECK(std::accumulate(r.gamma.begin(), r.gamma.end(), 0.0) == doctest::Approx(1.0));
  CHECK(ss_objective(paper_instance(), r.gamma, r.radii) == doctest::Approx(r.value));
}

TEST_CASE("exhaustive search single atoms") {
  for (double d : {0.0, 0.5, 1.5, 3.0}) {
    ConeProblem p({{0.0, 1.2, 1}}, {{d, 0.8, 1}});
    SsConfig cfg;
    cfg.Q = 2;
    CHECK(ss_exhaustive(p, cfg).value == doctest::Approx(hg(1.2, 0.8, d)));
  }
  ConeProblem same({{0.5, 1.0, 1}}, {{0.5, 1.0, 1}});
  CHECK(ss_exhaustive(same, SsConfig{}).value == doctest::Approx(0.0).scale(1.0));
}

TEST_CASE("grid size and refusals") {
  CHECK(simplex_grid_size(6, 12) == 12376);
  CHECK(simplex_grid_size(1, 1) == 1);
  CHECK(simplex_grid_size(8, 3) == 45);
  CHECK(simplex_grid_size(1000, 16) == std::numeric_limits<std::uint64_t>::max());
  CHECK(simplex_grid_size(60, 16) == 2'280'012'686'716'080ULL);
  SsConfig small;
  small.budget = 100;
  CHECK_THROWS_AS(ss_exhaustive(paper_instance(), small), InputError);
  ConeProblem big({{0.0, 1.0, 5}}, {{1.0, 1.0, 4}});
  CHECK_THROWS_AS(ss_exhaustive(big, SsConfig{}), InputError);
  SsConfig bad;
  bad.Q = 1;
  CHECK_THROWS_AS(ss_random_descent(paper_instance(), bad), InputError);
  bad.Q = 6;
  bad.epsilon = 0.0;
  CHECK_THROWS_AS(ss_random_descent(paper_instance(), bad), InputError);
  CHECK_THROWS_AS(ConeProblem({{0.0, 1.0, 0}}, {{1.0, 1.0, 1}}), InputError);
  CHECK_THROWS_AS(ConeProblem({{0.0, -1.0, 1}}, {{1.0, 1.0, 1}}), InputError);
  CHECK_THROWS_AS(ss_exhaustive(ConeProblem({}, {{1.0, 1.0, 1}}), SsConfig{}), InputError);
}

TEST_CASE("random descent reaches the exhaustive value") {
  SsConfig cfg;
  cfg.Q = 1000;
  cfg.rng_seed = 1;
  SsResult r = ss_random_descent(paper_instance(), cfg);
  CHECK(r.value == doctest::Approx(6.45).epsilon(0.05 / 6.45));
  CHECK(r.value <= r.random_phase_value);
  CHECK(r.improved_by_descent);
  CHECK(std::accumulate(r.gamma.begin(), r.gamma.end(), 0.0) == doctest::Approx(1.0).epsilon(1e-12));
  for (double g : r.gamma) CHECK(g >= 0.0);
}

TEST_CASE("random descent is deterministic per seed") {
  SsConfig cfg;
  cfg.Q = 100;
  cfg.n_random = 50;
  cfg.n_descent = 200;
  cfg.rng_seed = 42;
  SsResult a = ss_random_descent(paper_instance(), cfg);
  SsResult b = ss_random_descent(paper_instance(), cfg);
  CHECK(a.value == b.value);
  CHECK(a.gamma == b.gamma);
}

TEST_CASE("exhaustive search as oracle for random descent") {
  std::mt19937_64 rng(19);
  for (int trial = 0; trial < 10; ++trial) {
    ConeProblem p = random_tiny(rng);
    REQUIRE(p.dimension() <= 6);
    SsConfig cfg;
    cfg.Q = 8;
    double exhaustive = ss_exhaustive(p, cfg).value;
    cfg.n_random = 2000;
    cfg.n_descent = 4000;
    cfg.rng_seed = 100 + static_cast<std::uint64_t>(trial);
    CHECK(ss_random_descent(p, cfg).value <= exhaustive + 1e-6);
  }
}

TEST_CASE("primal cone value bounds the dual from above") {
  std::mt19937_64 rng(23);
  std::uniform_int_distribution<std::size_t> cell(1, 29);
  std::uniform_real_distribution<double> mass(0.2, 2.0);
  for (int trial = 0; trial < 10; ++trial) {
    Grid1D g(-0.05, 2.95, 30);
    std::vector<double> a(30, 0.0), b(30, 0.0);
    a[cell(rng)] = mass(rng);
    b[cell(rng)] = mass(rng);
    if (trial % 2) b[cell(rng)] += mass(rng);
    DiscreteMeasure ms(g, a), md(g, b);
    double dual = ghk_value(ms, md).value;
    ConeProblem p = ConeProblem::from_measures(ms, md, 2);
    SsConfig cfg;
    cfg.Q = 8;
    CHECK(dual <= ss_exhaustive(p, cfg).value + 1e-3);
  }
}

TEST_CASE("single atoms agree with the dual value") {
  Grid1D g(-0.05, 5.05, 51);
  for (double d : {0.0, 0.7, 2.0}) {
    std::vector<double> a(51, 0.0), b(51, 0.0);
    a[5] = 1.5;
    b[5 + static_cast<std::size_t>(std::lround(d * 10))] = 0.6;
    DiscreteMeasure ms(g, a), md(g, b);
    ConeProblem p = ConeProblem::from_measures(ms, md, 1);
    SsConfig cfg;
    cfg.Q = 1000;
    cfg.n_random = 10;
    cfg.n_descent = 10;
    CHECK(ss_random_descent(p, cfg).value == doctest::Approx(ghk_value(ms, md).value).epsilon(1e-3));
  }
}
