#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "gwd/error.hpp"
#include "gwd/grid.hpp"

using namespace gwd;

TEST_CASE("grid geometry") {
  Grid1D g(0.0, 5.0, 50);
  CHECK(g.dx() == doctest::Approx(0.1));
  CHECK(g.center(0) == doctest::Approx(0.05));
  CHECK(g.center(49) == doctest::Approx(4.95));
  for (std::size_t i = 0; i + 1 < g.size(); ++i) CHECK(g.center(i + 1) - g.center(i) == doctest::Approx(g.dx()));
  CHECK(g.cell_of(0.0) == 0);
  CHECK(g.cell_of(0.1) == 1);
  CHECK(g.cell_of(4.99) == 49);
  CHECK_THROWS_AS(Grid1D(1.0, 1.0, 10), InputError);
  CHECK_THROWS_AS(Grid1D(0.0, 1.0, 2), InputError);
}

TEST_CASE("measure validation") {
  Grid1D g(0.0, 1.0, 4);
  CHECK_THROWS_AS(DiscreteMeasure(g, {0.1, -0.2, 0.0, 0.0}), InputError);
  CHECK_THROWS_AS(DiscreteMeasure(g, {0.1, 0.2}), InputError);
  DiscreteMeasure m(g, {0.0, 0.2, 0.3, 0.0});
  CHECK(m.has_empty_boundary());
  CHECK_NOTHROW(m.require_empty_boundary("t"));
  DiscreteMeasure full(g, {0.5, 0.2, 0.3, 0.1});
  CHECK_FALSE(full.has_empty_boundary());
  CHECK_THROWS_AS(full.require_empty_boundary("t"), InputError);
  CHECK(total_mass(full.with_empty_boundary()) == doctest::Approx(0.5));
  CHECK(total_mass(full.scaled(2.0)) == doctest::Approx(2.2));
}

TEST_CASE("discretize") {
  Grid1D g(0.0, 5.0, 50);
  DiscreteMeasure zero = discretize([](double) { return 0.0; }, g);
  CHECK(total_mass(zero) == 0.0);
  DiscreteMeasure one = discretize([](double) { return 1.0; }, g);
  for (std::size_t i = 0; i < one.size(); ++i) CHECK(one[i] == doctest::Approx(0.1));
  CHECK(total_mass(one) == doctest::Approx(5.0));
  CHECK_THROWS_AS(discretize([](double x) { return x - 1.0; }, g), InputError);
}

TEST_CASE("discretize gaussian against fine quadrature") {
  auto f = [](double x) { return std::exp(-x * x); };
  double coarse = total_mass(discretize(f, Grid1D(-5.0, 5.0, 50)));
  double fine = total_mass(discretize(f, Grid1D(-5.0, 5.0, 100000)));
  CHECK(std::abs(fine - std::sqrt(std::numbers::pi)) < 1e-9);
  CHECK(std::abs(coarse - fine) < 1e-2);
}

TEST_CASE("total mass") {
  Grid1D g(0.0, 5.0, 50);
  std::vector<double> m(50, 0.0);
  m[10] = 0.1;
  m[25] = 0.1;
  CHECK(total_mass(DiscreteMeasure(g, m)) == doctest::Approx(0.2));
  Grid1D fine(-2.0, 2.0, 4000);
  DiscreteMeasure chi = discretize([](double x) { return x >= -1.0 && x <= 0.0 ? 1.0 : 0.0; }, fine);
  CHECK(std::abs(total_mass(chi) - 1.0) <= fine.dx());
}

TEST_CASE("discretize is linear") {
  Grid1D g(-3.0, 3.0, 37);
  auto f = [](double x) { return std::exp(-x * x); };
  auto h = [](double x) { return 1.0 + std::sin(x); };
  DiscreteMeasure mf = discretize(f, g), mh = discretize(h, g);
  DiscreteMeasure mix = discretize([&](double x) { return 2.0 * f(x) + 0.5 * h(x); }, g);
  for (std::size_t i = 0; i < g.size(); ++i) CHECK(mix[i] == doctest::Approx(2.0 * mf[i] + 0.5 * mh[i]).epsilon(1e-12));
}

TEST_CASE("cost matrix") {
  CostMatrix c = cost_matrix(Grid1D(0.0, 3.0, 3), 1.0);
  double expect[3][3] = {{0, 1, 2}, {1, 0, 1}, {2, 1, 0}};
  for (int j = 0; j < 3; ++j)
    for (int k = 0; k < 3; ++k) CHECK(c(j, k) == doctest::Approx(expect[j][k]));
  CHECK(c.max_entry() == doctest::Approx(2.0));

  Grid1D g(-1.0, 2.0, 12);
  CostMatrix c2 = cost_matrix(g, 2.0);
  CHECK(c2(3, 4) == doctest::Approx(g.dx() * g.dx()));
  CHECK_THROWS_AS(cost_matrix(g, 0.5), InputError);

  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-10.0, 10.0);
  for (int trial = 0; trial < 5; ++trial) {
    double a = u(rng), b = a + 1.0 + std::abs(u(rng));
    Grid1D r(a, b, 9);
    CostMatrix c1 = cost_matrix(r, 1.0);
    for (std::size_t j = 0; j < 9; ++j)
      for (std::size_t k = 0; k < 9; ++k) {
        CHECK(c1(j, k) == c1(k, j));
        for (std::size_t l = 0; l < 9; ++l) CHECK(c1(j, k) <= c1(j, l) + c1(l, k) + 1e-12);
      }
  }
}

TEST_CASE("measure csv round trip") {
  Grid1D g(-1.0, 1.0, 5);
  DiscreteMeasure m(g, {0.0, 0.25, 0.5, 0.125, 0.0});
  std::stringstream ss;
  write_measure_csv(ss, m);
  DiscreteMeasure back = read_measure_csv(ss);
  CHECK(back.grid().matches(g));
  for (std::size_t i = 0; i < 5; ++i) CHECK(back[i] == m[i]);

  std::stringstream bad("x,mass\n0,1\n0.5,1\n2,1\n");
  CHECK_THROWS_AS(read_measure_csv(bad), InputError);
  std::stringstream header("a,b\n0,1\n");
  CHECK_THROWS_AS(read_measure_csv(header), InputError);
}

TEST_CASE("grid mismatch") {
  DiscreteMeasure a(Grid1D(0.0, 1.0, 4), std::vector<double>(4, 0.1));
  DiscreteMeasure b(Grid1D(0.0, 2.0, 4), std::vector<double>(4, 0.1));
  CHECK_THROWS_AS(require_same_grid(a, b, "t"), InputError);
  CHECK_NOTHROW(require_same_grid(a, a, "t"));
}
