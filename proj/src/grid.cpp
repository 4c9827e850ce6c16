#include "gwd/grid.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <sstream>
#include <string>

#include "gwd/error.hpp"

namespace gwd {

Grid1D::Grid1D(double x_min, double x_max, std::size_t n_cells)
    : x_min_(x_min), x_max_(x_max), n_(n_cells), dx_(0.0) {
  if (!(std::isfinite(x_min) && std::isfinite(x_max)) || !(x_max > x_min)) {
    throw InputError("Grid1D: need finite x_min < x_max");
  }
  if (n_cells < 3) throw InputError("Grid1D: need at least 3 cells");
  dx_ = (x_max - x_min) / static_cast<double>(n_cells);
}

std::vector<double> Grid1D::centers() const {
  std::vector<double> x(n_);
  for (std::size_t i = 0; i < n_; ++i) x[i] = center(i);
  return x;
}

std::size_t Grid1D::cell_of(double x) const {
  if (x < x_min_ || x > x_max_) throw InputError("Grid1D::cell_of: point outside the domain");
  // Round through a small relative slack so that x = x_min + k dx lands in cell k.
  double s = (x - x_min_) / dx_;
  auto k = static_cast<std::size_t>(std::floor(s + 1e-9));
  return std::min(k, n_ - 1);
}

bool Grid1D::matches(const Grid1D& other) const {
  if (n_ != other.n_) return false;
  double tol = 1e-9 * dx_;
  return std::abs(x_min_ - other.x_min_) <= tol && std::abs(x_max_ - other.x_max_) <= tol * n_;
}

DiscreteMeasure::DiscreteMeasure(Grid1D grid, std::vector<double> masses)
    : grid_(grid), masses_(std::move(masses)) {
  if (masses_.size() != grid_.size()) throw InputError("DiscreteMeasure: mass vector size != cell count");
  for (double m : masses_) {
    if (!std::isfinite(m) || m < 0.0) throw InputError("DiscreteMeasure: masses must be finite and non-negative");
  }
}

DiscreteMeasure DiscreteMeasure::zero(const Grid1D& grid) {
  return DiscreteMeasure(grid, std::vector<double>(grid.size(), 0.0));
}

DiscreteMeasure DiscreteMeasure::scaled(double factor) const {
  if (!(factor >= 0.0)) throw InputError("DiscreteMeasure::scaled: factor must be non-negative");
  std::vector<double> m(masses_);
  for (double& v : m) v *= factor;
  return {grid_, std::move(m)};
}

DiscreteMeasure DiscreteMeasure::with_empty_boundary() const {
  std::vector<double> m(masses_);
  m.front() = 0.0;
  m.back() = 0.0;
  return {grid_, std::move(m)};
}

bool DiscreteMeasure::has_empty_boundary() const { return masses_.front() == 0.0 && masses_.back() == 0.0; }

void DiscreteMeasure::require_empty_boundary(const char* who) const {
  if (!has_empty_boundary()) {
    throw InputError(std::string(who) + ": first and last cells must carry no mass");
  }
}

CostMatrix::CostMatrix(const Grid1D& grid, double p) : n_(grid.size()), p_(p), c_(n_ * n_) {
  if (!(p >= 1.0)) throw InputError("cost_matrix: exponent p must be >= 1");
  // Distances depend only on |j - k|, so tabulate once.
  std::vector<double> by_offset(n_);
  for (std::size_t d = 0; d < n_; ++d) {
    double dist = static_cast<double>(d) * grid.dx();
    by_offset[d] = p == 1.0 ? dist : std::pow(dist, p);
  }
  for (std::size_t j = 0; j < n_; ++j) {
    for (std::size_t k = 0; k < n_; ++k) c_[j * n_ + k] = by_offset[j > k ? j - k : k - j];
  }
}

double CostMatrix::max_entry() const { return *std::max_element(c_.begin(), c_.end()); }

DiscreteMeasure discretize(const std::function<double(double)>& density, const Grid1D& grid) {
  std::vector<double> m(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    double rho = density(grid.center(i));
    if (!std::isfinite(rho) || rho < 0.0) throw InputError("discretize: density must be finite and non-negative");
    m[i] = rho * grid.dx();
  }
  return {grid, std::move(m)};
}

double total_mass(const DiscreteMeasure& m) {
  auto v = m.masses();
  return std::accumulate(v.begin(), v.end(), 0.0);
}

CostMatrix cost_matrix(const Grid1D& grid, double p) { return CostMatrix(grid, p); }

void require_same_grid(const DiscreteMeasure& a, const DiscreteMeasure& b, const char* who) {
  if (!a.grid().matches(b.grid())) throw InputError(std::string(who) + ": measures are defined on different grids");
}

void write_measure_csv(std::ostream& out, const DiscreteMeasure& m) {
  out << "x,mass\n" << std::setprecision(17);
  for (std::size_t i = 0; i < m.size(); ++i) out << m.grid().center(i) << ',' << m[i] << '\n';
}

void write_measure_csv(const std::filesystem::path& path, const DiscreteMeasure& m) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot open " + path.string() + " for writing");
  write_measure_csv(out, m);
}

DiscreteMeasure read_measure_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw InputError("measure CSV: empty input");
  line.erase(std::remove_if(line.begin(), line.end(), [](char c) { return std::isspace(static_cast<unsigned char>(c)); }),
             line.end());
  if (line != "x,mass") throw InputError("measure CSV: expected header 'x,mass'");

  std::vector<double> xs, ms;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::istringstream row(line);
    double x = 0.0, m = 0.0;
    char comma = 0;
    if (!(row >> x >> comma >> m) || comma != ',') {
      throw InputError("measure CSV: malformed row at line " + std::to_string(lineno));
    }
    xs.push_back(x);
    ms.push_back(m);
  }
  if (xs.size() < 3) throw InputError("measure CSV: need at least 3 rows");

  std::size_t n = xs.size();
  double dx = (xs.back() - xs.front()) / static_cast<double>(n - 1);
  if (!(dx > 0.0)) throw InputError("measure CSV: positions must be increasing");
  Grid1D grid(xs.front() - 0.5 * dx, xs.back() + 0.5 * dx, n);
  for (std::size_t i = 0; i < n; ++i) {
    if (std::abs(xs[i] - grid.center(i)) > 1e-9 * dx) {
      throw InputError("measure CSV: row " + std::to_string(i + 2) + " is off the uniform grid");
    }
  }
  return {grid, std::move(ms)};
}

DiscreteMeasure read_measure_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path.string());
  return read_measure_csv(in);
}

}  // namespace gwd
