#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

namespace gwd {

/// Uniform partition of [x_min, x_max] into N cells, addressed by barycenter.
class Grid1D {
 public:
  Grid1D(double x_min, double x_max, std::size_t n_cells);

  double x_min() const { return x_min_; }
  double x_max() const { return x_max_; }
  std::size_t size() const { return n_; }
  double dx() const { return dx_; }

  /// Barycenter of cell i (0-based).
  double center(std::size_t i) const { return x_min_ + (static_cast<double>(i) + 0.5) * dx_; }
  std::vector<double> centers() const;

  /// Index of the cell containing x; points on an edge go to the right cell.
  std::size_t cell_of(double x) const;

  /// Same cell count and positions within 1e-9 dx.
  bool matches(const Grid1D& other) const;

 private:
  double x_min_;
  double x_max_;
  std::size_t n_;
  double dx_;
};

/// Non-negative atomic masses attached to the cells of a grid.
class DiscreteMeasure {
 public:
  DiscreteMeasure(Grid1D grid, std::vector<double> masses);
  static DiscreteMeasure zero(const Grid1D& grid);

  const Grid1D& grid() const { return grid_; }
  std::span<const double> masses() const { return masses_; }
  double operator[](std::size_t i) const { return masses_[i]; }
  std::size_t size() const { return masses_.size(); }

  DiscreteMeasure scaled(double factor) const;
  /// Copy with the first and last cell emptied.
  DiscreteMeasure with_empty_boundary() const;
  bool has_empty_boundary() const;
  /// Throws InputError unless the first and last cells are empty.
  void require_empty_boundary(const char* who) const;

 private:
  Grid1D grid_;
  std::vector<double> masses_;
};

/// Pairwise |x_k - x_j|^p between barycenters, row-major.
class CostMatrix {
 public:
  CostMatrix(const Grid1D& grid, double p);

  std::size_t size() const { return n_; }
  double exponent() const { return p_; }
  double operator()(std::size_t j, std::size_t k) const { return c_[j * n_ + k]; }
  std::span<const double> row(std::size_t j) const { return {c_.data() + j * n_, n_}; }
  double max_entry() const;

 private:
  std::size_t n_;
  double p_;
  std::vector<double> c_;
};

/// Mid-point sampling: masses[i] = density(x_i) * dx.
DiscreteMeasure discretize(const std::function<double(double)>& density, const Grid1D& grid);

double total_mass(const DiscreteMeasure& m);

CostMatrix cost_matrix(const Grid1D& grid, double p);

/// Throws InputError when the measures live on different grids.
void require_same_grid(const DiscreteMeasure& a, const DiscreteMeasure& b, const char* who);

// CSV with header `x,mass`, one row per cell.
void write_measure_csv(std::ostream& out, const DiscreteMeasure& m);
void write_measure_csv(const std::filesystem::path& path, const DiscreteMeasure& m);
DiscreteMeasure read_measure_csv(std::istream& in);
DiscreteMeasure read_measure_csv(const std::filesystem::path& path);

}  // namespace gwd
