#pragma once

// Uniform biperiodic scalar grids and the 5-point Poisson machinery.

#include <cstddef>
#include <filesystem>
#include <span>
#include <vector>

namespace mgsr {

/// Square scalar field on a uniform lattice, periodic in both indices.
/// Values are stored row-major: index (i, j) is row i, column j.
class Grid {
 public:
  Grid() = default;
  /// Zero-filled grid. Throws ShapeError for n < 2 and InputError for h <= 0.
  Grid(int n, double h);
  Grid(int n, double h, std::vector<double> values);

  static Grid constant(int n, double h, double value);
  /// Grid on the unit domain, h = 1/n.
  static Grid unit(int n) { return Grid(n, 1.0 / n); }

  int n() const { return n_; }
  double h() const { return h_; }
  std::size_t size() const { return values_.size(); }

  double& operator()(int i, int j) { return values_[index(i, j)]; }
  double operator()(int i, int j) const { return values_[index(i, j)]; }

  /// Periodic access for arbitrary integer indices.
  double wrapped(long i, long j) const;

  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }

  double mean() const;
  bool all_finite() const;
  bool same_shape(const Grid& other) const;

  Grid& operator+=(const Grid& other);
  Grid& operator-=(const Grid& other);
  Grid& operator*=(double s);

  friend Grid operator+(Grid a, const Grid& b) { return a += b; }
  friend Grid operator-(Grid a, const Grid& b) { return a -= b; }
  friend Grid operator*(Grid a, double s) { return a *= s; }
  friend Grid operator*(double s, Grid a) { return a *= s; }

  bool operator==(const Grid& other) const = default;

 private:
  std::size_t index(int i, int j) const {
    return static_cast<std::size_t>(i) * static_cast<std::size_t>(n_) + static_cast<std::size_t>(j);
  }

  int n_ = 0;
  double h_ = 0.0;
  std::vector<double> values_;
};

enum class NormKind {
  L2,              ///< sqrt(sum v^2)
  L2MeanNormalized ///< sqrt(sum v^2 / n^2)
};

/// 5-point periodic Laplacian, scaled by 1/h^2.
Grid laplacian(const Grid& g);

/// r = f - laplacian(p).
Grid residual(const Grid& p, const Grid& f);

/// Red-black Gauss-Seidel for laplacian(p) = f. Red cells ((i+j) even) are
/// updated first, then black cells. The result is mean-anchored to zero.
Grid gauss_seidel(Grid p, const Grid& f, int sweeps);

/// In-place variant used by the solvers; does not anchor the mean.
void gauss_seidel_sweeps(Grid& p, const Grid& f, int sweeps);

double norm(const Grid& g, NormKind kind = NormKind::L2);

Grid subtract_mean(Grid g);

/// PGRD binary format: "PGRD", u32 version (1), u32 n, f64 h, n*n f64 values,
/// all little-endian, row-major.
void write_pgrd(const Grid& g, const std::filesystem::path& path);
Grid read_pgrd(const std::filesystem::path& path);

}  // namespace mgsr
