#include "mgsr/grid.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include "binary_io.hpp"
#include "mgsr/error.hpp"

namespace mgsr {

namespace {

constexpr std::uint32_t kPgrdVersion = 1;

void require_same_shape(const Grid& a, const Grid& b, const char* what) {
  if (!a.same_shape(b)) {
    throw ShapeError(std::string(what) + ": grid shapes differ (" + std::to_string(a.n()) + " vs " +
                     std::to_string(b.n()) + ")");
  }
}

// One colour of a red-black sweep. colour 0 = red ((i+j) even), 1 = black.
void relax_colour(Grid& p, const Grid& f, int colour) {
  const int n = p.n();
  const double h2 = p.h() * p.h();
  for (int i = 0; i < n; ++i) {
    const int up = (i == 0) ? n - 1 : i - 1;
    const int down = (i == n - 1) ? 0 : i + 1;
    for (int j = (i + colour) & 1; j < n; j += 2) {
      const int left = (j == 0) ? n - 1 : j - 1;
      const int right = (j == n - 1) ? 0 : j + 1;
      p(i, j) = (p(down, j) + p(up, j) + p(i, right) + p(i, left) - h2 * f(i, j)) * 0.25;
    }
  }
}

}  // namespace

Grid::Grid(int n, double h) : Grid(n, h, std::vector<double>(static_cast<std::size_t>(std::max(n, 0)) * std::max(n, 0), 0.0)) {}

Grid::Grid(int n, double h, std::vector<double> values) : n_(n), h_(h), values_(std::move(values)) {
  if (n < 2) throw ShapeError("grid side must be at least 2, got " + std::to_string(n));
  if (!(h > 0.0) || !std::isfinite(h)) throw InputError("grid spacing must be positive and finite");
  if (values_.size() != static_cast<std::size_t>(n) * static_cast<std::size_t>(n)) {
    throw ShapeError("grid value count does not match n*n");
  }
}

Grid Grid::constant(int n, double h, double value) {
  return Grid(n, h, std::vector<double>(static_cast<std::size_t>(n) * n, value));
}

double Grid::wrapped(long i, long j) const {
  const long n = n_;
  long ii = i % n;
  long jj = j % n;
  if (ii < 0) ii += n;
  if (jj < 0) jj += n;
  return values_[index(static_cast<int>(ii), static_cast<int>(jj))];
}

double Grid::mean() const {
  return std::accumulate(values_.begin(), values_.end(), 0.0) / static_cast<double>(values_.size());
}

bool Grid::all_finite() const {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

bool Grid::same_shape(const Grid& other) const { return n_ == other.n_ && h_ == other.h_; }

Grid& Grid::operator+=(const Grid& other) {
  require_same_shape(*this, other, "operator+=");
  for (std::size_t k = 0; k < values_.size(); ++k) values_[k] += other.values_[k];
  return *this;
}

Grid& Grid::operator-=(const Grid& other) {
  require_same_shape(*this, other, "operator-=");
  for (std::size_t k = 0; k < values_.size(); ++k) values_[k] -= other.values_[k];
  return *this;
}

Grid& Grid::operator*=(double s) {
  for (double& v : values_) v *= s;
  return *this;
}

Grid laplacian(const Grid& g) {
  const int n = g.n();
  const double inv_h2 = 1.0 / (g.h() * g.h());
  Grid out(n, g.h());
  for (int i = 0; i < n; ++i) {
    const int up = (i == 0) ? n - 1 : i - 1;
    const int down = (i == n - 1) ? 0 : i + 1;
    for (int j = 0; j < n; ++j) {
      const int left = (j == 0) ? n - 1 : j - 1;
      const int right = (j == n - 1) ? 0 : j + 1;
      out(i, j) = (g(down, j) + g(up, j) + g(i, right) + g(i, left) - 4.0 * g(i, j)) * inv_h2;
    }
  }
  return out;
}

Grid residual(const Grid& p, const Grid& f) {
  require_same_shape(p, f, "residual");
  Grid r = laplacian(p);
  auto rv = r.values();
  auto fv = f.values();
  for (std::size_t k = 0; k < rv.size(); ++k) rv[k] = fv[k] - rv[k];
  return r;
}

void gauss_seidel_sweeps(Grid& p, const Grid& f, int sweeps) {
  require_same_shape(p, f, "gauss_seidel");
  for (int s = 0; s < sweeps; ++s) {
    relax_colour(p, f, 0);
    relax_colour(p, f, 1);
  }
}

Grid gauss_seidel(Grid p, const Grid& f, int sweeps) {
  if (sweeps < 0) throw InputError("gauss_seidel: sweep count must be non-negative");
  gauss_seidel_sweeps(p, f, sweeps);
  return subtract_mean(std::move(p));
}

double norm(const Grid& g, NormKind kind) {
  double sum = 0.0;
  for (double v : g.values()) sum += v * v;
  if (kind == NormKind::L2MeanNormalized) sum /= static_cast<double>(g.size());
  return std::sqrt(sum);
}

Grid subtract_mean(Grid g) {
  const double m = g.mean();
  for (double& v : g.values()) v -= m;
  return g;
}

void write_pgrd(const Grid& g, const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw IoError("cannot open " + path.string() + " for writing");
  os.write("PGRD", 4);
  detail::put_u32(os, kPgrdVersion);
  detail::put_u32(os, static_cast<std::uint32_t>(g.n()));
  detail::put_f64(os, g.h());
  for (double v : g.values()) detail::put_f64(os, v);
  if (!os) throw IoError("write failed: " + path.string());
}

Grid read_pgrd(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open " + path.string());
  detail::expect_magic(is, "PGRD", path.string());
  const auto version = detail::get_u32(is);
  if (version != kPgrdVersion) {
    throw IoError(path.string() + ": unsupported PGRD version " + std::to_string(version));
  }
  const auto n = detail::get_u32(is);
  const double h = detail::get_f64(is);
  if (n < 2 || n > (1u << 15)) throw IoError(path.string() + ": implausible grid size");
  std::vector<double> values(static_cast<std::size_t>(n) * n);
  for (double& v : values) v = detail::get_f64(is);
  return Grid(static_cast<int>(n), h, std::move(values));
}

}  // namespace mgsr
