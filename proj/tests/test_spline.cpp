#include <doctest.h>

#include <cmath>
#include <numbers>

#include "mgsr/error.hpp"
#include "mgsr/multigrid.hpp"
#include "mgsr/spline.hpp"
#include "test_support.hpp"

using namespace mgsr;

namespace {

// Periodic cubic spline by dense Gaussian elimination on the second-derivative
// system M[i-1] + 4 M[i] + M[i+1] = 6 (y[i+1] - 2 y[i] + y[i-1]).
std::vector<double> dense_spline(const std::vector<double>& y, int factor) {
  const int n = static_cast<int>(y.size());
  std::vector<std::vector<double>> a(n, std::vector<double>(n + 1, 0.0));
  for (int i = 0; i < n; ++i) {
    a[i][i] += 4.0;
    a[i][(i + 1) % n] += 1.0;
    a[i][(i + n - 1) % n] += 1.0;
    a[i][n] = 6.0 * (y[(i + 1) % n] - 2.0 * y[i] + y[(i + n - 1) % n]);
  }
  for (int c = 0; c < n; ++c) {
    int piv = c;
    for (int r = c + 1; r < n; ++r)
      if (std::abs(a[r][c]) > std::abs(a[piv][c])) piv = r;
    std::swap(a[c], a[piv]);
    for (int r = 0; r < n; ++r) {
      if (r == c) continue;
      const double m = a[r][c] / a[c][c];
      for (int k = c; k <= n; ++k) a[r][k] -= m * a[c][k];
    }
  }
  std::vector<double> m2(n);
  for (int i = 0; i < n; ++i) m2[i] = a[i][n] / a[i][i];
  std::vector<double> out;
  for (int i = 0; i < n; ++i)
    for (int s = 0; s < factor; ++s) {
      const double t = static_cast<double>(s) / factor;
      const double u = 1.0 - t;
      const int j = (i + 1) % n;
      out.push_back(u * y[i] + t * y[j] + ((u * u * u - u) * m2[i] + (t * t * t - t) * m2[j]) / 6.0);
    }
  return out;
}

double bilinear_at(const Grid& c, double x, double y) {
  const int i0 = static_cast<int>(std::floor(x));
  const int j0 = static_cast<int>(std::floor(y));
  const double tx = x - i0;
  const double ty = y - j0;
  return (1 - tx) * (1 - ty) * c.wrapped(i0, j0) + tx * (1 - ty) * c.wrapped(i0 + 1, j0) +
         (1 - tx) * ty * c.wrapped(i0, j0 + 1) + tx * ty * c.wrapped(i0 + 1, j0 + 1);
}

}  // namespace

TEST_SUITE("spline") {
  TEST_CASE("one-dimensional upsample matches a dense solve") {
    for (int n : {3, 5, 8, 12}) {
      std::vector<double> y(n);
      for (int i = 0; i < n; ++i) y[i] = std::sin(1.3 * i) + 0.2 * i * i;
      for (int factor : {2, 3, 4}) {
        const auto fast = periodic_cubic_upsample(y, factor);
        const auto slow = dense_spline(y, factor);
        REQUIRE(fast.size() == slow.size());
        for (std::size_t k = 0; k < fast.size(); ++k) CHECK(fast[k] == doctest::Approx(slow[k]).epsilon(1e-12));
      }
    }
  }

  TEST_CASE("constants are preserved") {
    for (int factor : {2, 4, 16}) {
      const Grid fine = spline_prolong(Grid::constant(6, 0.5, -1.75), factor);
      CHECK(fine.n() == 6 * factor);
      CHECK(fine.h() == doctest::Approx(0.5 / factor));
      for (double v : fine.values()) CHECK(v == doctest::Approx(-1.75).epsilon(1e-14));
    }
  }

  TEST_CASE("knots are reproduced and restriction recovers the coarse grid") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      const Grid coarse = testing::random_grid(12, 1.0, seed);
      for (int k : {1, 2, 4}) {
        const int factor = 1 << k;
        const Grid fine = spline_prolong(coarse, factor);
        double worst = 0.0;
        for (int i = 0; i < 12; ++i)
          for (int j = 0; j < 12; ++j) worst = std::max(worst, std::abs(fine(factor * i, factor * j) - coarse(i, j)));
        CHECK(worst <= 1e-14);
        CHECK(testing::max_abs_diff(restrict_k(fine, k), coarse) <= 1e-14);
      }
    }
  }

  TEST_CASE("smooth mode beats bilinear interpolation") {
    const int n = 12;
    const int factor = 4;
    Grid coarse(n, 1.0 / n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) coarse(i, j) = std::sin(2.0 * std::numbers::pi * i / n);
    const Grid fine = spline_prolong(coarse, factor);
    double spline_err = 0.0;
    double bilinear_err = 0.0;
    for (int i = 0; i < n * factor; ++i)
      for (int j = 0; j < n * factor; ++j) {
        const double exact = std::sin(2.0 * std::numbers::pi * i / (n * factor));
        spline_err = std::max(spline_err, std::abs(fine(i, j) - exact));
        bilinear_err = std::max(bilinear_err, std::abs(bilinear_at(coarse, double(i) / factor, double(j) / factor) - exact));
      }
    CHECK(spline_err < bilinear_err);
    CHECK(spline_err < 1e-2);
  }

  TEST_CASE("factor must be at least two") {
    CHECK_THROWS_AS(spline_prolong(Grid(6, 1.0), 1), ConfigError);
  }
}
