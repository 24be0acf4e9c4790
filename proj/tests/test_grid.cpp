#include <doctest.h>

#include <cmath>
#include <fstream>
#include <numbers>

#include "mgsr/error.hpp"
#include "mgsr/grid.hpp"
#include "mgsr/spectral.hpp"
#include "test_support.hpp"

using namespace mgsr;
using mgsr::testing::max_abs_diff;
using mgsr::testing::random_grid;

namespace {

// Straightforward stencil with explicit modular indexing.
double stencil_at(const Grid& g, int i, int j) {
  const int n = g.n();
  auto at = [&](int a, int b) { return g(((a % n) + n) % n, ((b % n) + n) % n); };
  return (at(i + 1, j) + at(i - 1, j) + at(i, j + 1) + at(i, j - 1) - 4.0 * at(i, j)) / (g.h() * g.h());
}

// One red-black sweep written out cell by cell, no mean anchoring.
void reference_sweep(Grid& p, const Grid& f) {
  const int n = p.n();
  const double h2 = p.h() * p.h();
  for (int colour = 0; colour < 2; ++colour)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        if ((i + j) % 2 != colour) continue;
        const double nb = p((i + 1) % n, j) + p((i + n - 1) % n, j) + p(i, (j + 1) % n) + p(i, (j + n - 1) % n);
        p(i, j) = (nb - h2 * f(i, j)) / 4.0;
      }
}

}  // namespace

TEST_SUITE("grid") {
  TEST_CASE("construction rejects bad shapes") {
    CHECK_THROWS_AS(Grid(1, 1.0), ShapeError);
    CHECK_THROWS_AS(Grid(4, 0.0), InputError);
    CHECK_THROWS_AS(Grid(4, 1.0, std::vector<double>(15)), ShapeError);
  }

  TEST_CASE("periodic addressing") {
    Grid g = random_grid(5, 1.0, 3);
    for (int i = -7; i < 12; ++i)
      for (int j = -7; j < 12; ++j) CHECK(g.wrapped(i, j) == g(((i % 5) + 5) % 5, ((j % 5) + 5) % 5));
  }

  TEST_CASE("laplacian of a constant vanishes") {
    const Grid l = laplacian(Grid::constant(8, 0.3, 2.5));
    for (double v : l.values()) CHECK(v == 0.0);
  }

  TEST_CASE("laplacian of an impulse") {
    Grid g(6, 1.0);
    g(0, 0) = 1.0;
    const Grid l = laplacian(g);
    for (int i = 0; i < 6; ++i)
      for (int j = 0; j < 6; ++j) {
        double expected = 0.0;
        if (i == 0 && j == 0) expected = -4.0;
        if ((i == 0 && (j == 1 || j == 5)) || (j == 0 && (i == 1 || i == 5))) expected = 1.0;
        CHECK(l(i, j) == expected);
      }
  }

  TEST_CASE("laplacian eigen-response of a Fourier mode") {
    const int n = 32;
    const int k = 3;
    const double h = 1.0 / n;
    Grid g(n, h);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) g(i, j) = std::sin(2.0 * std::numbers::pi * k * i / n);
    const double lambda = (2.0 * std::cos(2.0 * std::numbers::pi * k / n) - 2.0) / (h * h);
    const Grid l = laplacian(g);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) CHECK(l(i, j) == doctest::Approx(lambda * g(i, j)).epsilon(1e-12).scale(std::abs(lambda)));
  }

  TEST_CASE("laplacian matches the brute-force stencil") {
    const Grid g = random_grid(9, 0.7, 11);
    const Grid l = laplacian(g);
    for (int i = 0; i < 9; ++i)
      for (int j = 0; j < 9; ++j) CHECK(l(i, j) == doctest::Approx(stencil_at(g, i, j)).epsilon(1e-14));
  }

  TEST_CASE("laplacian is linear and sums to zero") {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
      const Grid a = random_grid(12, 0.25, seed);
      const Grid b = random_grid(12, 0.25, seed + 100);
      const double alpha = 1.5 - 0.1 * seed;
      const double beta = 0.3 * seed;
      const Grid lhs = laplacian(a * alpha + b * beta);
      const Grid rhs = laplacian(a) * alpha + laplacian(b) * beta;
      CHECK(max_abs_diff(lhs, rhs) <= 1e-12 * (1.0 + testing::max_abs(rhs)));
      const Grid l = laplacian(a);
      double sum = 0.0;
      for (double v : l.values()) sum += v;
      CHECK(std::abs(sum) <= 1e-12 * norm(l));
    }
  }

  TEST_CASE("residual") {
    SUBCASE("zero p gives f") {
      const Grid f = random_grid(8, 1.0, 5);
      CHECK(residual(Grid(8, 1.0), f) == f);
    }
    SUBCASE("exact solution gives zero") {
      const Grid p = random_grid(8, 1.0, 6);
      const Grid r = residual(p, laplacian(p));
      CHECK(testing::max_abs(r) == 0.0);
    }
    SUBCASE("matches elementwise recomputation") {
      const Grid p = random_grid(8, 1.0, 7);
      const Grid f = random_grid(8, 1.0, 8);
      const Grid r = residual(p, f);
      for (int i = 0; i < 8; ++i)
        for (int j = 0; j < 8; ++j) CHECK(r(i, j) == doctest::Approx(f(i, j) - stencil_at(p, i, j)).epsilon(1e-14));
    }
    SUBCASE("shape mismatch") {
      CHECK_THROWS_AS(residual(Grid(8, 1.0), Grid(6, 1.0)), ShapeError);
      CHECK_THROWS_AS(residual(Grid(8, 1.0), Grid(8, 0.5)), ShapeError);
    }
  }

  TEST_CASE("gauss-seidel sweep order and anchoring") {
    const Grid f = random_grid(10, 0.4, 21, true);
    Grid expected = random_grid(10, 0.4, 22);
    const Grid p0 = expected;
    for (int s = 0; s < 3; ++s) reference_sweep(expected, f);
    const Grid got = gauss_seidel(p0, f, 3);
    CHECK(max_abs_diff(got, subtract_mean(expected)) <= 1e-14);
    CHECK(std::abs(got.mean()) <= 1e-15);
  }

  TEST_CASE("gauss-seidel zero fixed point") {
    const Grid z = gauss_seidel(Grid(8, 1.0), Grid(8, 1.0), 7);
    CHECK(testing::max_abs(z) == 0.0);
  }

  TEST_CASE("gauss-seidel residual decreases") {
    const Grid f = random_grid(16, 1.0 / 16, 31, true);
    const double r1 = norm(residual(gauss_seidel(Grid(16, 1.0 / 16), f, 1), f));
    const double r10 = norm(residual(gauss_seidel(Grid(16, 1.0 / 16), f, 10), f));
    CHECK(r10 < r1);
    double prev = norm(f);
    Grid p(16, 1.0 / 16);
    for (int k = 0; k < 30; ++k) {
      p = gauss_seidel(p, f, 1);
      const double r = norm(residual(p, f));
      CHECK(r <= prev);
      prev = r;
    }
  }

  TEST_CASE("gauss-seidel smooths high frequencies faster") {
    const int n = 16;
    const Grid f(n, 1.0 / n);
    Grid checker(n, 1.0 / n);
    Grid low(n, 1.0 / n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        checker(i, j) = ((i + j) % 2 == 0) ? 1.0 : -1.0;
        low(i, j) = std::sin(2.0 * std::numbers::pi * i / n);
      }
    CHECK(2.0 * norm(gauss_seidel(checker, f, 1)) <= norm(checker));

    Grid low_ref = low;
    reference_sweep(low_ref, f);
    const Grid low_after = gauss_seidel(low, f, 1);
    CHECK(max_abs_diff(low_after, subtract_mean(low_ref)) <= 1e-14);
    const double factor = norm(low) / norm(low_after);
    CHECK(factor > 1.0);
    CHECK(factor < 1.2);
  }

  TEST_CASE("gauss-seidel leaves the exact discrete solution fixed") {
    const Grid f = random_grid(24, 0.2, 41, true);
    const Grid p = fft_poisson_solve(f);
    CHECK(max_abs_diff(gauss_seidel(p, f, 5), p) <= 1e-12 * testing::max_abs(p));
  }

  TEST_CASE("norms") {
    CHECK(norm(Grid(4, 1.0)) == 0.0);
    Grid single(4, 1.0);
    single(2, 1) = 3.0;
    CHECK(norm(single) == 3.0);
    CHECK(norm(Grid::constant(4, 1.0, 1.0)) == 4.0);
    CHECK(norm(Grid::constant(4, 1.0, 1.0), NormKind::L2MeanNormalized) == 1.0);
    for (std::uint64_t seed = 0; seed < 25; ++seed) {
      const Grid a = random_grid(7, 1.0, seed);
      const Grid b = random_grid(7, 1.0, seed + 50);
      for (auto kind : {NormKind::L2, NormKind::L2MeanNormalized}) {
        const double alpha = -3.0 + 0.25 * static_cast<double>(seed);
        CHECK(norm(a * alpha, kind) == doctest::Approx(std::abs(alpha) * norm(a, kind)).epsilon(1e-14));
        CHECK(norm(a + b, kind) <= norm(a, kind) + norm(b, kind) + 1e-15);
      }
    }
  }

  TEST_CASE("subtract_mean") {
    CHECK(testing::max_abs(subtract_mean(Grid::constant(3, 1.0, 1.0))) == 0.0);
    const Grid z = random_grid(6, 1.0, 3, true);
    CHECK(max_abs_diff(subtract_mean(z), z) <= 1e-16);
    const Grid g(2, 1.0, {1.0, 2.0, 3.0, 4.0});
    CHECK(subtract_mean(g) == Grid(2, 1.0, {-1.5, -0.5, 0.5, 1.5}));
  }

  TEST_CASE("pgrd layout and round trip") {
    testing::TempDir dir("pgrd");
    const Grid g = random_grid(5, 0.125, 9);
    write_pgrd(g, dir / "g.pgrd");
    CHECK(std::filesystem::file_size(dir / "g.pgrd") == 4 + 4 + 4 + 8 + 25 * 8);
    std::ifstream is(dir / "g.pgrd", std::ios::binary);
    char magic[4];
    is.read(magic, 4);
    CHECK(std::string(magic, 4) == "PGRD");
    const Grid back = read_pgrd(dir / "g.pgrd");
    CHECK(back == g);
    CHECK(back.h() == g.h());

    std::ofstream bad(dir / "bad.pgrd", std::ios::binary);
    bad << "XXXXjunk";
    bad.close();
    CHECK_THROWS_AS(read_pgrd(dir / "bad.pgrd"), IoError);
    CHECK_THROWS_AS(read_pgrd(dir / "missing.pgrd"), IoError);
  }
}
