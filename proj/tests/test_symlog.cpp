#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "mgsr/error.hpp"
#include "mgsr/symlog.hpp"

using namespace mgsr;

TEST_SUITE("symlog") {
  const NormalizationSpec spec{1e-10, 1e-3};

  TEST_CASE("bounds map to zero and one") {
    CHECK(symlog_normalize(1e-3, spec) == 1.0);
    CHECK(symlog_normalize(-1e-3, spec) == -1.0);
    CHECK(symlog_normalize(1e-10, spec) == 0.0);
    CHECK(symlog_normalize(0.0, spec) == 0.0);
    CHECK(symlog_normalize(5.0, spec) == 1.0);
    CHECK(symlog_normalize(-1e-14, spec) == 0.0);
  }

  TEST_CASE("geometric midpoint maps to one half") {
    CHECK(symlog_normalize(std::pow(10.0, -6.5), spec) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(symlog_normalize(-std::pow(10.0, -6.5), spec) == doctest::Approx(-0.5).epsilon(1e-14));
  }

  TEST_CASE("denormalize") {
    CHECK(symlog_denormalize(1.0, spec) == doctest::Approx(1e-3).epsilon(1e-15));
    CHECK(symlog_denormalize(-1.0, spec) == doctest::Approx(-1e-3).epsilon(1e-15));
    CHECK(symlog_denormalize(0.0, spec) == 0.0);
    CHECK_THROWS_AS(symlog_denormalize(1.0 + 1e-12, spec), InputError);
    CHECK_THROWS_AS(symlog_denormalize(std::numeric_limits<double>::quiet_NaN(), spec), InputError);
  }

  TEST_CASE("round trip on log-uniform magnitudes") {
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> expo(-10.0, -3.0);
    for (int k = 0; k < 100; ++k) {
      const double v = (k % 2 ? -1.0 : 1.0) * std::pow(10.0, expo(rng));
      const double y = symlog_normalize(v, spec);
      CHECK(std::abs(y) <= 1.0);
      CHECK(std::signbit(y) == std::signbit(v));
      CHECK(std::abs(symlog_denormalize(y, spec) - v) <= 1e-12 * std::abs(v));
    }
  }

  TEST_CASE("grid forms and input validation") {
    Grid g(2, 1.0, {1e-3, -1e-10, 3e-7, -2.0});
    const Grid y = symlog_normalize(g, spec);
    CHECK(y(0, 0) == 1.0);
    CHECK(y(0, 1) == 0.0);
    CHECK(y(1, 1) == -1.0);
    CHECK(symlog_denormalize(y, spec)(1, 0) == doctest::Approx(3e-7).epsilon(1e-12));
    g(0, 0) = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(symlog_normalize(g, spec), InputError);
    CHECK_THROWS_AS(symlog_normalize(Grid(2, 1.0), NormalizationSpec{1e-3, 1e-3}), ConfigError);
    CHECK_THROWS_AS(NormalizationSpec({-1.0, 1.0}).validate(), ConfigError);
  }

  TEST_CASE("rescaled spec keeps the dynamic range") {
    const Grid g(2, 1.0, {0.5, -4.0, 1.0, 0.0});
    const NormalizationSpec r = spec.rescaled_to(g);
    CHECK(r.p_max == 4.0);
    CHECK(r.p_min == doctest::Approx(4.0e-7).epsilon(1e-14));
    CHECK(spec.rescaled_to(Grid(3, 1.0)).p_max == 0.0);
  }
}
