#include <doctest.h>

#include <random>
#include <thread>

#include "mgsr/error.hpp"
#include "mgsr/prolongation.hpp"
#include "mgsr/spline.hpp"
#include "test_support.hpp"

using namespace mgsr;

namespace {

// Stencil fitted to a nearest-neighbour map plus constant windows, so its
// rows sum to one and its bias vanishes.
WeightsContainer nearest_stencil() {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  std::vector<WindowPair> pairs;
  for (int k = 0; k < 120; ++k) {
    WindowPair p{std::vector<double>(36), std::vector<double>(576)};
    for (double& v : p.input) v = uni(rng);
    if (k % 10 == 0) std::fill(p.input.begin(), p.input.end(), p.input[0]);
    for (int a = 0; a < 24; ++a)
      for (int b = 0; b < 24; ++b) p.target[static_cast<std::size_t>(a) * 24 + b] = p.input[static_cast<std::size_t>(a / 4) * 6 + b / 4];
    pairs.push_back(std::move(p));
  }
  return fit_linear_stencil(pairs, 0.0);
}

}  // namespace

TEST_SUITE("prolongation") {
  TEST_CASE("spline operator") {
    const SplineProlongation op(16);
    CHECK(op.label() == "spline");
    CHECK(op.total_factor() == 16);
    const Grid c = testing::random_grid(12, 0.5, 1);
    CHECK(op.apply(c) == spline_prolong(c, 16));
    CHECK_THROWS_AS(SplineProlongation(1), ConfigError);
  }

  TEST_CASE("composed learned operator reaches 192 from 12") {
    const LearnedProlongation op(nearest_stencil(), 2);
    CHECK(op.total_factor() == 16);
    CHECK(op.label() == "linear");
    const Grid fine = op.apply(testing::random_grid(12, 0.5, 2));
    CHECK(fine.n() == 192);
    CHECK(fine.h() == doctest::Approx(0.5 / 16));
  }

  TEST_CASE("output side is n times four per composition") {
    const WeightsContainer w = nearest_stencil();
    for (int n : {6, 12, 48}) {
      for (int c : {1, 2}) {
        if (n == 48 && c == 2) continue;
        const Grid fine = learned_prolong(testing::random_grid(n, 1.0, 3), w, c);
        CHECK(fine.n() == n * (c == 1 ? 4 : 16));
      }
    }
    CHECK_THROWS_AS(learned_prolong(Grid(4, 1.0), w, 1), ShapeError);
    CHECK_THROWS_AS(LearnedProlongation(w, 0), ConfigError);
  }

  TEST_CASE("constant grids stay constant") {
    const WeightsContainer w = nearest_stencil();
    for (auto mode : {NormalizationMode::PerGrid, NormalizationMode::Global}) {
      for (double c : {3e-5, -2e-7}) {
        const Grid fine = learned_prolong(Grid::constant(12, 0.1, c), w, 1, mode);
        for (double v : fine.values()) CHECK(v == doctest::Approx(c).epsilon(1e-10));
      }
    }
    const Grid zero = learned_prolong(Grid(12, 0.1), w, 2);
    CHECK(testing::max_abs(zero) == 0.0);
  }

  TEST_CASE("zero-bias stencil is odd") {
    const LearnedProlongation op(nearest_stencil(), 1, NormalizationMode::Global);
    const Grid c = testing::random_grid(12, 1.0, 4) * 1e-4;
    const Grid a = op.apply(c);
    const Grid b = op.apply(c * -1.0);
    CHECK(testing::max_abs_diff(a, b * -1.0) <= 1e-12 * testing::max_abs(a));
  }

  TEST_CASE("zero generator prolongs to zero") {
    const LearnedProlongation op(random_generator_weights(0, 0.0), 1, NormalizationMode::Global);
    CHECK(op.label() == "gan");
    const Grid fine = op.apply(testing::random_grid(8, 1.0, 5));
    CHECK(testing::max_abs(fine) == 0.0);
  }

  TEST_CASE("concurrent use gives identical results") {
    const LearnedProlongation op(nearest_stencil(), 1);
    const Grid c = testing::random_grid(24, 1.0, 6);
    const Grid expected = op.apply(c);
    std::vector<Grid> out(4);
    {
      std::vector<std::jthread> pool;
      for (int t = 0; t < 4; ++t) pool.emplace_back([&, t] { out[t] = op.apply(c); });
    }
    for (const Grid& g : out) CHECK(g == expected);
  }

  TEST_CASE("operator factory") {
    testing::TempDir dir("ops");
    write_srwt(nearest_stencil(), dir / "lin.srwt");
    write_srwt(random_generator_weights(1, 0.05), dir / "gan.srwt");
    const std::string lin = "linear:" + (dir / "lin.srwt").string();
    const std::string gan = "gan:" + (dir / "gan.srwt").string();
    CHECK(make_operator("spline", 16)->label() == "spline");
    CHECK(make_operator(lin, 16)->total_factor() == 16);
    CHECK(make_operator(gan, 4)->label() == "gan");
    CHECK_THROWS_AS(make_operator("bogus", 16), ConfigError);
    CHECK_THROWS_AS(make_operator("cubic:x", 16), ConfigError);
    CHECK_THROWS_AS(make_operator(lin, 8), ConfigError);
    CHECK_THROWS_AS(make_operator("linear:" + (dir / "gan.srwt").string(), 16), WeightsError);
    CHECK_THROWS_AS(make_operator("linear:" + (dir / "none.srwt").string(), 16), IoError);
  }

  TEST_CASE("descriptor normalisation bounds") {
    std::vector<WindowPair> pairs(40, WindowPair{std::vector<double>(36, 0.0), std::vector<double>(576, 0.0)});
    for (std::size_t k = 0; k < pairs.size(); ++k) pairs[k].input[k % 36] = 1.0;
    const WeightsContainer w = fit_linear_stencil(pairs, 1e-3, NormalizationSpec{1e-9, 2e-2});
    const auto spec = descriptor_spec(w);
    REQUIRE(spec.has_value());
    CHECK(spec->p_max == 2e-2);
    CHECK(LearnedProlongation(w, 1).spec().p_min == 1e-9);
    CHECK_FALSE(descriptor_spec(random_generator_weights(0, 0.0)).has_value());
  }
}
