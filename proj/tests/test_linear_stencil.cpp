#include <doctest.h>

#include <random>

#include "mgsr/error.hpp"
#include "mgsr/generator.hpp"
#include "mgsr/linear_stencil.hpp"

using namespace mgsr;

namespace {

std::vector<double> random_window(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  std::vector<double> w(36);
  for (double& v : w) v = uni(rng);
  return w;
}

// Fine cell (4i, 4j) copies coarse cell (i, j); everything else is zero.
std::vector<double> injected_target(const std::vector<double>& in) {
  std::vector<double> t(576, 0.0);
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j) t[static_cast<std::size_t>(4 * i) * 24 + 4 * j] = in[static_cast<std::size_t>(i) * 6 + j];
  return t;
}

// Fine cell (a, b) copies its nearest coarse cell (a/4, b/4).
std::vector<double> nearest_target(const std::vector<double>& in) {
  std::vector<double> t(576);
  for (int a = 0; a < 24; ++a)
    for (int b = 0; b < 24; ++b) t[static_cast<std::size_t>(a) * 24 + b] = in[static_cast<std::size_t>(a / 4) * 6 + b / 4];
  return t;
}

std::vector<WindowPair> make_pairs(int count, std::uint64_t seed, std::vector<double> (*target)(const std::vector<double>&)) {
  std::mt19937_64 rng(seed);
  std::vector<WindowPair> pairs;
  for (int k = 0; k < count; ++k) {
    auto in = random_window(rng);
    pairs.push_back({in, target(in)});
  }
  return pairs;
}

}  // namespace

TEST_SUITE("linear stencil") {
  TEST_CASE("recovers an exactly linear map") {
    const auto pairs = make_pairs(200, 1, injected_target);
    const WeightsContainer w = fit_linear_stencil(pairs, 0.0);
    CHECK(w.kind() == "linear_stencil");
    CHECK(w.require("stencil", {576, 37}).data.size() == 576u * 37u);
    const LinearStencil s(w);
    const double mse = window_mse(std::span<const WindowPair>(pairs), [&](const auto& in) { return s.apply(in); });
    CHECK(mse <= 1e-20);
  }

  TEST_CASE("maps constants to constants when trained on them") {
    auto pairs = make_pairs(100, 2, nearest_target);
    for (double c : {-0.8, -0.1, 0.3, 0.9}) pairs.push_back({std::vector<double>(36, c), std::vector<double>(576, c)});
    const LinearStencil s(fit_linear_stencil(pairs, 0.0));
    for (double v : s.apply(std::vector<double>(36, 0.42))) CHECK(v == doctest::Approx(0.42).epsilon(1e-10));
  }

  TEST_CASE("least squares never loses to the zero predictor") {
    std::mt19937_64 rng(3);
    std::vector<WindowPair> pairs;
    for (int k = 0; k < 80; ++k) pairs.push_back({random_window(rng), random_window(rng)});
    for (auto& p : pairs) p.target.resize(576, p.target[0]);
    const LinearStencil s(fit_linear_stencil(pairs, 1e-3));
    const std::span<const WindowPair> view(pairs);
    const double fitted = window_mse(view, [&](const auto& in) { return s.apply(in); });
    const double zero = window_mse(view, [](const auto&) { return std::vector<double>(576, 0.0); });
    CHECK(fitted <= zero);
  }

  TEST_CASE("input validation") {
    CHECK_THROWS_AS(fit_linear_stencil(make_pairs(35, 4, injected_target), 1e-3), InputError);
    std::vector<WindowPair> degenerate(50, WindowPair{std::vector<double>(36, 0.5), std::vector<double>(576, 0.5)});
    CHECK_THROWS_AS(fit_linear_stencil(degenerate, 0.0), NumericalError);
    CHECK_NOTHROW(fit_linear_stencil(degenerate, 1e-6));
    CHECK_THROWS_AS(fit_linear_stencil(make_pairs(50, 4, injected_target), -1.0), InputError);
    CHECK_THROWS_AS(LinearStencil(random_generator_weights(0, 0.1)), WeightsError);
  }

  TEST_CASE("block evaluation matches full evaluation") {
    const LinearStencil s(fit_linear_stencil(make_pairs(60, 5, nearest_target), 1e-4));
    std::mt19937_64 rng(6);
    const auto in = random_window(rng);
    const auto full = s.apply(in);
    std::vector<double> part(576, -7.0);
    s.apply_block(in, 8, 16, 0, 24, part);
    for (int a = 0; a < 24; ++a)
      for (int b = 0; b < 24; ++b) {
        const std::size_t k = static_cast<std::size_t>(a) * 24 + b;
        CHECK(part[k] == (a >= 8 && a < 16 ? full[k] : -7.0));
      }
  }
}
