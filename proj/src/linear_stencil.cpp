#include "mgsr/linear_stencil.hpp"

#include <Eigen/Dense>

#include "mgsr/error.hpp"

namespace mgsr {

namespace {
constexpr int kIn = LinearStencil::kInputSide * LinearStencil::kInputSide;     // 36
constexpr int kOut = LinearStencil::kOutputSide * LinearStencil::kOutputSide;  // 576
constexpr int kCols = kIn + 1;
}  // namespace

WeightsContainer fit_linear_stencil(std::span<const WindowPair> samples, double ridge, const NormalizationSpec& spec) {
  if (samples.size() < static_cast<std::size_t>(kIn)) {
    throw InputError("fit_linear_stencil: need at least 36 samples, got " + std::to_string(samples.size()));
  }
  if (!(ridge >= 0.0)) throw InputError("fit_linear_stencil: ridge must be non-negative");

  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(kCols, kCols);
  Eigen::MatrixXd cross = Eigen::MatrixXd::Zero(kCols, kOut);
  Eigen::VectorXd x(kCols);
  for (const auto& s : samples) {
    if (s.input.size() != static_cast<std::size_t>(kIn) || s.target.size() != static_cast<std::size_t>(kOut)) {
      throw ShapeError("fit_linear_stencil: sample has wrong window size");
    }
    for (int k = 0; k < kIn; ++k) x[k] = s.input[k];
    x[kIn] = 1.0;
    gram.selfadjointView<Eigen::Lower>().rankUpdate(x);
    const Eigen::Map<const Eigen::RowVectorXd> t(s.target.data(), kOut);
    cross.noalias() += x * t;
  }
  gram = gram.selfadjointView<Eigen::Lower>();
  for (int k = 0; k < kIn; ++k) gram(k, k) += ridge;

  if (ridge == 0.0) {
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram, Eigen::EigenvaluesOnly);
    const double lo = eig.eigenvalues().minCoeff();
    const double hi = eig.eigenvalues().maxCoeff();
    if (!(lo > 1e-13 * hi)) {
      throw NumericalError("fit_linear_stencil: normal equations are rank deficient; use ridge > 0");
    }
  }
  const Eigen::LDLT<Eigen::MatrixXd> ldlt(gram);
  if (ldlt.info() != Eigen::Success) throw NumericalError("fit_linear_stencil: factorisation failed");
  const Eigen::MatrixXd coeffs = ldlt.solve(cross);  // kCols x kOut
  if (!coeffs.allFinite()) throw NumericalError("fit_linear_stencil: non-finite coefficients");

  Tensor t{"stencil", {static_cast<std::uint32_t>(kOut), static_cast<std::uint32_t>(kCols)}, {}};
  t.data.resize(static_cast<std::size_t>(kOut) * kCols);
  for (int o = 0; o < kOut; ++o)
    for (int c = 0; c < kCols; ++c) t.data[static_cast<std::size_t>(o) * kCols + c] = coeffs(c, o);

  nlohmann::json arch = {{"kind", "linear_stencil"},
                         {"n_s", LinearStencil::kInputSide},
                         {"base_factor", 4},
                         {"normalization", {{"p_min", spec.p_min}, {"p_max", spec.p_max}}},
                         {"layers", {{{"type", "affine"}, {"name", "stencil"}, {"in", kIn}, {"out", kOut}}}},
                         {"ridge", ridge},
                         {"samples", samples.size()}};
  return WeightsContainer(std::move(arch), {std::move(t)});
}

LinearStencil::LinearStencil(const WeightsContainer& weights) {
  if (weights.kind() != "linear_stencil") throw WeightsError("weights are not a linear stencil");
  const Tensor& t = weights.require("stencil", {static_cast<std::uint32_t>(kOut), static_cast<std::uint32_t>(kCols)});
  coeffs_ = t.data;
}

std::vector<double> LinearStencil::apply(std::span<const double> window) const {
  std::vector<double> out(kOut);
  apply_block(window, 0, kOutputSide, 0, kOutputSide, out);
  return out;
}

void LinearStencil::apply_block(std::span<const double> window, int r0, int r1, int c0, int c1,
                                std::span<double> out) const {
  if (window.size() != static_cast<std::size_t>(kIn)) throw ShapeError("linear stencil input must have 36 values");
  if (out.size() != static_cast<std::size_t>(kOut)) throw ShapeError("linear stencil output must have 576 values");
  for (int r = r0; r < r1; ++r) {
    for (int c = c0; c < c1; ++c) {
      const int o = r * kOutputSide + c;
      const double* w = coeffs_.data() + static_cast<std::size_t>(o) * kCols;
      double acc = w[kIn];
      for (int k = 0; k < kIn; ++k) acc += w[k] * window[k];
      out[o] = acc;
    }
  }
}

}  // namespace mgsr
