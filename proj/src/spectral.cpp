#include "mgsr/spectral.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

#include "mgsr/error.hpp"

namespace mgsr {

namespace {

// The FFTW planner is not re-entrant; execution with new-array functions is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

fftw_complex* as_fftw(std::complex<double>* p) { return reinterpret_cast<fftw_complex*>(p); }

}  // namespace

struct FourierTransform2D::Plans {
  fftw_plan r2c = nullptr;
  fftw_plan c2r = nullptr;
};

FourierTransform2D::FourierTransform2D(int n) : n_(n), plans_(std::make_unique<Plans>()) {
  if (n < 2 || n % 2 != 0) throw ShapeError("FourierTransform2D: n must be even and >= 2");
  std::vector<double> real(static_cast<std::size_t>(n) * n);
  std::vector<std::complex<double>> cplx(static_cast<std::size_t>(n) * half());
  std::lock_guard lock(planner_mutex());
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  plans_->r2c = fftw_plan_dft_r2c_2d(n, n, real.data(), as_fftw(cplx.data()), flags);
  plans_->c2r = fftw_plan_dft_c2r_2d(n, n, as_fftw(cplx.data()), real.data(), flags | FFTW_DESTROY_INPUT);
  if (!plans_->r2c || !plans_->c2r) throw Error("FFTW planning failed");
}

FourierTransform2D::~FourierTransform2D() {
  std::lock_guard lock(planner_mutex());
  if (plans_->r2c) fftw_destroy_plan(plans_->r2c);
  if (plans_->c2r) fftw_destroy_plan(plans_->c2r);
}

std::vector<std::complex<double>> FourierTransform2D::forward(const Grid& g) const {
  if (g.n() != n_) throw ShapeError("FourierTransform2D: grid size mismatch");
  std::vector<double> in(g.values().begin(), g.values().end());
  std::vector<std::complex<double>> out(static_cast<std::size_t>(n_) * half());
  fftw_execute_dft_r2c(plans_->r2c, in.data(), as_fftw(out.data()));
  return out;
}

Grid FourierTransform2D::inverse(std::vector<std::complex<double>> spectrum, double h) const {
  if (spectrum.size() != static_cast<std::size_t>(n_) * half()) {
    throw ShapeError("FourierTransform2D: spectrum size mismatch");
  }
  std::vector<double> out(static_cast<std::size_t>(n_) * n_);
  fftw_execute_dft_c2r(plans_->c2r, as_fftw(spectrum.data()), out.data());
  const double scale = 1.0 / (static_cast<double>(n_) * n_);
  for (double& v : out) v *= scale;
  return Grid(n_, h, std::move(out));
}

const FourierTransform2D& cached_transform(int n) {
  thread_local std::map<int, std::unique_ptr<FourierTransform2D>> cache;
  auto& slot = cache[n];
  if (!slot) slot = std::make_unique<FourierTransform2D>(n);
  return *slot;
}

std::vector<std::complex<double>> full_spectrum(const Grid& g) {
  const int n = g.n();
  const auto count = static_cast<std::size_t>(n) * n;
  std::vector<std::complex<double>> in(count), out(count);
  for (std::size_t k = 0; k < count; ++k) in[k] = g.values()[k];
  fftw_plan plan;
  {
    std::lock_guard lock(planner_mutex());
    plan = fftw_plan_dft_2d(n, n, as_fftw(in.data()), as_fftw(out.data()), FFTW_FORWARD,
                            FFTW_ESTIMATE | FFTW_UNALIGNED);
  }
  fftw_execute(plan);
  {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(plan);
  }
  return out;
}

Grid fft_poisson_solve(const Grid& f) {
  const int n = f.n();
  const FourierTransform2D& fft = cached_transform(n);
  auto spec = fft.forward(f);
  const double inv_h2 = 1.0 / (f.h() * f.h());
  const int half = fft.half();
  for (int r = 0; r < n; ++r) {
    const double cr = 2.0 * std::cos(2.0 * std::numbers::pi * r / n) - 2.0;
    for (int c = 0; c < half; ++c) {
      const double cc = 2.0 * std::cos(2.0 * std::numbers::pi * c / n) - 2.0;
      const double lambda = (cr + cc) * inv_h2;
      auto& z = spec[static_cast<std::size_t>(r) * half + c];
      z = (r == 0 && c == 0) ? std::complex<double>{} : z / lambda;
    }
  }
  return subtract_mean(fft.inverse(std::move(spec), f.h()));
}

}  // namespace mgsr
