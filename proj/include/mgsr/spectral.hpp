#pragma once

// FFTW-backed helpers for biperiodic grids.

#include <complex>
#include <memory>
#include <vector>

#include "mgsr/grid.hpp"

namespace mgsr {

/// Real-to-complex 2-D transform of an n x n grid. The half spectrum has
/// n x (n/2 + 1) entries, row-major, unnormalised (FFTW convention).
class FourierTransform2D {
 public:
  explicit FourierTransform2D(int n);
  ~FourierTransform2D();
  FourierTransform2D(const FourierTransform2D&) = delete;
  FourierTransform2D& operator=(const FourierTransform2D&) = delete;

  int n() const { return n_; }
  int half() const { return n_ / 2 + 1; }

  std::vector<std::complex<double>> forward(const Grid& g) const;
  /// Inverse transform including the 1/n^2 normalisation. The input is
  /// taken by value because FFTW's c2r destroys its input.
  Grid inverse(std::vector<std::complex<double>> spectrum, double h) const;

  /// Signed integer wavenumber for a row (or full-spectrum column) index.
  int wavenumber(int index) const { return index <= n_ / 2 ? index : index - n_; }

 private:
  struct Plans;
  int n_;
  std::unique_ptr<Plans> plans_;
};

/// Per-thread transform instance for side n, created on first use.
const FourierTransform2D& cached_transform(int n);

/// Full complex spectrum (n x n, row-major) of a real grid.
std::vector<std::complex<double>> full_spectrum(const Grid& g);

/// Direct solve of laplacian(p) = f for the 5-point periodic operator by
/// diagonalisation in Fourier space. The mean of f is ignored and the
/// returned solution has zero mean.
Grid fft_poisson_solve(const Grid& f);

}  // namespace mgsr
